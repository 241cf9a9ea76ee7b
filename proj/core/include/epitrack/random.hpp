/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace epitrack {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stateful view of one Philox substream. The first counter word is the block
/// index; the remaining three are fixed at construction, so every
/// (key, c1, c2, c3) tuple names an independent sequence.
///
/// Satisfies UniformRandomBitGenerator.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  CounterEngine(std::array<std::uint32_t, 2> key, std::uint32_t c1, std::uint32_t c2, std::uint32_t c3)
      : key_(key), counter_{0, c1, c2, c3} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint32_t next32();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  unsigned used_ = 4;
};

/// Substream purposes. Kept distinct so that, e.g., the dynamics of member j
/// and the observation perturbations of member j never share counters.
enum class StreamTag : std::uint32_t {
  kGeneric = 0,
  kDynamics = 1,
  kObservation = 2,
  kPerturbation = 3,
};

/// A reproducible random stream named by (seed, stream_id). Identical pairs
/// give identical sequences; distinct pairs give independent ones.
class RngStream {
 public:
  static constexpr std::uint64_t kTruthStream = 0x8000000000000000ULL;
  static constexpr std::uint64_t kObservationStream = 0x8000000000000001ULL;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Substream keyed by two indices (typically cell/entry and step) and a tag.
  CounterEngine substream(std::uint64_t a, std::uint64_t b, StreamTag tag = StreamTag::kGeneric) const;

  /// Convenience sequential engine: substream(0, 0, kGeneric).
  CounterEngine engine() const { return substream(0, 0); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint32_t, 2> key_;
};

/// Poisson(lambda) variate. Inversion by sequential search for lambda < 30,
/// Hormann's PTRS transformed rejection otherwise. Throws InvalidArgument for
/// negative or non-finite lambda.
std::uint64_t poisson_sample(double lambda, CounterEngine& rng);

/// Standard normal variate (Box-Muller, one output per call).
double normal_sample(CounterEngine& rng);

inline constexpr double kPoissonInversionLimit = 30.0;

}  // namespace epitrack
