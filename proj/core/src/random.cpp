/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "epitrack/random.hpp"

#include <cmath>
#include <numbers>

#include "epitrack/error.hpp"

namespace epitrack {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53U;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57U;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9U;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85U;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint32_t fold32(std::uint64_t x) {
  return static_cast<std::uint32_t>(x) ^ static_cast<std::uint32_t>(x >> 32);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

std::uint32_t CounterEngine::next32() {
  if (used_ == 4) {
    block_ = philox4x32(counter_, key_);
    ++counter_[0];
    used_ = 0;
  }
  return block_[used_++];
}

CounterEngine::result_type CounterEngine::operator()() {
  const std::uint64_t hi = next32();
  const std::uint64_t lo = next32();
  return (hi << 32) | lo;
}

double CounterEngine::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
  const std::uint64_t k = splitmix64(splitmix64(seed) ^ splitmix64(stream_id ^ 0x5851F42D4C957F2DULL));
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

CounterEngine RngStream::substream(std::uint64_t a, std::uint64_t b, StreamTag tag) const {
  // a and b are cell/step style indices; values above 2^32 are folded.
  return CounterEngine(key_, fold32(a), fold32(b), static_cast<std::uint32_t>(tag));
}

std::uint64_t poisson_sample(double lambda, CounterEngine& rng) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw InvalidArgument("Poisson intensity must be finite and >= 0");
  }
  if (lambda == 0.0) return 0;

  if (lambda < kPoissonInversionLimit) {
    // Sequential search of the CDF; F can stall just below 1 in floating
    // point, hence the restart guard.
    for (;;) {
      const double u = rng.uniform();
      double p = std::exp(-lambda);
      double cdf = p;
      std::uint64_t k = 0;
      while (u > cdf && k < 1000) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cdf += p;
      }
      if (k < 1000) return k;
    }
  }

  // PTRS, W. Hormann, "The transformed rejection method for generating
  // Poisson random variables", Insurance: Math. and Econ. 12 (1993).
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

double normal_sample(CounterEngine& rng) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1]
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace epitrack
