/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "epitrack/grid.hpp"
#include "epitrack/linalg.hpp"
#include "epitrack/random.hpp"

namespace epitrack {

/// Largest state dimension for which a dense p x p matrix is allowed.
inline constexpr std::size_t kDefaultDenseCap = 4096;

/// N state vectors stored as the columns of a p x N matrix.
class Ensemble {
 public:
  Ensemble(const GridSpec& spec, Matrix members);
  static Ensemble from_members(const std::vector<StateVector>& members);

  const GridSpec& spec() const { return spec_; }
  std::size_t dim() const { return static_cast<std::size_t>(x_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(x_.cols()); }

  const Matrix& matrix() const { return x_; }
  Matrix& matrix() { return x_; }
  StateVector member(std::size_t j) const;

  Vector mean() const;
  /// Sample standard deviation per state component (N - 1 divisor); zero
  /// for a single member.
  Vector stddev() const;
  /// X - mean, column by column.
  Matrix deviations() const;

 private:
  GridSpec spec_;
  Matrix x_;
};

/// Linear observation operator: the identity or a selection of cells.
class ObsOperator {
 public:
  static ObsOperator identity(std::size_t p);
  /// `indices` must be strictly increasing and inside [0, p).
  static ObsOperator subset(std::size_t p, std::vector<std::size_t> indices);

  bool is_identity() const { return identity_; }
  std::size_t state_dim() const { return p_; }
  std::size_t obs_dim() const { return identity_ ? p_ : indices_.size(); }
  std::size_t index(std::size_t k) const { return identity_ ? k : indices_[k]; }
  const std::vector<std::size_t>& indices() const { return indices_; }

  /// H x for a vector or for every column of a matrix.
  Vector apply(const Vector& x) const;
  Matrix apply(const Matrix& x) const;
  /// H^T z: scatters observation-space rows back to state space.
  Matrix adjoint(const Matrix& z) const;
  /// H A H^T for a dense p x p matrix.
  Matrix restrict(const Matrix& a) const;
  /// Explicit m x p matrix, for small oracles.
  Matrix dense() const;

 private:
  ObsOperator(std::size_t p, bool identity, std::vector<std::size_t> indices);

  std::size_t p_ = 0;
  bool identity_ = true;
  std::vector<std::size_t> indices_;
};

/// One delivery of observations.
struct ObsBatch {
  Vector y;        // point observations, length m
  Vector r_diag;   // diagonal of the observation error covariance
  std::int64_t step = 0;
};

/// Observation error variances matched to Poisson counts: max(y, 1).
Vector poisson_obs_variance(const Vector& y);

/// sigma2 * exp(-d_ij / L) between cell centres, optionally truncated to
/// exact zero beyond `cutoff` (stored sparse).
class StationaryCovariance {
 public:
  const GridSpec& spec() const { return spec_; }
  double sigma2() const { return sigma2_; }
  double corr_length() const { return corr_length_; }
  double cutoff() const { return cutoff_; }
  bool is_dense() const { return !sparse_; }
  std::size_t dim() const { return spec_.size(); }

  /// Formula value, independent of the stored representation and cutoff.
  double formula(std::size_t i, std::size_t j) const;
  /// Stored value (zero beyond the cutoff).
  double operator()(std::size_t i, std::size_t j) const;

  const Matrix& dense() const { return *dense_; }
  const SparseMatrix& sparse() const { return *sparse_; }

  /// Q H^T z for an m x k block z.
  Matrix apply_adjoint(const ObsOperator& h, const Matrix& z) const;
  /// H Q H^T as a dense m x m matrix.
  Matrix restrict_dense(const ObsOperator& h) const;
  /// H Q H^T as a sparse m x m matrix (sparse representation only).
  SparseMatrix restrict_sparse(const ObsOperator& h) const;

 private:
  friend StationaryCovariance build_stationary_covariance(const GridSpec&, double, double, double,
                                                          std::size_t);
  GridSpec spec_;
  double sigma2_ = 1.0;
  double corr_length_ = 1.0;
  double cutoff_ = std::numeric_limits<double>::infinity();
  std::optional<Matrix> dense_;
  std::optional<SparseMatrix> sparse_;
};

/// Infinite `cutoff` requests the dense representation, which is refused
/// (ConfigError) when spec.size() > dense_cap.
StationaryCovariance build_stationary_covariance(const GridSpec& spec, double sigma2, double corr_length,
                                                 double cutoff = std::numeric_limits<double>::infinity(),
                                                 std::size_t dense_cap = kDefaultDenseCap);

/// (1 / (N - 1)) A A^T with A the ensemble deviations. Dense p x p; for
/// small problems and oracles only.
Matrix sample_covariance(const Ensemble& ens);

struct KalmanAnalysis {
  StateVector xa;
  Matrix qa;
};

/// Classical Kalman analysis: K = Qf H^T (H Qf H^T + R)^-1,
/// xa = xf + K (y - H xf), Qa = (I - K H) Qf.
KalmanAnalysis kf_update(const StateVector& xf, const Matrix& qf, const ObsOperator& h, const Vector& y,
                         const Vector& r_diag);

struct KalmanForecast {
  Vector xf;
  Matrix qf;
};

/// xf = F x, Qf = F Q F^T + Sigma.
KalmanForecast kf_forecast(const Vector& x, const Matrix& q, const Matrix& f, const Matrix& sigma);

/// Perturbed-observation EnKF with the ensemble sample covariance, applied
/// through the deviations so no p x p matrix is formed.
Ensemble enkf_update(const Ensemble& ens, const ObsOperator& h, const Matrix& y_pert, const Vector& r_diag);

/// Gain of the stationary-covariance filter, K = Q H^T (H Q H^T + R)^-1,
/// held as the factor of the innovation covariance. Depends only on
/// (Q, H, R), so one instance can be reused across cycles.
class EnosiGain {
 public:
  EnosiGain(const StationaryCovariance& q, const ObsOperator& h, const Vector& r_diag,
            std::size_t dense_cap = kDefaultDenseCap);

  const ObsOperator& obs_operator() const { return h_; }
  const Vector& r_diag() const { return r_diag_; }
  bool matches(const ObsOperator& h, const Vector& r_diag) const;

  /// X^a = X^f + K (Y - H X^f).
  Ensemble apply(const Ensemble& ens, const Matrix& y_pert) const;

  /// Explicit p x m gain; small problems only.
  Matrix gain_matrix() const;

 private:
  const StationaryCovariance* q_;
  ObsOperator h_;
  Vector r_diag_;
  SpdFactor factor_;
};

Ensemble enosi_update(const Ensemble& ens, const ObsOperator& h, const Matrix& y_pert, const Vector& r_diag,
                      const StationaryCovariance& q);

/// Y(k, j) ~ Poisson(y(k)), independent per entry; entry (k, j) draws from
/// rng.substream(k, j, kPerturbation).
Matrix perturb_observations_poisson(const Vector& y, std::size_t n_members, const RngStream& rng);

struct CensorResult {
  Ensemble ensemble;
  std::size_t censored = 0;
};

/// Sets negative entries to zero and counts them.
CensorResult censor_nonnegative(const Ensemble& ens);

}  // namespace epitrack
