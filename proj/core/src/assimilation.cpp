/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "epitrack/assimilation.hpp"

#include <cmath>
#include <string>

#include "epitrack/error.hpp"

namespace epitrack {

namespace {

std::string dims(Eigen::Index r, Eigen::Index c) { return std::to_string(r) + "x" + std::to_string(c); }

void check_r_diag(const Vector& r_diag, std::size_t m) {
  if (static_cast<std::size_t>(r_diag.size()) != m) {
    throw DimensionError("R diagonal has length " + std::to_string(r_diag.size()) + ", expected " +
                         std::to_string(m));
  }
  for (Eigen::Index k = 0; k < r_diag.size(); ++k) {
    if (!(r_diag(k) > 0.0) || !std::isfinite(r_diag(k))) {
      throw InvalidArgument("observation error variances must be positive and finite");
    }
  }
}

void check_perturbed_obs(const Matrix& y_pert, const ObsOperator& h, std::size_t n) {
  if (static_cast<std::size_t>(y_pert.rows()) != h.obs_dim() || static_cast<std::size_t>(y_pert.cols()) != n) {
    throw DimensionError("perturbed observations are " + dims(y_pert.rows(), y_pert.cols()) + ", expected " +
                         dims(static_cast<Eigen::Index>(h.obs_dim()), static_cast<Eigen::Index>(n)));
  }
}

}  // namespace

// -- Ensemble ---------------------------------------------------------------

Ensemble::Ensemble(const GridSpec& spec, Matrix members) : spec_(spec), x_(std::move(members)) {
  if (static_cast<std::size_t>(x_.rows()) != spec_.size()) {
    throw DimensionError("ensemble members have " + std::to_string(x_.rows()) + " entries, grid has " +
                         std::to_string(spec_.size()) + " cells");
  }
  if (x_.cols() < 1) throw DimensionError("ensemble needs at least one member");
}

Ensemble Ensemble::from_members(const std::vector<StateVector>& members) {
  if (members.empty()) throw DimensionError("ensemble needs at least one member");
  const GridSpec& spec = members.front().spec;
  Matrix x(static_cast<Eigen::Index>(spec.size()), static_cast<Eigen::Index>(members.size()));
  for (std::size_t j = 0; j < members.size(); ++j) {
    if (!members[j].spec.same_lattice(spec) || members[j].data.size() != spec.size()) {
      throw DimensionError("ensemble member " + std::to_string(j) + " does not match member 0");
    }
    x.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Vector>(members[j].data.data(), x.rows());
  }
  return Ensemble(spec, std::move(x));
}

StateVector Ensemble::member(std::size_t j) const {
  const auto col = x_.col(static_cast<Eigen::Index>(j));
  return StateVector{spec_, std::vector<double>(col.begin(), col.end())};
}

Vector Ensemble::mean() const { return x_.rowwise().mean(); }

Matrix Ensemble::deviations() const { return x_.colwise() - mean(); }

Vector Ensemble::stddev() const {
  if (x_.cols() < 2) return Vector::Zero(x_.rows());
  return (deviations().rowwise().squaredNorm() / static_cast<double>(x_.cols() - 1)).cwiseSqrt();
}

// -- ObsOperator ------------------------------------------------------------

ObsOperator::ObsOperator(std::size_t p, bool identity, std::vector<std::size_t> indices)
    : p_(p), identity_(identity), indices_(std::move(indices)) {}

ObsOperator ObsOperator::identity(std::size_t p) { return ObsOperator(p, true, {}); }

ObsOperator ObsOperator::subset(std::size_t p, std::vector<std::size_t> indices) {
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= p) {
      throw DimensionError("observed index " + std::to_string(indices[k]) + " is outside [0, " +
                           std::to_string(p) + ")");
    }
    if (k > 0 && indices[k] <= indices[k - 1]) {
      throw ConfigError("observed indices must be strictly increasing");
    }
  }
  return ObsOperator(p, false, std::move(indices));
}

Vector ObsOperator::apply(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != p_) throw DimensionError("H applied to a vector of wrong length");
  if (identity_) return x;
  Vector out(static_cast<Eigen::Index>(indices_.size()));
  for (std::size_t k = 0; k < indices_.size(); ++k) out(static_cast<Eigen::Index>(k)) = x(static_cast<Eigen::Index>(indices_[k]));
  return out;
}

Matrix ObsOperator::apply(const Matrix& x) const {
  if (static_cast<std::size_t>(x.rows()) != p_) throw DimensionError("H applied to a matrix with wrong row count");
  if (identity_) return x;
  return x(indices_, Eigen::all);
}

Matrix ObsOperator::adjoint(const Matrix& z) const {
  if (static_cast<std::size_t>(z.rows()) != obs_dim()) throw DimensionError("H^T applied to wrong row count");
  if (identity_) return z;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(p_), z.cols());
  out(indices_, Eigen::all) = z;
  return out;
}

Matrix ObsOperator::restrict(const Matrix& a) const {
  if (static_cast<std::size_t>(a.rows()) != p_ || static_cast<std::size_t>(a.cols()) != p_) {
    throw DimensionError("H A H^T needs a p x p matrix");
  }
  if (identity_) return a;
  return a(indices_, indices_);
}

Matrix ObsOperator::dense() const {
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(obs_dim()), static_cast<Eigen::Index>(p_));
  for (std::size_t k = 0; k < obs_dim(); ++k) h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(index(k))) = 1.0;
  return h;
}

Vector poisson_obs_variance(const Vector& y) { return y.cwiseMax(1.0); }

// -- Stationary covariance --------------------------------------------------

namespace {

double cell_distance(const GridSpec& spec, std::size_t i, std::size_t j) {
  const double dr = static_cast<double>(spec.row_of(i)) - static_cast<double>(spec.row_of(j));
  const double dc = static_cast<double>(spec.col_of(i)) - static_cast<double>(spec.col_of(j));
  return spec.cellsize * std::sqrt(dr * dr + dc * dc);
}

}  // namespace

double StationaryCovariance::formula(std::size_t i, std::size_t j) const {
  return sigma2_ * std::exp(-cell_distance(spec_, i, j) / corr_length_);
}

double StationaryCovariance::operator()(std::size_t i, std::size_t j) const {
  if (dense_) return (*dense_)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return sparse_->coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

StationaryCovariance build_stationary_covariance(const GridSpec& spec, double sigma2, double corr_length,
                                                 double cutoff, std::size_t dense_cap) {
  spec.validate();
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ConfigError("covariance sigma2 must be positive");
  if (!(corr_length > 0.0) || !std::isfinite(corr_length)) {
    throw ConfigError("covariance correlation length must be positive");
  }
  if (!(cutoff >= 0.0)) throw ConfigError("covariance cutoff must be >= 0");

  StationaryCovariance q;
  q.spec_ = spec;
  q.sigma2_ = sigma2;
  q.corr_length_ = corr_length;
  q.cutoff_ = cutoff;
  const std::size_t p = spec.size();
  const auto n = static_cast<Eigen::Index>(p);

  if (std::isinf(cutoff)) {
    if (p > dense_cap) {
      throw ConfigError("dense covariance over " + std::to_string(p) + " cells exceeds the dense cap of " +
                        std::to_string(dense_cap) + " cells; use a finite cutoff or a smaller grid");
    }
    Matrix a(n, n);
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t i = 0; i < p; ++i) {
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = q.formula(i, j);
      }
    }
    q.dense_ = std::move(a);
    return q;
  }

  const double reach_cells = std::floor(cutoff / spec.cellsize);
  const long reach = static_cast<long>(std::min(reach_cells, static_cast<double>(std::max(spec.nrows, spec.ncols))));
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t j = 0; j < p; ++j) {
    const long rj = static_cast<long>(spec.row_of(j));
    const long cj = static_cast<long>(spec.col_of(j));
    for (long dr = -reach; dr <= reach; ++dr) {
      const long ri = rj + dr;
      if (ri < 0 || ri >= static_cast<long>(spec.nrows)) continue;
      for (long dc = -reach; dc <= reach; ++dc) {
        const long ci = cj + dc;
        if (ci < 0 || ci >= static_cast<long>(spec.ncols)) continue;
        const std::size_t i = spec.index(static_cast<std::size_t>(ri), static_cast<std::size_t>(ci));
        if (cell_distance(spec, i, j) > cutoff) continue;
        triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), q.formula(i, j));
      }
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  q.sparse_ = std::move(a);
  return q;
}

Matrix StationaryCovariance::apply_adjoint(const ObsOperator& h, const Matrix& z) const {
  if (h.state_dim() != dim()) throw DimensionError("observation operator and covariance grids differ");
  if (dense_) {
    if (h.is_identity()) return *dense_ * z;
    return (*dense_)(Eigen::all, h.indices()) * z;
  }
  return *sparse_ * h.adjoint(z);
}

Matrix StationaryCovariance::restrict_dense(const ObsOperator& h) const {
  if (h.state_dim() != dim()) throw DimensionError("observation operator and covariance grids differ");
  if (dense_) return h.restrict(*dense_);
  if (h.is_identity()) return Matrix(*sparse_);
  return Matrix(restrict_sparse(h));
}

SparseMatrix StationaryCovariance::restrict_sparse(const ObsOperator& h) const {
  if (h.state_dim() != dim()) throw DimensionError("observation operator and covariance grids differ");
  if (!sparse_) return h.restrict(*dense_).sparseView(0.0, 0.0);
  if (h.is_identity()) return *sparse_;
  std::vector<long> obs_of(dim(), -1);
  for (std::size_t k = 0; k < h.obs_dim(); ++k) obs_of[h.index(k)] = static_cast<long>(k);
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index col = 0; col < sparse_->outerSize(); ++col) {
    const long kc = obs_of[static_cast<std::size_t>(col)];
    if (kc < 0) continue;
    for (SparseMatrix::InnerIterator it(*sparse_, col); it; ++it) {
      const long kr = obs_of[static_cast<std::size_t>(it.row())];
      if (kr >= 0) triplets.emplace_back(kr, kc, it.value());
    }
  }
  const auto m = static_cast<Eigen::Index>(h.obs_dim());
  SparseMatrix out(m, m);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

// -- Sample covariance and the Kalman filter --------------------------------

Matrix sample_covariance(const Ensemble& ens) {
  if (ens.size() < 2) throw DimensionError("sample covariance needs at least two members");
  const Matrix a = ens.deviations();
  return (a * a.transpose()) / static_cast<double>(ens.size() - 1);
}

KalmanAnalysis kf_update(const StateVector& xf, const Matrix& qf, const ObsOperator& h, const Vector& y,
                         const Vector& r_diag) {
  const auto p = static_cast<Eigen::Index>(xf.data.size());
  if (qf.rows() != p || qf.cols() != p) throw DimensionError("Qf is " + dims(qf.rows(), qf.cols()));
  if (h.state_dim() != xf.data.size()) throw DimensionError("H does not match the state dimension");
  if (static_cast<std::size_t>(y.size()) != h.obs_dim()) throw DimensionError("y has the wrong length");
  check_r_diag(r_diag, h.obs_dim());

  const Vector x = Eigen::Map<const Vector>(xf.data.data(), p);
  const Matrix hq = h.apply(qf);  // H Qf, m x p
  Matrix innovation_cov = h.restrict(qf);
  innovation_cov.diagonal() += r_diag;
  const SpdFactor factor(innovation_cov);
  // K^T = S^-1 H Qf for symmetric Qf and S.
  const Matrix gain = factor.solve(hq).transpose();

  const Vector xa = x + gain * (y - h.apply(x));
  KalmanAnalysis out{StateVector{xf.spec, std::vector<double>(xa.begin(), xa.end())}, qf - gain * hq};
  return out;
}

KalmanForecast kf_forecast(const Vector& x, const Matrix& q, const Matrix& f, const Matrix& sigma) {
  const Eigen::Index p = x.size();
  if (q.rows() != p || q.cols() != p || f.rows() != p || f.cols() != p || sigma.rows() != p ||
      sigma.cols() != p) {
    throw DimensionError("kf_forecast needs p x p Q, F and Sigma for p = " + std::to_string(p));
  }
  return KalmanForecast{f * x, f * q * f.transpose() + sigma};
}

// -- Ensemble filters -------------------------------------------------------

Ensemble enkf_update(const Ensemble& ens, const ObsOperator& h, const Matrix& y_pert, const Vector& r_diag) {
  const std::size_t n = ens.size();
  if (n < 2) throw DimensionError("EnKF needs at least two members");
  if (h.state_dim() != ens.dim()) throw DimensionError("H does not match the ensemble dimension");
  check_perturbed_obs(y_pert, h, n);
  check_r_diag(r_diag, h.obs_dim());

  const double scale = 1.0 / static_cast<double>(n - 1);
  const Matrix a = ens.deviations();
  const Matrix ha = h.apply(a);
  Matrix innovation_cov = (ha * ha.transpose()) * scale;
  innovation_cov.diagonal() += r_diag;
  const SpdFactor factor(innovation_cov);

  const Matrix z = factor.solve(y_pert - h.apply(ens.matrix()));
  // Qf H^T Z = A (HA)^T Z / (N - 1), evaluated right to left.
  Matrix xa = ens.matrix() + a * ((ha.transpose() * z) * scale);
  return Ensemble(ens.spec(), std::move(xa));
}

EnosiGain::EnosiGain(const StationaryCovariance& q, const ObsOperator& h, const Vector& r_diag,
                     std::size_t dense_cap)
    : q_(&q),
      h_(h),
      r_diag_(r_diag),
      factor_([&] {
        if (h.state_dim() != q.dim()) throw DimensionError("H does not match the covariance grid");
        check_r_diag(r_diag, h.obs_dim());
        if (q.is_dense() || h.obs_dim() <= dense_cap) {
          Matrix s = q.restrict_dense(h);
          s.diagonal() += r_diag;
          return SpdFactor(s);
        }
        SparseMatrix s = q.restrict_sparse(h);
        for (Eigen::Index k = 0; k < s.rows(); ++k) s.coeffRef(k, k) += r_diag(k);
        return SpdFactor(s);
      }()) {}

bool EnosiGain::matches(const ObsOperator& h, const Vector& r_diag) const {
  return h.is_identity() == h_.is_identity() && h.state_dim() == h_.state_dim() &&
         h.indices() == h_.indices() && r_diag.size() == r_diag_.size() && r_diag == r_diag_;
}

Ensemble EnosiGain::apply(const Ensemble& ens, const Matrix& y_pert) const {
  if (ens.dim() != q_->dim() || !ens.spec().same_lattice(q_->spec())) {
    throw DimensionError("ensemble grid differs from the covariance grid");
  }
  check_perturbed_obs(y_pert, h_, ens.size());
  const Matrix z = factor_.solve(y_pert - h_.apply(ens.matrix()));
  Matrix xa = ens.matrix() + q_->apply_adjoint(h_, z);
  return Ensemble(ens.spec(), std::move(xa));
}

Matrix EnosiGain::gain_matrix() const {
  const auto m = static_cast<Eigen::Index>(h_.obs_dim());
  return q_->apply_adjoint(h_, factor_.solve(Matrix::Identity(m, m)));
}

Ensemble enosi_update(const Ensemble& ens, const ObsOperator& h, const Matrix& y_pert, const Vector& r_diag,
                      const StationaryCovariance& q) {
  return EnosiGain(q, h, r_diag).apply(ens, y_pert);
}

Matrix perturb_observations_poisson(const Vector& y, std::size_t n_members, const RngStream& rng) {
  Matrix out(y.size(), static_cast<Eigen::Index>(n_members));
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    if (!(y(k) >= 0.0) || !std::isfinite(y(k))) {
      throw InvalidArgument("observation " + std::to_string(k) + " is negative or not finite");
    }
    for (std::size_t j = 0; j < n_members; ++j) {
      CounterEngine eng = rng.substream(static_cast<std::uint64_t>(k), j, StreamTag::kPerturbation);
      out(k, static_cast<Eigen::Index>(j)) = static_cast<double>(poisson_sample(y(k), eng));
    }
  }
  return out;
}

CensorResult censor_nonnegative(const Ensemble& ens) {
  Matrix x = ens.matrix();
  std::size_t count = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (x(i, j) < 0.0) {
        x(i, j) = 0.0;
        ++count;
      }
    }
  }
  return CensorResult{Ensemble(ens.spec(), std::move(x)), count};
}

}  // namespace epitrack
