/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "epitrack/linalg.hpp"

#include <cmath>

#include "epitrack/error.hpp"

namespace epitrack {

std::size_t first_nonpositive_minor(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) return static_cast<std::size_t>(j);
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return FactorizationError::npos;
}

SpdFactor::SpdFactor(const Matrix& a) : n_(static_cast<std::size_t>(a.rows())) {
  if (a.rows() != a.cols()) throw DimensionError("SPD factorization needs a square matrix");
  dense_ = std::make_unique<Eigen::LLT<Matrix>>(a);
  if (dense_->info() != Eigen::Success || !dense_->matrixLLT().allFinite()) {
    std::size_t minor = first_nonpositive_minor(a);
    // Both routes disagree only for pivots within rounding of zero.
    if (minor == FactorizationError::npos) minor = n_ - 1;
    throw FactorizationError(minor);
  }
}

SpdFactor::SpdFactor(const SparseMatrix& a) : n_(static_cast<std::size_t>(a.rows())) {
  if (a.rows() != a.cols()) throw DimensionError("SPD factorization needs a square matrix");
  sparse_ = std::make_unique<Eigen::SimplicialLLT<SparseMatrix>>(a);
  if (sparse_->info() != Eigen::Success) throw FactorizationError(FactorizationError::npos);
}

SpdFactor::~SpdFactor() = default;
SpdFactor::SpdFactor(SpdFactor&&) noexcept = default;
SpdFactor& SpdFactor::operator=(SpdFactor&&) noexcept = default;

Matrix SpdFactor::solve(const Matrix& b) const {
  if (static_cast<std::size_t>(b.rows()) != n_) throw DimensionError("right-hand side has the wrong row count");
  if (dense_) return dense_->solve(b);
  return sparse_->solve(b);
}

}  // namespace epitrack
