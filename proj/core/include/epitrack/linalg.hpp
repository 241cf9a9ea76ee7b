/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace epitrack {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Index of the first leading minor of `a` that is not positive, found by an
/// unblocked Cholesky sweep; nullopt-like npos when `a` is positive definite.
std::size_t first_nonpositive_minor(const Matrix& a);

/// Cholesky factor of a symmetric positive-definite matrix. Construction
/// throws FactorizationError; no explicit inverse is ever formed.
class SpdFactor {
 public:
  explicit SpdFactor(const Matrix& a);
  explicit SpdFactor(const SparseMatrix& a);
  ~SpdFactor();
  SpdFactor(SpdFactor&&) noexcept;
  SpdFactor& operator=(SpdFactor&&) noexcept;

  std::size_t size() const { return n_; }
  bool sparse() const { return sparse_ != nullptr; }

  /// Solves A Z = B.
  Matrix solve(const Matrix& b) const;

 private:
  std::size_t n_ = 0;
  std::unique_ptr<Eigen::LLT<Matrix>> dense_;
  std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> sparse_;
};

}  // namespace epitrack
