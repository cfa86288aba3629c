#pragma once

#include <memory>

#include <Eigen/SparseCore>

#include "bqce/types.hpp"

namespace bqce {

/// Sparse Cholesky factorization of a symmetric positive definite matrix.
/// Backed by CHOLMOD when available, Eigen's simplicial LLT otherwise.
class SpdFactorization {
 public:
  SpdFactorization();
  ~SpdFactorization();
  SpdFactorization(SpdFactorization&&) noexcept;
  SpdFactorization& operator=(SpdFactorization&&) noexcept;

  /// Returns false when the matrix is not numerically positive definite.
  bool factorize(const Eigen::SparseMatrix<double>& A);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  bool ready() const { return ready_; }

  static const char* backend();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  bool ready_ = false;
};

}  // namespace bqce
