#include "bqce/linear.hpp"

#ifdef BQCE_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#else
#include <Eigen/SparseCholesky>
#endif

namespace bqce {

struct SpdFactorization::Impl {
#ifdef BQCE_HAVE_CHOLMOD
  Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>, Eigen::Lower> llt;
#else
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower> llt;
#endif
  bool analyzed = false;
  Eigen::Index nnz = -1;
};

SpdFactorization::SpdFactorization() : impl_(std::make_unique<Impl>()) {}
SpdFactorization::~SpdFactorization() = default;
SpdFactorization::SpdFactorization(SpdFactorization&&) noexcept = default;
SpdFactorization& SpdFactorization::operator=(SpdFactorization&&) noexcept = default;

bool SpdFactorization::factorize(const Eigen::SparseMatrix<double>& A) {
  // the symbolic analysis is reused while the sparsity pattern is unchanged
  if (!impl_->analyzed || impl_->nnz != A.nonZeros()) {
    impl_->llt.analyzePattern(A);
    impl_->analyzed = true;
    impl_->nnz = A.nonZeros();
  }
  impl_->llt.factorize(A);
  ready_ = impl_->llt.info() == Eigen::Success;
  return ready_;
}

Eigen::VectorXd SpdFactorization::solve(const Eigen::VectorXd& b) const {
  if (!ready_) throw SolverError("SpdFactorization::solve called without a valid factorization");
  return impl_->llt.solve(b);
}

const char* SpdFactorization::backend() {
#ifdef BQCE_HAVE_CHOLMOD
  return "cholmod";
#else
  return "eigen-simplicial";
#endif
}

}  // namespace bqce
