#include <omp.h>

#include "kernels/terms.hpp"

namespace bqce::kernels::omp {

using detail::ElementLocal;
using detail::SiteLocal;

namespace {

// Terms evaluated per batch in reproducible mode before the ordered scatter.
constexpr std::size_t kChunk = 512;

// Exceptions may not cross an OpenMP region; the first one is rethrown after.
class ErrorSlot {
 public:
  template <class Fn>
  void run(Fn&& fn) {
    try {
      fn();
    } catch (...) {
#pragma omp critical(bqce_error_slot)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

double fast_energy(const AssemblyPlan& plan, const Eigen::VectorXd& u) {
  const auto ns = static_cast<std::ptrdiff_t>(plan.sites.size());
  const auto ne = static_cast<std::ptrdiff_t>(plan.elements.size());
  double E = 0.0;
  ErrorSlot err;
#pragma omp parallel reduction(+ : E)
  {
    SiteLocal s;
    ElementLocal e;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < ns; ++i) {
      err.run([&] {
        detail::eval_site(plan, plan.sites[i], u, s, false, false);
        E += s.energy;
      });
    }
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < ne; ++i) {
      err.run([&] {
        detail::eval_element(plan, plan.elements[i], u, e, false, false);
        E += e.energy;
      });
    }
  }
  err.rethrow();
  return E;
}

double fast_energy_gradient(const AssemblyPlan& plan, const Eigen::VectorXd& u, Eigen::VectorXd& grad) {
  const auto ns = static_cast<std::ptrdiff_t>(plan.sites.size());
  const auto ne = static_cast<std::ptrdiff_t>(plan.elements.size());
  const auto n = static_cast<Eigen::Index>(plan.unknowns);
  grad.setZero(n);
  double E = 0.0;
  ErrorSlot err;
#pragma omp parallel reduction(+ : E)
  {
    Eigen::VectorXd local = Eigen::VectorXd::Zero(n);
    SiteLocal s;
    ElementLocal e;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < ns; ++i) {
      err.run([&] {
        detail::eval_site(plan, plan.sites[i], u, s, true, false);
        E += s.energy;
        detail::scatter_site_gradient(plan, s, local);
      });
    }
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < ne; ++i) {
      err.run([&] {
        detail::eval_element(plan, plan.elements[i], u, e, true, false);
        E += e.energy;
        detail::scatter_element_gradient(plan, e, local);
      });
    }
#pragma omp critical(bqce_gradient_merge)
    grad += local;
  }
  err.rethrow();
  return E;
}

// Evaluates terms [begin, end) of `terms` in parallel into `locals`.
template <class Term, class Local, class Eval>
void eval_batch(const std::vector<Term>& terms, std::size_t begin, std::size_t end, std::vector<Local>& locals,
                Eval&& eval) {
  ErrorSlot err;
  const auto count = static_cast<std::ptrdiff_t>(end - begin);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) err.run([&] { eval(terms[begin + i], locals[i]); });
  err.rethrow();
}

double ordered_energy_gradient(const AssemblyPlan& plan, const Eigen::VectorXd& u, Eigen::VectorXd* grad) {
  const bool want_grad = grad != nullptr;
  if (want_grad) grad->setZero(static_cast<Eigen::Index>(plan.unknowns));
  double E = 0.0;
  std::vector<SiteLocal> sl(kChunk);
  for (std::size_t b = 0; b < plan.sites.size(); b += kChunk) {
    const std::size_t end = std::min(plan.sites.size(), b + kChunk);
    eval_batch(plan.sites, b, end, sl, [&](const auto& t, SiteLocal& out) {
      detail::eval_site(plan, t, u, out, want_grad, false);
    });
    for (std::size_t i = 0; i < end - b; ++i) {
      E += sl[i].energy;
      if (want_grad) detail::scatter_site_gradient(plan, sl[i], *grad);
    }
  }
  std::vector<ElementLocal> el(kChunk);
  for (std::size_t b = 0; b < plan.elements.size(); b += kChunk) {
    const std::size_t end = std::min(plan.elements.size(), b + kChunk);
    eval_batch(plan.elements, b, end, el, [&](const auto& t, ElementLocal& out) {
      detail::eval_element(plan, t, u, out, want_grad, false);
    });
    for (std::size_t i = 0; i < end - b; ++i) {
      E += el[i].energy;
      if (want_grad) detail::scatter_element_gradient(plan, el[i], *grad);
    }
  }
  return E;
}

}  // namespace

double energy(const AssemblyPlan& plan, const Eigen::VectorXd& u, Reduction mode) {
  if (mode == Reduction::reproducible) return ordered_energy_gradient(plan, u, nullptr);
  return fast_energy(plan, u);
}

double energy_gradient(const AssemblyPlan& plan, const Eigen::VectorXd& u, Eigen::VectorXd& grad, Reduction mode) {
  if (mode == Reduction::reproducible) return ordered_energy_gradient(plan, u, &grad);
  return fast_energy_gradient(plan, u, grad);
}

SparseMatrix hessian(const AssemblyPlan& plan, const SparseMatrix& pattern, const Eigen::VectorXd& u) {
  // Local Hessians are evaluated in parallel; the scatter into the shared
  // pattern stays serial and in term order, so the result is deterministic.
  SparseMatrix H = pattern;
  H.coeffs().setZero();
  std::vector<SiteLocal> sl(kChunk);
  for (std::size_t b = 0; b < plan.sites.size(); b += kChunk) {
    const std::size_t end = std::min(plan.sites.size(), b + kChunk);
    eval_batch(plan.sites, b, end, sl, [&](const auto& t, SiteLocal& out) {
      detail::eval_site(plan, t, u, out, true, true);
    });
    for (std::size_t i = 0; i < end - b; ++i) detail::scatter_site_hessian(plan, plan.sites[b + i], sl[i], H);
  }
  std::vector<ElementLocal> el(kChunk);
  for (std::size_t b = 0; b < plan.elements.size(); b += kChunk) {
    const std::size_t end = std::min(plan.elements.size(), b + kChunk);
    eval_batch(plan.elements, b, end, el, [&](const auto& t, ElementLocal& out) {
      detail::eval_element(plan, t, u, out, true, true);
    });
    for (std::size_t i = 0; i < end - b; ++i) detail::scatter_element_hessian(plan, el[i], H);
  }
  return H;
}

}  // namespace bqce::kernels::omp
