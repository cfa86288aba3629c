#include "kernels/terms.hpp"

namespace bqce::kernels::serial {

using detail::ElementLocal;
using detail::SiteLocal;

double energy(const AssemblyPlan& plan, const Eigen::VectorXd& u) {
  double E = 0.0;
  SiteLocal s;
  for (const auto& t : plan.sites) {
    detail::eval_site(plan, t, u, s, false, false);
    E += s.energy;
  }
  ElementLocal e;
  for (const auto& t : plan.elements) {
    detail::eval_element(plan, t, u, e, false, false);
    E += e.energy;
  }
  return E;
}

double energy_gradient(const AssemblyPlan& plan, const Eigen::VectorXd& u, Eigen::VectorXd& grad) {
  grad.setZero(static_cast<Eigen::Index>(plan.unknowns));
  double E = 0.0;
  SiteLocal s;
  for (const auto& t : plan.sites) {
    detail::eval_site(plan, t, u, s, true, false);
    E += s.energy;
    detail::scatter_site_gradient(plan, s, grad);
  }
  ElementLocal e;
  for (const auto& t : plan.elements) {
    detail::eval_element(plan, t, u, e, true, false);
    E += e.energy;
    detail::scatter_element_gradient(plan, e, grad);
  }
  return E;
}

SparseMatrix hessian(const AssemblyPlan& plan, const SparseMatrix& pattern, const Eigen::VectorXd& u) {
  SparseMatrix H = pattern;
  H.coeffs().setZero();
  SiteLocal s;
  for (const auto& t : plan.sites) {
    detail::eval_site(plan, t, u, s, true, true);
    detail::scatter_site_hessian(plan, t, s, H);
  }
  ElementLocal e;
  for (const auto& t : plan.elements) {
    detail::eval_element(plan, t, u, e, true, true);
    detail::scatter_element_hessian(plan, e, H);
  }
  return H;
}

}  // namespace bqce::kernels::serial
