#pragma once

// Per-term evaluation shared by the serial and OpenMP drivers. Both drivers
// call exactly these functions, so their per-term arithmetic is identical and
// only the order of accumulation differs.

#include <string>

#include <Eigen/LU>

#include "bqce/assembly.hpp"

namespace bqce::kernels::detail {

inline constexpr std::size_t kMaxStencil = kMaxNeighbors + 1;

struct SiteLocal {
  double energy = 0.0;
  std::size_t n = 0;                         // stencil size incl. centre
  std::array<int, kMaxStencil> points{};
  std::array<Vec2, kMaxStencil> grad;        // weighted, centre first
  SiteDerivatives der;                       // unweighted offset Hessian
  double weight = 1.0;
};

inline void eval_site(const AssemblyPlan& plan, const AssemblyPlan::SiteTerm& term, const Eigen::VectorXd& u,
                      SiteLocal& out, bool want_grad, bool want_hess) {
  SiteStencil st;
  const int centre = plan.stencil[term.first];
  const Vec2 yc = plan.position(centre, u);
  out.n = term.count + 1;
  out.points[0] = centre;
  out.weight = term.weight;
  for (std::uint32_t k = 0; k < term.count; ++k) {
    const std::size_t slot = term.first + 1 + k;
    const int p = plan.stencil[slot];
    out.points[k + 1] = p;
    st.d[k] = plan.position(p, u) - yc;
    st.mask[k] = plan.stencil_mask[slot];
  }
  st.count = term.count;
  try {
    out.energy = term.weight * eam_site_energy(plan.model, st, want_grad ? &out.der : nullptr, want_hess);
  } catch (const CoincidentAtoms& e) {
    throw EvaluationError("coincident positions at site " + std::to_string(term.site) + " and stencil point " +
                          std::to_string(out.points[e.local_index + 1]));
  }
  if (!want_grad) return;
  Vec2 centre_grad = Vec2::Zero();
  for (std::size_t k = 0; k < term.count; ++k) {
    out.grad[k + 1] = term.weight * out.der.grad[k];
    centre_grad -= out.grad[k + 1];
  }
  out.grad[0] = centre_grad;
}

struct ElementLocal {
  double energy = 0.0;
  std::array<int, 3> points{};
  std::array<Vec2, 3> grad;
  Eigen::Matrix<double, 6, 6> hess;
};

inline void eval_element(const AssemblyPlan& plan, const AssemblyPlan::ElementTerm& term, const Eigen::VectorXd& u,
                         ElementLocal& out, bool want_grad, bool want_hess) {
  Mat2 Fe = Mat2::Zero();
  for (int a = 0; a < 3; ++a) Fe += plan.position(term.points[a], u) * term.grad[a].transpose();
  out.points = term.points;
  if (!(Fe.determinant() > 0.0)) {
    throw EvaluationError("element " + std::to_string(term.element) + " is inverted (det grad y = " +
                          std::to_string(Fe.determinant()) + ")");
  }
  if (!want_grad) {
    out.energy = term.volume * cb_energy(plan.model, Fe);
    return;
  }
  const StrainState s = cb_density(plan.model, Fe, want_hess);
  out.energy = term.volume * s.W;
  for (int a = 0; a < 3; ++a) out.grad[a] = term.volume * (s.dW * term.grad[a]);
  if (!want_hess) return;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
          double v = 0.0;
          for (int j = 0; j < 2; ++j)
            for (int l = 0; l < 2; ++l) v += s.d2W(2 * i + j, 2 * k + l) * term.grad[a][j] * term.grad[b][l];
          out.hess(2 * a + i, 2 * b + k) = term.volume * v;
        }
}

inline void scatter_site_gradient(const AssemblyPlan& plan, const SiteLocal& local, Eigen::VectorXd& g) {
  for (std::size_t k = 0; k < local.n; ++k) {
    const int d = plan.dof[local.points[k]];
    if (d < 0) continue;
    g[d] += local.grad[k].x();
    g[d + 1] += local.grad[k].y();
  }
}

inline void scatter_element_gradient(const AssemblyPlan& plan, const ElementLocal& local, Eigen::VectorXd& g) {
  for (int a = 0; a < 3; ++a) {
    const int d = plan.dof[local.points[a]];
    if (d < 0) continue;
    g[d] += local.grad[a].x();
    g[d + 1] += local.grad[a].y();
  }
}

inline void add_block(SparseMatrix& H, int row_dof, int col_dof, const Mat2& block) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) H.coeffRef(row_dof + i, col_dof + j) += block(i, j);
}

inline bool coupled(const AssemblyPlan& plan, std::uint32_t first, std::size_t k, std::size_t l) {
  // offset indices k, l >= 1 (0 is the centre)
  if (k == l) return true;
  const auto mk = plan.stencil_mask[first + k];
  const auto ml = plan.stencil_mask[first + l];
  return (mk & SiteStencil::kDensity) && (ml & SiteStencil::kDensity);
}

/// Adds the weighted Hessian of one site energy. Offset Hessian blocks
/// H_kl map to point blocks through y_k - y_centre.
inline void scatter_site_hessian(const AssemblyPlan& plan, const AssemblyPlan::SiteTerm& term,
                                 const SiteLocal& local, SparseMatrix& H) {
  const std::size_t m = term.count;
  const auto& Hd = local.der.hess;
  const double w = local.weight;
  std::array<Mat2, kMaxNeighbors> row_sum;  // sum_l H_kl
  Mat2 total = Mat2::Zero();
  for (std::size_t k = 0; k < m; ++k) {
    row_sum[k].setZero();
    for (std::size_t l = 0; l < m; ++l) row_sum[k] += Hd.block<2, 2>(2 * k, 2 * l);
    total += row_sum[k];
  }
  const int dc = plan.dof[local.points[0]];
  if (dc >= 0) add_block(H, dc, dc, w * total);
  for (std::size_t k = 0; k < m; ++k) {
    const int dk = plan.dof[local.points[k + 1]];
    if (dk < 0) continue;
    if (dc >= 0) {
      const Mat2 cross = -w * row_sum[k];  // d^2E / dy_k dy_c (H symmetric)
      add_block(H, dk, dc, cross);
      add_block(H, dc, dk, cross.transpose());
    }
    for (std::size_t l = 0; l < m; ++l) {
      if (!coupled(plan, term.first, k + 1, l + 1)) continue;
      const int dl = plan.dof[local.points[l + 1]];
      if (dl < 0) continue;
      add_block(H, dk, dl, w * Hd.block<2, 2>(2 * k, 2 * l));
    }
  }
}

inline void scatter_element_hessian(const AssemblyPlan& plan, const ElementLocal& local, SparseMatrix& H) {
  for (int a = 0; a < 3; ++a) {
    const int da = plan.dof[local.points[a]];
    if (da < 0) continue;
    for (int b = 0; b < 3; ++b) {
      const int db = plan.dof[local.points[b]];
      if (db < 0) continue;
      add_block(H, da, db, local.hess.block<2, 2>(2 * a, 2 * b));
    }
  }
}

}  // namespace bqce::kernels::detail
