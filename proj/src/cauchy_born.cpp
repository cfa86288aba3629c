#include "bqce/cauchy_born.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/LU>

namespace bqce {
namespace {

struct ReferenceShell {
  std::vector<Vec2> r;
  std::vector<std::uint8_t> mask;
};

const ReferenceShell& reference_shell(const EamModel& model) {
  // Models are tiny; rebuild when cutoffs differ from the cached ones.
  thread_local EamModel cached_for{};
  thread_local ReferenceShell shell;
  thread_local bool ready = false;
  if (!ready || cached_for.density_cutoff != model.density_cutoff || cached_for.pair_cutoff != model.pair_cutoff) {
    shell = {};
    const double outer = std::max(model.density_cutoff, model.pair_cutoff);
    for (auto off : NeighborTable::shell_offsets(outer)) {
      const Vec2 r = lattice_point(off);
      const double len = r.norm();
      shell.r.push_back(r);
      shell.mask.push_back(static_cast<std::uint8_t>((len < model.pair_cutoff ? SiteStencil::kPair : 0) |
                                                     (len < model.density_cutoff ? SiteStencil::kDensity : 0)));
    }
    cached_for = model;
    ready = true;
  }
  return shell;
}

SiteStencil strained_stencil(const EamModel& model, const Mat2& F) {
  if (!(F.determinant() > 0.0)) {
    std::ostringstream msg;
    msg << "degenerate deformation gradient, det F = " << F.determinant();
    throw EvaluationError(msg.str());
  }
  const ReferenceShell& shell = reference_shell(model);
  SiteStencil st;
  for (std::size_t k = 0; k < shell.r.size(); ++k) {
    st.d[k] = F * shell.r[k];
    st.mask[k] = shell.mask[k];
  }
  st.count = shell.r.size();
  return st;
}

}  // namespace

double cb_energy(const EamModel& model, const Mat2& F) {
  return eam_site_energy(model, strained_stencil(model, F)) / kCellArea;
}

StrainState cb_density(const EamModel& model, const Mat2& F, bool want_hessian) {
  const SiteStencil st = strained_stencil(model, F);
  const ReferenceShell& shell = reference_shell(model);
  SiteDerivatives der;
  StrainState s;
  s.F = F;
  s.W = eam_site_energy(model, st, &der, want_hessian) / kCellArea;

  // d_k = F r_k, so dW/dF_ij = sum_k g_k,i r_k,j.
  for (std::size_t k = 0; k < st.count; ++k) s.dW += der.grad[k] * shell.r[k].transpose();
  s.dW /= kCellArea;
  if (!want_hessian) return s;

  for (std::size_t k = 0; k < st.count; ++k) {
    for (std::size_t l = 0; l < st.count; ++l) {
      const Mat2 block = der.hess.block<2, 2>(2 * k, 2 * l);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n) s.d2W(2 * i + j, 2 * m + n) += block(i, m) * shell.r[k](j) * shell.r[l](n);
    }
  }
  s.d2W /= kCellArea;
  return s;
}

Mat2 find_ground_state(const EamModel& model) {
  // g'(t) = dW(tI) : I, g''(t) = I : d2W(tI) : I
  auto slope = [&](double t, double* curvature) {
    const StrainState s = cb_density(model, t * Mat2::Identity(), curvature != nullptr);
    if (curvature) {
      *curvature = s.d2W(0, 0) + s.d2W(0, 3) + s.d2W(3, 0) + s.d2W(3, 3);
    }
    return s.dW.trace();
  };

  double lo = 0.8;
  double hi = 1.2;
  double g_lo = slope(lo, nullptr);
  double g_hi = slope(hi, nullptr);
  if (!(g_lo < 0.0 && g_hi > 0.0)) {
    throw Error("find_ground_state: W(tI) has no interior minimum in [0.8, 1.2]");
  }

  // Safeguarded Newton: fall back to bisection whenever the step leaves the
  // bracket.
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double curv = 0.0;
    const double g = slope(t, &curv);
    if (g < 0.0) lo = t; else hi = t;
    if (std::abs(g) < 1e-14) break;
    double next = curv > 0.0 ? t - g / curv : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) < 1e-16) {
      t = next;
      break;
    }
    t = next;
  }
  return t * Mat2::Identity();
}

}  // namespace bqce
