#include "bqce/eam.hpp"

#include <cmath>
#include <string>

namespace bqce {

EamModel EamModel::with(double a, double b, double c) {
  EamModel m;
  m.a = a;
  m.b = b;
  m.c = c;
  m.rho_bar_0 = 6.0 * std::exp(-b);
  return m;
}

Jet EamModel::phi(double r) const {
  const double e1 = std::exp(-a * (r - 1.0));
  const double e2 = e1 * e1;
  return {e2 - 2.0 * e1, -2.0 * a * e2 + 2.0 * a * e1, 4.0 * a * a * e2 - 2.0 * a * a * e1};
}

Jet EamModel::rho(double r) const {
  const double e = std::exp(-b * r);
  return {e, -b * e, b * b * e};
}

Jet EamModel::embed(double rho_bar) const {
  const double s = rho_bar - rho_bar_0;
  const double s2 = s * s;
  return {c * (s2 + s2 * s2), c * (2.0 * s + 4.0 * s2 * s), c * (2.0 + 12.0 * s2)};
}

double eam_site_energy(const EamModel& model, const SiteStencil& st, SiteDerivatives* deriv, bool want_hessian) {
  const std::size_t n = st.count;
  std::array<double, kMaxNeighbors> r;
  std::array<Vec2, kMaxNeighbors> u;
  std::array<Jet, kMaxNeighbors> ph;
  std::array<Jet, kMaxNeighbors> rh;

  double pair = 0.0;
  double rho_bar = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    r[k] = st.d[k].norm();
    if (!(r[k] > 0.0)) throw CoincidentAtoms(k);
    u[k] = st.d[k] / r[k];
    if (st.mask[k] & SiteStencil::kPair) {
      ph[k] = model.phi(r[k]);
      pair += 0.5 * ph[k].value;
    } else {
      ph[k] = {};
    }
    if (st.mask[k] & SiteStencil::kDensity) {
      rh[k] = model.rho(r[k]);
      rho_bar += rh[k].value;
    } else {
      rh[k] = {};
    }
  }
  const Jet G = model.embed(rho_bar);
  const double energy = pair + G.value;
  if (deriv == nullptr) return energy;

  // d|d|/dd = u, d^2|d|/dd^2 = (I - u u^T) / r
  for (std::size_t k = 0; k < n; ++k) {
    deriv->grad[k] = (0.5 * ph[k].d1 + G.d1 * rh[k].d1) * u[k];
  }
  if (!want_hessian) return energy;

  auto& H = deriv->hess;
  H.setZero(2 * n, 2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const double radial = 0.5 * ph[k].d2 + G.d1 * rh[k].d2;
    const double tangential = (0.5 * ph[k].d1 + G.d1 * rh[k].d1) / r[k];
    const Mat2 uu = u[k] * u[k].transpose();
    H.block<2, 2>(2 * k, 2 * k) = radial * uu + tangential * (Mat2::Identity() - uu);
  }
  if (G.d2 != 0.0) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!(st.mask[k] & SiteStencil::kDensity)) continue;
      const Vec2 gk = rh[k].d1 * u[k];
      for (std::size_t l = 0; l < n; ++l) {
        if (!(st.mask[l] & SiteStencil::kDensity)) continue;
        const Vec2 gl = rh[l].d1 * u[l];
        H.block<2, 2>(2 * k, 2 * l) += G.d2 * gk * gl.transpose();
      }
    }
  }
  return energy;
}

Deformation homogeneous_deformation(const LatticeDomain& domain, const Mat2& F) {
  Deformation y(domain.size());
  for (std::size_t i = 0; i < domain.size(); ++i) y[i] = F * domain.position(static_cast<int>(i));
  return y;
}

SiteStencil gather_stencil(const NeighborTable& nbrs, const Deformation& y, int site) {
  SiteStencil st;
  const Vec2 center = y[site];
  for (const Neighbor& nb : nbrs.of(site)) st.push(y[nb.site] - center, nb.pair, nb.density);
  return st;
}

double site_energy(const EamModel& model, const NeighborTable& nbrs, const Deformation& y, int site) {
  const SiteStencil st = gather_stencil(nbrs, y, site);
  try {
    return eam_site_energy(model, st);
  } catch (const CoincidentAtoms& e) {
    const int other = nbrs.of(site)[e.local_index].site;
    throw EvaluationError("coincident positions of sites " + std::to_string(site) + " and " + std::to_string(other));
  }
}

}  // namespace bqce
