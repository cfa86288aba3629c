#include "bqce/blending.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SparseCholesky>

namespace bqce {

namespace {

// Lattice steps along a1, a2, a3 = (1,0), (1/2, sqrt3/2), (-1/2, sqrt3/2).
constexpr std::array<LatticeIndex, 3> kDirections{{{1, 0}, {0, 1}, {-1, 1}}};

}  // namespace

Regions classify_regions(const LatticeDomain& domain, int K0, int K1) {
  if (K0 < 0 || K1 < 0) throw Error("classify_regions: K0 and K1 must be nonnegative");
  Regions r;
  r.K0 = K0;
  r.K1 = K1;
  r.distance = hopping_distance(domain, domain.defect_core());

  int radius = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (domain.role(static_cast<int>(i)) == SiteRole::boundary) radius = std::min(radius, r.distance[i]);
  }
  if (K0 + K1 >= radius) {
    throw Error("classify_regions: K0 + K1 = " + std::to_string(K0 + K1) + " reaches the boundary layer at distance " +
                std::to_string(radius));
  }

  r.label.resize(domain.size());
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const int d = r.distance[i];
    r.label[i] = d <= K0 ? Region::atomistic : (d <= K0 + K1 ? Region::blend : Region::continuum);
  }
  return r;
}

BlendKind parse_blend(std::string_view name) {
  if (name == "qce") return BlendKind::qce;
  if (name == "linear" || name == "bqce-linear") return BlendKind::linear;
  if (name == "smooth" || name == "bqce-smooth") return BlendKind::smooth;
  throw Error("unknown blending kind '" + std::string(name) + "'");
}

std::string_view to_string(BlendKind kind) {
  switch (kind) {
    case BlendKind::qce: return "qce";
    case BlendKind::linear: return "bqce-linear";
    case BlendKind::smooth: return "bqce-smooth";
  }
  return "?";
}

BlendField beta_qce(const Regions& regions) {
  BlendField f;
  f.kind = BlendKind::qce;
  f.K0 = regions.K0;
  f.K1 = 0;
  f.beta.resize(regions.label.size());
  for (std::size_t i = 0; i < f.beta.size(); ++i) f.beta[i] = regions.distance[i] <= regions.K0 ? 0.0 : 1.0;
  return f;
}

BlendField beta_linear(const Regions& regions) {
  if (regions.K1 < 1) throw Error("beta_linear: requires K1 >= 1");
  BlendField f;
  f.kind = BlendKind::linear;
  f.K0 = regions.K0;
  f.K1 = regions.K1;
  f.beta.resize(regions.label.size());
  for (std::size_t i = 0; i < f.beta.size(); ++i) {
    // distance from the atomistic region
    const int d = std::max(0, regions.distance[i] - regions.K0);
    f.beta[i] = std::min(1.0, static_cast<double>(d) / regions.K1);
  }
  return f;
}

BlendField beta_smooth(const LatticeDomain& domain, const Regions& regions) {
  if (regions.K1 < 2) throw Error("beta_smooth: the blend region needs at least two layers (K1 >= 2)");

  BlendField f;
  f.kind = BlendKind::smooth;
  f.K0 = regions.K0;
  f.K1 = regions.K1;
  f.beta.assign(domain.size(), 1.0);

  std::vector<int> unknown(domain.size(), -1);
  int n_unknown = 0;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (regions.label[i] == Region::atomistic) f.beta[i] = 0.0;
    if (regions.label[i] == Region::blend) unknown[i] = n_unknown++;
  }
  if (n_unknown == 0) throw Error("beta_smooth: empty blend region");

  // Rows of the second-difference operator touching at least one unknown:
  // sum_j L_rj x_j + b_r, assembled straight into normal equations.
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_unknown);
  auto value_or_one = [&](LatticeIndex n, int* slot) {
    const int id = domain.find(n);
    *slot = id >= 0 ? unknown[id] : -1;
    return id >= 0 ? f.beta[id] : 1.0;
  };
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const LatticeIndex c = domain.index(static_cast<int>(i));
    for (auto a : kDirections) {
      std::array<int, 3> slot;
      std::array<double, 3> fixed;
      fixed[0] = value_or_one({c.n1 + a.n1, c.n2 + a.n2}, &slot[0]);
      fixed[1] = value_or_one(c, &slot[1]);
      fixed[2] = value_or_one({c.n1 - a.n1, c.n2 - a.n2}, &slot[2]);
      if (slot[0] < 0 && slot[1] < 0 && slot[2] < 0) continue;
      const std::array<double, 3> w{1.0, -2.0, 1.0};
      double b = 0.0;
      for (int k = 0; k < 3; ++k)
        if (slot[k] < 0) b += w[k] * fixed[k];
      for (int k = 0; k < 3; ++k) {
        if (slot[k] < 0) continue;
        rhs[slot[k]] -= w[k] * b;
        for (int l = 0; l < 3; ++l)
          if (slot[l] >= 0) trip.emplace_back(slot[k], slot[l], w[k] * w[l]);
      }
    }
  }
  Eigen::SparseMatrix<double> A(n_unknown, n_unknown);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw Error("beta_smooth: singular constraint system");
  const Eigen::VectorXd x = ldlt.solve(rhs);
  const double residual = (A * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
  if (!(residual < 1e-10)) {
    throw Error("beta_smooth: linear solve residual " + std::to_string(residual) + " above 1e-10");
  }

  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (unknown[i] < 0) continue;
    const double v = x[unknown[i]];
    f.overshoot = std::max({f.overshoot, -v, v - 1.0});
    f.beta[i] = std::clamp(v, 0.0, 1.0);
  }
  return f;
}

BlendField make_blend(const LatticeDomain& domain, const Regions& regions, BlendKind kind) {
  switch (kind) {
    case BlendKind::qce: return beta_qce(regions);
    case BlendKind::linear: return beta_linear(regions);
    case BlendKind::smooth: return beta_smooth(domain, regions);
  }
  throw Error("make_blend: bad kind");
}

double blend_roughness(const LatticeDomain& domain, const std::vector<double>& beta) {
  auto at = [&](LatticeIndex n) {
    const int id = domain.find(n);
    return id >= 0 ? beta[id] : 1.0;
  };
  double phi = 0.0;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const LatticeIndex c = domain.index(static_cast<int>(i));
    for (auto a : kDirections) {
      const double d2 = at({c.n1 + a.n1, c.n2 + a.n2}) - 2.0 * beta[i] + at({c.n1 - a.n1, c.n2 - a.n2});
      phi += d2 * d2;
    }
  }
  return phi;
}

ParameterRule parse_rule(std::string_view name) {
  if (name == "table") return ParameterRule::table;
  if (name == "mu") return ParameterRule::mu;
  throw Error("unknown parameter rule '" + std::string(name) + "'");
}

ParameterPlan select_parameters(double alpha, double p, int K0, int N, ParameterRule rule) {
  if (!(p == 1.0 || p == 2.0 || std::isinf(p))) throw Error("select_parameters: p must be 1, 2 or infinity");
  if (!(alpha > 0.0)) throw Error("select_parameters: alpha must be positive");
  if (K0 < 1 || N <= K0) throw Error("select_parameters: need 1 <= K0 < N");

  ParameterPlan plan;
  plan.alpha = alpha;
  plan.p = p;
  plan.K0 = K0;
  plan.gamma = std::isinf(p) ? alpha : alpha * p / (p + 2.0);
  plan.mesh_exponent = plan.gamma;

  // ceil that ignores round-off just above an integer
  auto round_up = [](double x) { return static_cast<int>(std::ceil(x - 1e-9)); };
  const double g = plan.gamma;
  if (std::abs(g - 1.0) < 1e-12) {
    plan.K1 = round_up(K0 * std::sqrt(std::log(static_cast<double>(N) / K0)));
  } else if (g > 1.0) {
    plan.K1 = K0;
    const bool mu_defined = alpha > 2.0 && p > 1.0;
    if (rule == ParameterRule::mu && mu_defined) {
      plan.mu = std::isinf(p) ? alpha / 2.0 : (alpha - 2.0 / p) / (2.0 - 2.0 / p);
      plan.K1 = round_up(std::pow(static_cast<double>(K0), plan.mu));
    }
  } else {
    plan.K1 = round_up(std::pow(static_cast<double>(K0), g) * std::pow(static_cast<double>(N), 1.0 - g));
  }
  return plan;
}

}  // namespace bqce
