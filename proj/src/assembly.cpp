#include "bqce/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

namespace bqce {

namespace {

void push_site_term(AssemblyPlan& plan, int site, double weight, int centre_point,
                    const std::vector<std::pair<int, std::uint8_t>>& neighbours) {
  AssemblyPlan::SiteTerm t;
  t.site = site;
  t.weight = weight;
  t.first = static_cast<std::uint32_t>(plan.stencil.size());
  t.count = static_cast<std::uint32_t>(neighbours.size());
  plan.stencil.push_back(centre_point);
  plan.stencil_mask.push_back(0);
  for (auto [p, m] : neighbours) {
    plan.stencil.push_back(p);
    plan.stencil_mask.push_back(m);
  }
  plan.sites.push_back(t);
}

std::uint8_t mask_of(const Neighbor& nb) {
  return static_cast<std::uint8_t>((nb.pair ? SiteStencil::kPair : 0) | (nb.density ? SiteStencil::kDensity : 0));
}

}  // namespace

std::vector<std::uint8_t> domain_free_mask(const LatticeDomain& domain) {
  std::vector<std::uint8_t> mask(domain.size(), 0);
  for (int s : domain.free_sites()) mask[s] = 1;
  return mask;
}

std::vector<std::uint8_t> ball_free_mask(const LatticeDomain& domain, int radius) {
  if (radius < 1 || radius > domain.side()) throw Error("ball_free_mask: radius must lie in [1, N]");
  std::vector<std::uint8_t> mask(domain.size(), 0);
  for (int s : domain.free_sites())
    if (hex_norm(domain.index(s)) <= radius - 1) mask[s] = 1;
  return mask;
}

AssemblyPlan atomistic_plan(const EamModel& model, const LatticeDomain& domain, const NeighborTable& nbrs,
                            const std::vector<std::uint8_t>& free_mask, const Mat2& F) {
  if (free_mask.size() != domain.size()) throw Error("atomistic_plan: mask size differs from the site table");
  AssemblyPlan plan;
  plan.model = model;
  plan.F = F;
  plan.ref.resize(domain.size());
  plan.dof.assign(domain.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    plan.ref[i] = domain.position(static_cast<int>(i));
    if (free_mask[i]) {
      if (domain.role(static_cast<int>(i)) != SiteRole::free) throw Error("atomistic_plan: mask selects a clamped site");
      plan.dof[i] = next;
      next += 2;
    }
  }
  plan.unknowns = static_cast<std::size_t>(next);

  // every site whose stencil reads an unknown, the unknowns included
  std::vector<std::pair<int, std::uint8_t>> list;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const int site = static_cast<int>(i);
    if (domain.is_defect(site)) continue;
    const auto stencil = nbrs.of(site);
    const bool touches = free_mask[i] || std::any_of(stencil.begin(), stencil.end(),
                                                     [&](const Neighbor& nb) { return free_mask[nb.site] != 0; });
    if (!touches) continue;
    if (!domain.carries_energy(site)) throw Error("atomistic_plan: stencil of site " + std::to_string(site) + " leaves the table");
    list.clear();
    for (const Neighbor& nb : stencil) list.emplace_back(nb.site, mask_of(nb));
    push_site_term(plan, site, 1.0, site, list);
  }
  return plan;
}

AssemblyPlan bqce_plan(const EamModel& model, const LatticeDomain& domain, const NeighborTable& nbrs,
                       const Mesh& mesh, const BlendField& blend, const Mat2& F) {
  if (blend.beta.size() != domain.size()) throw Error("bqce_plan: blend field does not match the domain");
  if (mesh.v_eff.size() != mesh.element_count()) throw Error("bqce_plan: effective volumes not computed");
  AssemblyPlan plan;
  plan.model = model;
  plan.F = F;
  plan.ref = mesh.nodes;
  plan.dof.assign(mesh.node_count(), -1);
  int next = 0;
  for (std::size_t v = 0; v < mesh.node_count(); ++v) {
    if (mesh.dirichlet[v]) continue;
    plan.dof[v] = next;
    next += 2;
  }
  plan.unknowns = static_cast<std::size_t>(next);

  // clamped lattice sites read by stencils but absent from the mesh
  std::vector<int> extra(domain.size(), -1);
  auto point_of = [&](int site) {
    const int node = mesh.site_node[site];
    if (node >= 0) return node;
    if (domain.role(site) == SiteRole::free) {
      throw Error("bqce_plan: free site " + std::to_string(site) +
                  " is read by an atomistic stencil but is not a mesh node");
    }
    if (extra[site] < 0) {
      extra[site] = static_cast<int>(plan.ref.size());
      plan.ref.push_back(domain.position(site));
      plan.dof.push_back(-1);
    }
    return extra[site];
  };

  std::vector<std::pair<int, std::uint8_t>> list;
  for (int s : domain.energy_sites()) {
    const double w = 1.0 - blend.beta[s];
    if (w <= 0.0) continue;
    if (domain.role(s) == SiteRole::free && mesh.site_node[s] < 0) {
      throw Error("bqce_plan: site " + std::to_string(s) + " has beta < 1 but is not a mesh node");
    }
    const int centre = point_of(s);
    list.clear();
    for (const Neighbor& nb : nbrs.of(s)) list.emplace_back(point_of(nb.site), mask_of(nb));
    push_site_term(plan, s, w, centre, list);
  }

  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    if (!(mesh.v_eff[e] > 0.0)) continue;
    const auto& tri = mesh.elements[e];
    AssemblyPlan::ElementTerm t;
    t.element = static_cast<int>(e);
    t.volume = mesh.v_eff[e];
    t.points = tri;
    Mat2 D;
    D.col(0) = mesh.nodes[tri[1]] - mesh.nodes[tri[0]];
    D.col(1) = mesh.nodes[tri[2]] - mesh.nodes[tri[0]];
    const Mat2 Dinv_t = D.inverse().transpose();
    t.grad[1] = Dinv_t.col(0);
    t.grad[2] = Dinv_t.col(1);
    t.grad[0] = -t.grad[1] - t.grad[2];
    plan.elements.push_back(t);
  }
  return plan;
}

SparseMatrix hessian_pattern(const AssemblyPlan& plan) {
  // adjacency between dof-carrying points, indexed by dof / 2
  const std::size_t nodes = plan.unknowns / 2;
  std::vector<std::vector<int>> adj(nodes);
  auto link = [&](int p, int q) {
    const int dp = plan.dof[p];
    const int dq = plan.dof[q];
    if (dp < 0 || dq < 0) return;
    adj[dp / 2].push_back(dq / 2);
  };
  for (const auto& t : plan.sites) {
    const int c = plan.stencil[t.first];
    link(c, c);
    for (std::uint32_t k = 1; k <= t.count; ++k) {
      const int pk = plan.stencil[t.first + k];
      link(c, pk);
      link(pk, c);
      link(pk, pk);
      if (!(plan.stencil_mask[t.first + k] & SiteStencil::kDensity)) continue;
      for (std::uint32_t l = 1; l <= t.count; ++l)
        if (plan.stencil_mask[t.first + l] & SiteStencil::kDensity) link(pk, plan.stencil[t.first + l]);
    }
  }
  for (const auto& t : plan.elements)
    for (int a : t.points)
      for (int b : t.points) link(a, b);

  std::size_t nnz = 0;
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    nnz += 4 * row.size();
  }
  // symmetric pattern, so the adjacency of node j lists the rows of column j
  SparseMatrix H(static_cast<Eigen::Index>(plan.unknowns), static_cast<Eigen::Index>(plan.unknowns));
  H.reserve(static_cast<Eigen::Index>(nnz));
  for (std::size_t j = 0; j < nodes; ++j) {
    for (int c = 0; c < 2; ++c) {
      const Eigen::Index col = static_cast<Eigen::Index>(2 * j + c);
      H.startVec(col);
      for (int i : adj[j]) {
        H.insertBack(2 * i, col) = 0.0;
        H.insertBack(2 * i + 1, col) = 0.0;
      }
    }
  }
  H.finalize();
  return H;
}

PlanObjective::PlanObjective(AssemblyPlan plan, Reduction mode) : plan_(std::move(plan)), mode_(mode) {}

double PlanObjective::value(const Eigen::VectorXd& x) const { return kernels::omp::energy(plan_, x, mode_); }

double PlanObjective::value_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
  return kernels::omp::energy_gradient(plan_, x, grad, mode_);
}

SparseMatrix PlanObjective::hessian(const Eigen::VectorXd& x) const {
  if (!pattern_) pattern_ = std::make_shared<const SparseMatrix>(hessian_pattern(plan_));
  return kernels::omp::hessian(plan_, *pattern_, x);
}

std::vector<Vec2> PlanObjective::positions(const Eigen::VectorXd& x) const {
  std::vector<Vec2> y(plan_.ref.size());
  for (std::size_t p = 0; p < y.size(); ++p) y[p] = plan_.position(p, x);
  return y;
}

GhostForce ghost_force_norm(const EamModel& model, const LatticeDomain& domain, const NeighborTable& nbrs,
                            const Mesh& mesh, const BlendField& blend, const Mat2& F0) {
  const AssemblyPlan plan = bqce_plan(model, domain, nbrs, mesh, blend, F0);
  Eigen::VectorXd g;
  kernels::serial::energy_gradient(plan, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(plan.unknowns)), g);
  GhostForce out;
  for (Eigen::Index i = 0; i + 1 < g.size(); i += 2) out.sup = std::max(out.sup, std::hypot(g[i], g[i + 1]));
  out.l2 = g.norm();
  return out;
}

}  // namespace bqce
