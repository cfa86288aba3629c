#include "bqce/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "bqce/geometry.hpp"

namespace bqce {

double Mesh::element_area(std::size_t e) const {
  const auto& t = elements[e];
  const Vec2 a = nodes[t[1]] - nodes[t[0]];
  const Vec2 b = nodes[t[2]] - nodes[t[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double Mesh::element_diameter(std::size_t e) const {
  const auto& t = elements[e];
  return std::max({(nodes[t[0]] - nodes[t[1]]).norm(), (nodes[t[1]] - nodes[t[2]]).norm(),
                   (nodes[t[2]] - nodes[t[0]]).norm()});
}

std::size_t Mesh::free_node_count() const {
  return static_cast<std::size_t>(std::count(dirichlet.begin(), dirichlet.end(), 0));
}

namespace {

// Adds every unit triangle whose vertices are nodes of the mesh.
void add_unit_triangles(Mesh& mesh, const LatticeDomain& domain) {
  auto node_of = [&](LatticeIndex n) {
    const int id = domain.find(n);
    return id >= 0 ? mesh.site_node[id] : -1;
  };
  for (std::size_t id = 0; id < domain.size(); ++id) {
    const LatticeIndex n = domain.index(static_cast<int>(id));
    const int a = node_of(n);
    const int b = node_of({n.n1 + 1, n.n2});
    const int c = node_of({n.n1, n.n2 + 1});
    const int d = node_of({n.n1 + 1, n.n2 + 1});
    if (b < 0 || c < 0) continue;
    if (a >= 0) mesh.elements.push_back({a, b, c});
    if (d >= 0) mesh.elements.push_back({b, d, c});
  }
}

int add_site_node(Mesh& mesh, const LatticeDomain& domain, int site) {
  const int node = static_cast<int>(mesh.nodes.size());
  mesh.nodes.push_back(domain.position(site));
  mesh.node_site.push_back(site);
  mesh.dirichlet.push_back(hex_norm(domain.index(site)) >= domain.side() ? 1 : 0);
  mesh.site_node[site] = node;
  return node;
}

int add_free_node(Mesh& mesh, const Vec2& x, bool dirichlet) {
  const int node = static_cast<int>(mesh.nodes.size());
  mesh.nodes.push_back(x);
  mesh.node_site.push_back(-1);
  mesh.dirichlet.push_back(dirichlet ? 1 : 0);
  return node;
}

// Triangulates the strip between two roughly parallel polylines whose end
// points are joined by the strip's side edges.
void triangulate_strip(Mesh& mesh, const std::vector<int>& inner, const std::vector<int>& outer) {
  std::size_t i = 0;
  std::size_t j = 0;
  auto emit = [&](int a, int b, int c) {
    const Vec2 u = mesh.nodes[b] - mesh.nodes[a];
    const Vec2 v = mesh.nodes[c] - mesh.nodes[a];
    if (u.x() * v.y() - u.y() * v.x() > 0.0) mesh.elements.push_back({a, b, c});
    else mesh.elements.push_back({a, c, b});
  };
  while (i + 1 < inner.size() || j + 1 < outer.size()) {
    bool advance_inner;
    if (i + 1 == inner.size()) advance_inner = false;
    else if (j + 1 == outer.size()) advance_inner = true;
    else {
      const double d_inner = (mesh.nodes[inner[i + 1]] - mesh.nodes[outer[j]]).squaredNorm();
      const double d_outer = (mesh.nodes[inner[i]] - mesh.nodes[outer[j + 1]]).squaredNorm();
      advance_inner = d_inner <= d_outer;
    }
    if (advance_inner) {
      emit(inner[i], inner[i + 1], outer[j]);
      ++i;
    } else {
      emit(inner[i], outer[j + 1], outer[j]);
      ++j;
    }
  }
}

using Sides = std::array<std::vector<int>, 6>;

// Corner lattice indices of the level-k hexagon around the segment [lo, hi] e1.
std::array<LatticeIndex, 6> level_corners(int lo, int hi, int k) {
  return {{{hi + k, 0}, {hi, k}, {lo - k, k}, {lo - k, 0}, {lo, -k}, {hi + k, -k}}};
}

constexpr std::array<LatticeIndex, 6> kSideSteps{{{-1, 1}, {-1, 0}, {0, -1}, {1, -1}, {1, 0}, {0, 1}}};

Mesh build_graded(const LatticeDomain& domain, const Regions& regions, const ParameterPlan& plan,
                  const MeshOptions& options, double spacing_growth, int refined) {
  const int N = domain.side();
  const int lo = domain.core_lo();
  const int hi = domain.core_hi();

  Mesh mesh;
  mesh.site_node.assign(domain.size(), -1);
  mesh.refined_layers = refined;
  for (std::size_t id = 0; id < domain.size(); ++id) {
    const int site = static_cast<int>(id);
    if (domain.is_defect(site) || hex_norm(domain.index(site)) > N) continue;
    if (regions.distance[id] <= refined) add_site_node(mesh, domain, site);
  }
  add_unit_triangles(mesh, domain);

  // Inner ring: lattice sites on the boundary of the refined zone.
  const auto inner_corners = level_corners(lo, hi, refined);
  Sides prev;
  for (int s = 0; s < 6; ++s) {
    const LatticeIndex c0 = inner_corners[s];
    const LatticeIndex c1 = inner_corners[(s + 1) % 6];
    const int steps = std::max(std::abs(c1.n1 - c0.n1), std::abs(c1.n2 - c0.n2));
    for (int k = 0; k <= steps; ++k) {
      const LatticeIndex n{c0.n1 + k * kSideSteps[s].n1, c0.n2 + k * kSideSteps[s].n2};
      const int node = mesh.site_node[domain.find(n)];
      if (node < 0) throw Error("build_graded_mesh: refined zone boundary is not covered by nodes");
      prev[s].push_back(node);
    }
  }

  std::array<Vec2, 6> in_xy;
  std::array<Vec2, 6> out_xy;
  const auto outer_corners = level_corners(0, 0, N);
  for (int s = 0; s < 6; ++s) {
    in_xy[s] = lattice_point(inner_corners[s]);
    out_xy[s] = lattice_point(outer_corners[s]);
  }

  const double K0 = std::max(1, plan.K0);
  double spacing = 1.0;
  double level = refined;
  while (level < N) {
    const double target = std::pow((level + spacing) / K0, plan.mesh_exponent);
    const double next_spacing = std::min(std::max(target, spacing), spacing * spacing_growth);
    double next_level = level + 0.5 * (spacing + next_spacing);
    if (next_level > N - 0.5 * next_spacing) next_level = N;
    const bool last = next_level >= N;
    const double t = (next_level - refined) / static_cast<double>(N - refined);

    std::array<Vec2, 6> corner;
    std::array<int, 6> corner_node;
    for (int s = 0; s < 6; ++s) {
      corner[s] = (1.0 - t) * in_xy[s] + t * out_xy[s];
      corner_node[s] = add_free_node(mesh, last ? out_xy[s] : corner[s], last);
    }
    Sides ring;
    for (int s = 0; s < 6; ++s) {
      const Vec2 a = last ? out_xy[s] : corner[s];
      const Vec2 b = last ? out_xy[(s + 1) % 6] : corner[(s + 1) % 6];
      const int segments = std::max(1, static_cast<int>(std::lround((b - a).norm() / next_spacing)));
      ring[s].push_back(corner_node[s]);
      for (int k = 1; k < segments; ++k) {
        ring[s].push_back(add_free_node(mesh, a + (static_cast<double>(k) / segments) * (b - a), last));
      }
      ring[s].push_back(corner_node[(s + 1) % 6]);
    }
    for (int s = 0; s < 6; ++s) triangulate_strip(mesh, prev[s], ring[s]);
    prev = std::move(ring);
    spacing = next_spacing;
    level = next_level;
    ++mesh.rings;
  }

  // Clamped band out to the hexagon of side N + kMeshOverhang, covering the
  // Voronoi cells of every site that carries energy.
  const Sides outermost = prev;
  for (int layer = 1; layer <= kMeshOverhang; ++layer) {
    const double scale = static_cast<double>(N + layer) / N;
    Sides band;
    std::map<int, int> scaled;
    for (int s = 0; s < 6; ++s) {
      for (std::size_t k = 0; k < prev[s].size(); ++k) {
        const int base = outermost[s][k];
        auto [it, fresh] = scaled.try_emplace(base, -1);
        if (fresh) it->second = add_free_node(mesh, scale * mesh.nodes[base], true);
        band[s].push_back(it->second);
      }
    }
    for (int s = 0; s < 6; ++s) triangulate_strip(mesh, prev[s], band[s]);
    prev = std::move(band);
  }
  (void)options;
  return mesh;
}

}  // namespace

Mesh build_micro_mesh(const LatticeDomain& domain) {
  Mesh mesh;
  mesh.site_node.assign(domain.size(), -1);
  for (std::size_t id = 0; id < domain.size(); ++id) {
    const int site = static_cast<int>(id);
    if (domain.is_defect(site) || hex_norm(domain.index(site)) > domain.side() + kMeshOverhang) continue;
    add_site_node(mesh, domain, site);
  }
  add_unit_triangles(mesh, domain);
  return mesh;
}

Mesh build_graded_mesh(const LatticeDomain& domain, const Regions& regions, const ParameterPlan& plan,
                       const MeshOptions& options) {
  if (!(options.growth_cap > 1.0)) throw Error("build_graded_mesh: growth_cap must exceed 1");
  if (options.buffer < 0) throw Error("build_graded_mesh: negative buffer");
  const int N = domain.side();
  const int refined = regions.K0 + regions.K1 + options.buffer;
  const int reach = std::max({refined + domain.core_hi(), refined - domain.core_lo(), refined});
  if (reach > N - 2) return build_micro_mesh(domain);

  // Ring spacing grows geometrically; element diameters across the strip
  // seams grow somewhat faster than the spacing, so shrink the spacing factor
  // until the element-level cap holds.
  double growth = options.growth_cap;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Mesh mesh = build_graded(domain, regions, plan, options, growth, refined);
    if (mesh.rings == 0) throw Error("build_graded_mesh: rings failed to reach the boundary");
    if (max_adjacent_growth(mesh) <= options.growth_cap) return mesh;
    growth = 1.0 + 0.85 * (growth - 1.0);
  }
  throw Error("build_graded_mesh: cannot satisfy growth cap " + std::to_string(options.growth_cap));
}

namespace {

double element_effective_volume(const Mesh& mesh, std::size_t e, const BlendField& blend,
                                const LatticeDomain& domain) {
  const auto& t = mesh.elements[e];
  const std::array<Vec2, 3> tri{mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]};
  Vec2 lo = tri[0];
  Vec2 hi = tri[0];
  for (const auto& p : tri) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double pad = 0.6;  // > Voronoi circumradius 1/sqrt(3)
  const double row = 0.5 * kSqrt3;
  const int n2_lo = static_cast<int>(std::floor((lo.y() - pad) / row));
  const int n2_hi = static_cast<int>(std::ceil((hi.y() + pad) / row));
  double v = 0.0;
  for (int n2 = n2_lo; n2 <= n2_hi; ++n2) {
    const int n1_lo = static_cast<int>(std::floor(lo.x() - pad - 0.5 * n2));
    const int n1_hi = static_cast<int>(std::ceil(hi.x() + pad - 0.5 * n2));
    for (int n1 = n1_lo; n1 <= n1_hi; ++n1) {
      const int id = domain.find({n1, n2});
      if (id < 0 || !domain.carries_energy(id)) continue;
      const double b = blend.beta[id];
      if (b == 0.0) continue;
      const auto cell = voronoi_hexagon(lattice_point({n1, n2}));
      const Polygon cut = clip_convex(cell, tri);
      if (!cut.empty()) v += b * polygon_area(cut);
    }
  }
  return v;
}

}  // namespace

void effective_volumes(Mesh& mesh, const BlendField& blend, const LatticeDomain& domain) {
  mesh.v_eff.assign(mesh.elements.size(), 0.0);
  const auto n = static_cast<std::ptrdiff_t>(mesh.elements.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t e = 0; e < n; ++e) {
    mesh.v_eff[e] = element_effective_volume(mesh, static_cast<std::size_t>(e), blend, domain);
  }
}

void effective_volumes_serial(Mesh& mesh, const BlendField& blend, const LatticeDomain& domain) {
  mesh.v_eff.assign(mesh.elements.size(), 0.0);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    mesh.v_eff[e] = element_effective_volume(mesh, e, blend, domain);
  }
}

namespace {

using Edge = std::pair<int, int>;

std::map<Edge, std::vector<int>> edge_map(const Mesh& mesh) {
  std::map<Edge, std::vector<int>> edges;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& t = mesh.elements[e];
    for (int k = 0; k < 3; ++k) {
      int a = t[k];
      int b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edges[{a, b}].push_back(static_cast<int>(e));
    }
  }
  return edges;
}

double continuous_hex_norm(const Vec2& x) {
  const double n2 = x.y() / (0.5 * kSqrt3);
  const double n1 = x.x() - 0.5 * n2;
  return 0.5 * (std::abs(n1) + std::abs(n2) + std::abs(n1 + n2));
}

}  // namespace

double max_adjacent_growth(const Mesh& mesh) {
  double worst = 1.0;
  for (const auto& [edge, owners] : edge_map(mesh)) {
    if (owners.size() != 2) continue;
    const double a = mesh.element_diameter(owners[0]);
    const double b = mesh.element_diameter(owners[1]);
    worst = std::max(worst, std::max(a, b) / std::min(a, b));
  }
  return worst;
}

MeshReport check_mesh(const Mesh& mesh) {
  MeshReport report;
  std::ostringstream msg;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const double area = mesh.element_area(e);
    report.total_area += area;
    if (!(area > 0.0)) {
      report.ok = false;
      msg << "element " << e << " has non-positive area " << area << "; ";
    }
  }
  double outer = 0.0;
  for (const auto& n : mesh.nodes) outer = std::max(outer, continuous_hex_norm(n));
  for (const auto& [edge, owners] : edge_map(mesh)) {
    if (owners.size() > 2) {
      report.ok = false;
      msg << "edge (" << edge.first << "," << edge.second << ") shared by " << owners.size() << " elements; ";
    }
    if (owners.size() == 1) {
      const Vec2 a = mesh.nodes[edge.first];
      const Vec2 b = mesh.nodes[edge.second];
      report.boundary_length += (b - a).norm();
      const bool on_hull = std::abs(continuous_hex_norm(0.5 * (a + b)) - outer) < 1e-9;
      // Interior boundary edges are only legal around removed atoms, where
      // both ends are lattice sites one unit apart.
      const bool around_hole = mesh.node_site[edge.first] >= 0 && mesh.node_site[edge.second] >= 0 &&
                               std::abs((b - a).norm() - 1.0) < 1e-12;
      if (!on_hull && !around_hole) {
        report.ok = false;
        msg << "interior boundary edge (" << edge.first << "," << edge.second << "): hanging node; ";
      }
    }
  }
  report.message = msg.str();
  return report;
}

MeshLocator::MeshLocator(const Mesh& mesh) : mesh_(&mesh) {
  Vec2 lo = mesh.nodes.front();
  Vec2 hi = mesh.nodes.front();
  for (const auto& p : mesh.nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  origin_ = lo - Vec2(1.0, 1.0);
  nx_ = static_cast<int>((hi.x() - origin_.x()) / cell_) + 2;
  ny_ = static_cast<int>((hi.y() - origin_.y()) / cell_) + 2;
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    Vec2 elo = mesh.nodes[mesh.elements[e][0]];
    Vec2 ehi = elo;
    for (int k = 1; k < 3; ++k) {
      elo = elo.cwiseMin(mesh.nodes[mesh.elements[e][k]]);
      ehi = ehi.cwiseMax(mesh.nodes[mesh.elements[e][k]]);
    }
    const int i0 = static_cast<int>((elo.x() - origin_.x()) / cell_);
    const int i1 = static_cast<int>((ehi.x() - origin_.x()) / cell_);
    const int j0 = static_cast<int>((elo.y() - origin_.y()) / cell_);
    const int j1 = static_cast<int>((ehi.y() - origin_.y()) / cell_);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(e));
  }
}

std::optional<std::pair<int, Eigen::Vector3d>> MeshLocator::locate(const Vec2& x) const {
  const int i = static_cast<int>((x.x() - origin_.x()) / cell_);
  const int j = static_cast<int>((x.y() - origin_.y()) / cell_);
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return std::nullopt;
  for (int e : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
    const auto& t = mesh_->elements[e];
    const Eigen::Vector3d l = barycentric(mesh_->nodes[t[0]], mesh_->nodes[t[1]], mesh_->nodes[t[2]], x);
    if (l.minCoeff() >= -1e-10) return std::make_pair(e, l);
  }
  return std::nullopt;
}

Vec2 p1_evaluate(const Mesh& mesh, const MeshLocator& locator, const std::vector<Vec2>& nodal, const Vec2& x) {
  const auto hit = locator.locate(x);
  if (!hit) {
    std::ostringstream msg;
    msg << "p1_evaluate: point (" << x.x() << ", " << x.y() << ") lies outside the mesh";
    throw Error(msg.str());
  }
  const auto& t = mesh.elements[hit->first];
  const auto& l = hit->second;
  return l[0] * nodal[t[0]] + l[1] * nodal[t[1]] + l[2] * nodal[t[2]];
}

std::vector<Vec2> interpolate_to_lattice(const Mesh& mesh, const std::vector<Vec2>& nodal,
                                         const LatticeDomain& domain) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<Vec2> out(domain.size(), Vec2(nan, nan));
  const MeshLocator locator(mesh);
  for (std::size_t id = 0; id < domain.size(); ++id) {
    const int site = static_cast<int>(id);
    if (domain.is_defect(site) || hex_norm(domain.index(site)) > domain.side()) continue;
    const int node = mesh.site_node[id];
    out[id] = node >= 0 ? nodal[node] : p1_evaluate(mesh, locator, nodal, domain.position(site));
  }
  return out;
}

std::size_t count_dof(const Mesh& mesh, const BlendField& blend, const LatticeDomain& domain) {
  std::size_t dof = mesh.free_node_count();
  for (int site : domain.free_sites()) {
    if (blend.beta[site] < 1.0 && mesh.site_node[site] < 0) ++dof;
  }
  return dof;
}

}  // namespace bqce
