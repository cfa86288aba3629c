#include "bqce/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace bqce {

Vec2 lattice_point(LatticeIndex n) {
  return {n.n1 + 0.5 * n.n2, 0.5 * kSqrt3 * n.n2};
}

int hex_norm(LatticeIndex n) {
  return (std::abs(n.n1) + std::abs(n.n2) + std::abs(n.n1 + n.n2)) / 2;
}

DefectKind parse_defect(std::string_view name) {
  if (name == "none") return DefectKind::none;
  if (name == "microcrack11" || name == "microcrack") return DefectKind::microcrack11;
  if (name == "divacancy") return DefectKind::divacancy;
  throw Error("unknown defect kind '" + std::string(name) + "'");
}

std::string_view to_string(DefectKind kind) {
  switch (kind) {
    case DefectKind::none: return "none";
    case DefectKind::microcrack11: return "microcrack11";
    case DefectKind::divacancy: return "divacancy";
  }
  return "?";
}

LatticeDomain LatticeDomain::generate(int side, DefectKind defect) {
  if (side < 1) throw Error("domain side must be positive, got " + std::to_string(side));

  std::vector<LatticeIndex> removed;
  switch (defect) {
    case DefectKind::none: break;
    case DefectKind::microcrack11:
      for (int k = -5; k <= 5; ++k) removed.push_back({k, 0});
      break;
    case DefectKind::divacancy:
      removed = {{0, 0}, {1, 0}};
      break;
  }
  if (!removed.empty() && side < 8) {
    throw Error("defect '" + std::string(to_string(defect)) + "' is not interior to a domain of side " +
                std::to_string(side) + " (need N >= 8)");
  }
  for (auto n : removed) {
    if (hex_norm(n) > side - 2) {
      throw Error("defect site lies outside the interior of the domain");
    }
  }

  LatticeDomain d;
  d.side_ = side;
  d.defect_ = defect;
  const int reach = side + kTableOverhang;
  d.stride_ = 2 * reach + 1;
  d.lookup_.assign(static_cast<std::size_t>(d.stride_) * d.stride_, -1);

  for (int n2 = -reach; n2 <= reach; ++n2) {
    for (int n1 = -reach; n1 <= reach; ++n1) {
      const LatticeIndex n{n1, n2};
      const int h = hex_norm(n);
      if (h > reach) continue;
      const int id = static_cast<int>(d.index_.size());
      d.index_.push_back(n);
      SiteRole role = h <= side - 1 ? SiteRole::free : (h == side ? SiteRole::boundary : SiteRole::halo);
      if (std::find(removed.begin(), removed.end(), n) != removed.end()) role = SiteRole::defect;
      d.role_.push_back(role);
      d.lookup_[static_cast<std::size_t>(n2 + reach) * d.stride_ + (n1 + reach)] = id;
      if (role == SiteRole::defect) d.defects_.push_back(id);
      if (role == SiteRole::free) d.free_.push_back(id);
      if (role != SiteRole::defect && h <= side + 1) d.energy_.push_back(id);
      if (h <= side && role != SiteRole::defect) ++d.hexagon_count_;
    }
  }

  if (removed.empty()) {
    d.core_.push_back(d.find({0, 0}));
  } else {
    d.core_ = d.defects_;
    d.core_lo_ = removed.front().n1;
    d.core_hi_ = removed.back().n1;
  }
  return d;
}

int LatticeDomain::find(LatticeIndex n) const {
  const int reach = side_ + kTableOverhang;
  if (std::abs(n.n1) > reach || std::abs(n.n2) > reach) return -1;
  return lookup_[static_cast<std::size_t>(n.n2 + reach) * stride_ + (n.n1 + reach)];
}

bool LatticeDomain::carries_energy(int id) const {
  return role_[id] != SiteRole::defect && hex_norm(index_[id]) <= side_ + 1;
}

std::vector<LatticeIndex> NeighborTable::shell_offsets(double cutoff) {
  std::vector<LatticeIndex> out;
  const int r = static_cast<int>(std::ceil(cutoff)) + 1;
  for (int n2 = -r; n2 <= r; ++n2) {
    for (int n1 = -r; n1 <= r; ++n1) {
      if (n1 == 0 && n2 == 0) continue;
      if (lattice_point({n1, n2}).norm() < cutoff) out.push_back({n1, n2});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](LatticeIndex a, LatticeIndex b) {
    return lattice_point(a).squaredNorm() < lattice_point(b).squaredNorm() - 1e-9;
  });
  return out;
}

NeighborTable::NeighborTable(const LatticeDomain& domain, double density_cutoff, double pair_cutoff) {
  const double outer = std::max(density_cutoff, pair_cutoff);
  const auto offsets = shell_offsets(outer);
  offsets_.reserve(domain.size() + 1);
  offsets_.push_back(0);
  for (std::size_t id = 0; id < domain.size(); ++id) {
    const int site = static_cast<int>(id);
    if (!domain.is_defect(site)) {
      const LatticeIndex c = domain.index(site);
      for (auto off : offsets) {
        const int other = domain.find({c.n1 + off.n1, c.n2 + off.n2});
        if (other < 0 || domain.is_defect(other)) continue;
        const double r = lattice_point(off).norm();
        Neighbor nb;
        nb.site = other;
        nb.shell = r < 1.5 ? 0 : (r < 1.9 ? 1 : 2);
        nb.pair = r < pair_cutoff;
        nb.density = r < density_cutoff;
        entries_.push_back(nb);
      }
    }
    offsets_.push_back(entries_.size());
  }
}

std::vector<int> hopping_distance(const LatticeDomain& domain, std::span<const int> source) {
  if (source.empty()) throw Error("hopping_distance: empty source set");
  std::vector<int> dist(domain.size(), -1);
  std::deque<int> queue;
  for (int s : source) {
    if (s < 0 || static_cast<std::size_t>(s) >= domain.size()) throw Error("hopping_distance: source outside domain");
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    const LatticeIndex c = domain.index(s);
    for (auto off : kFirstShell) {
      const int t = domain.find({c.n1 + off.n1, c.n2 + off.n2});
      if (t < 0 || dist[t] >= 0) continue;
      dist[t] = dist[s] + 1;
      queue.push_back(t);
    }
  }
  return dist;
}

std::array<Vec2, 6> voronoi_hexagon(Vec2 center) {
  // Vertices sit at the centroids of the six surrounding unit triangles.
  const double r = 1.0 / kSqrt3;
  std::array<Vec2, 6> v;
  for (int k = 0; k < 6; ++k) {
    const double angle = M_PI / 6.0 + k * M_PI / 3.0;
    v[k] = center + r * Vec2(std::cos(angle), std::sin(angle));
  }
  return v;
}

VoronoiCell voronoi_cell(const LatticeDomain& domain, int site) {
  VoronoiCell cell;
  cell.owner = site;
  const auto hex = voronoi_hexagon(domain.position(site));
  cell.vertices.assign(hex.begin(), hex.end());
  double twice = 0.0;
  for (std::size_t k = 0; k < 6; ++k) {
    const Vec2& a = hex[k];
    const Vec2& b = hex[(k + 1) % 6];
    twice += a.x() * b.y() - a.y() * b.x();
  }
  cell.area = 0.5 * twice;
  return cell;
}

std::vector<std::array<int, 3>> micro_triangulation(const LatticeDomain& domain) {
  std::vector<std::array<int, 3>> tris;
  const int N = domain.side();
  auto inside = [&](LatticeIndex n) {
    if (hex_norm(n) > N) return -1;
    const int id = domain.find(n);
    return (id >= 0 && !domain.is_defect(id)) ? id : -1;
  };
  for (std::size_t id = 0; id < domain.size(); ++id) {
    const LatticeIndex n = domain.index(static_cast<int>(id));
    const int a = inside(n);
    const int b = inside({n.n1 + 1, n.n2});
    const int c = inside({n.n1, n.n2 + 1});
    const int d = inside({n.n1 + 1, n.n2 + 1});
    if (b < 0 || c < 0) continue;
    if (a >= 0) tris.push_back({a, b, c});
    if (d >= 0) tris.push_back({b, d, c});
  }
  return tris;
}

}  // namespace bqce
