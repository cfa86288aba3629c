#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bqce/types.hpp"

namespace bqce {

/// Integer coordinates n of a lattice point x = A n, with
/// A = [[1, 1/2], [0, sqrt(3)/2]].
struct LatticeIndex {
  int n1 = 0;
  int n2 = 0;
  friend bool operator==(LatticeIndex, LatticeIndex) = default;
};

inline constexpr double kSqrt3 = 1.7320508075688772;
/// Area of the Voronoi cell of a site in the unit triangular lattice.
inline constexpr double kCellArea = kSqrt3 / 2.0;

Vec2 lattice_point(LatticeIndex n);

/// Hopping distance from n to the origin over nearest-neighbour bonds.
int hex_norm(LatticeIndex n);

/// The six nearest-neighbour offsets, counterclockwise from e1.
inline constexpr std::array<LatticeIndex, 6> kFirstShell{
    {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

enum class DefectKind { none, microcrack11, divacancy };

DefectKind parse_defect(std::string_view name);
std::string_view to_string(DefectKind kind);

enum class SiteRole : std::uint8_t {
  free,      // hex_norm <= N-1, carries unknowns
  boundary,  // hex_norm == N, clamped to y = F x
  halo,      // N+1 <= hex_norm <= N+3, clamped
  defect     // removed atom
};

/// Layers of clamped sites kept beyond the hexagon. Sites up to N+1 interact
/// with free sites; their stencils reach N+3.
inline constexpr int kTableOverhang = 3;

/// Hexagonal domain of side N on the triangular lattice. The site table holds
/// every lattice point with hex_norm <= N+3, defect points included (flagged),
/// so that hopping distances and Voronoi geometry see the perfect lattice.
class LatticeDomain {
 public:
  static LatticeDomain generate(int side, DefectKind defect);

  int side() const { return side_; }
  DefectKind defect_kind() const { return defect_; }

  std::size_t size() const { return index_.size(); }
  LatticeIndex index(int id) const { return index_[id]; }
  Vec2 position(int id) const { return lattice_point(index_[id]); }
  SiteRole role(int id) const { return role_[id]; }
  bool is_defect(int id) const { return role_[id] == SiteRole::defect; }

  /// Site id of n, or -1 when n lies outside the table.
  int find(LatticeIndex n) const;

  std::span<const int> defect_sites() const { return defects_; }
  std::span<const int> free_sites() const { return free_; }

  /// Non-defect sites with hex_norm <= N+1: every site whose energy depends
  /// on a free site. The energy of a deformation sums over these.
  std::span<const int> energy_sites() const { return energy_; }
  bool carries_energy(int id) const;

  /// Lattice sites removed to form the defect (the origin for a perfect
  /// lattice); the reference set for region classification.
  std::span<const int> defect_core() const { return core_; }

  /// Non-defect sites inside the closed hexagon (3N^2+3N+1 minus defects).
  std::size_t hexagon_site_count() const { return hexagon_count_; }

  /// Extent of the defect segment along e1: every defect core lies on the
  /// x-axis between these integers.
  int core_lo() const { return core_lo_; }
  int core_hi() const { return core_hi_; }

 private:
  int side_ = 0;
  DefectKind defect_ = DefectKind::none;
  int stride_ = 0;
  std::vector<LatticeIndex> index_;
  std::vector<SiteRole> role_;
  std::vector<int> lookup_;
  std::vector<int> defects_;
  std::vector<int> free_;
  std::vector<int> energy_;
  std::vector<int> core_;
  std::size_t hexagon_count_ = 0;
  int core_lo_ = 0;
  int core_hi_ = 0;
};

/// One neighbour entry: reference offset length plus which sums it enters.
struct Neighbor {
  int site = -1;
  std::uint8_t shell = 0;  // 0: |r| = 1, 1: sqrt(3), 2: 2
  bool pair = false;       // |r| < pair cutoff
  bool density = false;    // |r| < density cutoff
};

/// Reference-configuration neighbour lists, built once. Defect sites are
/// absent from every list.
class NeighborTable {
 public:
  NeighborTable() = default;
  NeighborTable(const LatticeDomain& domain, double density_cutoff, double pair_cutoff);

  std::span<const Neighbor> of(int site) const {
    return {entries_.data() + offsets_[site], entries_.data() + offsets_[site + 1]};
  }
  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

  /// Lattice offsets of every neighbour shell inside the larger cutoff.
  static std::vector<LatticeIndex> shell_offsets(double cutoff);

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> entries_;
};

inline constexpr std::size_t kMaxNeighbors = 18;

/// Breadth-first hopping distance over first-neighbour bonds of the perfect
/// lattice restricted to the site table. Defect points count as vertices.
std::vector<int> hopping_distance(const LatticeDomain& domain, std::span<const int> source);

struct VoronoiCell {
  int owner = -1;
  std::vector<Vec2> vertices;  // counterclockwise
  double area = 0.0;
};

VoronoiCell voronoi_cell(const LatticeDomain& domain, int site);
/// Voronoi hexagon of an arbitrary lattice point (vertices ccw).
std::array<Vec2, 6> voronoi_hexagon(Vec2 center);

/// Every unit lattice triangle inside the closed hexagon whose three vertices
/// are non-defect sites; vertices are site ids, counterclockwise.
std::vector<std::array<int, 3>> micro_triangulation(const LatticeDomain& domain);

}  // namespace bqce
