#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bqce/blending.hpp"
#include "bqce/lattice.hpp"

namespace bqce {

/// Clamped layers meshed beyond the hexagon of side N. Every node with
/// hex norm >= N is Dirichlet.
inline constexpr int kMeshOverhang = 2;

/// Conforming P1 triangulation of the hexagon of side N + kMeshOverhang.
/// Nodes inside the refined zone are lattice sites; coarse ring nodes are not.
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<int> node_site;                 // lattice site id or -1
  std::vector<std::array<int, 3>> elements;   // counterclockwise
  std::vector<double> v_eff;                  // per element, see effective_volumes
  std::vector<std::uint8_t> dirichlet;        // per node
  std::vector<int> site_node;                 // per table site, -1 if not a node
  int refined_layers = -1;                    // -1: every hexagon site is a node
  int rings = 0;                              // coarse rings outside the refined zone

  std::size_t node_count() const { return nodes.size(); }
  std::size_t element_count() const { return elements.size(); }
  double element_area(std::size_t e) const;
  double element_diameter(std::size_t e) const;
  std::size_t free_node_count() const;
};

/// Unit lattice triangles over the whole meshed hexagon; sites with hex norm
/// >= N are Dirichlet nodes.
Mesh build_micro_mesh(const LatticeDomain& domain);

struct MeshOptions {
  double growth_cap = 1.5;
  int buffer = 2;  // refined layers kept beyond the blend region
};

/// Unit triangles on every site within K0+K1+buffer hops of the defect core,
/// then nested hexagonal rings interpolating to the outer boundary with
/// spacing min(h(x), growth-capped previous spacing), h(x) = (|x|/K0)^gamma.
/// Falls back to the micro mesh when the refined zone reaches the boundary.
Mesh build_graded_mesh(const LatticeDomain& domain, const Regions& regions, const ParameterPlan& plan,
                       const MeshOptions& options = {});

/// v_T = sum over energy-carrying sites of beta(xi) |vor(xi) cap T|, by
/// convex clipping.
void effective_volumes(Mesh& mesh, const BlendField& blend, const LatticeDomain& domain);
/// Serial reference for effective_volumes.
void effective_volumes_serial(Mesh& mesh, const BlendField& blend, const LatticeDomain& domain);

/// Largest diameter ratio between elements sharing an edge.
double max_adjacent_growth(const Mesh& mesh);

struct MeshReport {
  bool ok = true;
  std::string message;
  double boundary_length = 0.0;
  double total_area = 0.0;
};
/// Positive orientation, no edge shared by more than two elements, and no
/// hanging nodes (no node strictly inside another element's edge).
MeshReport check_mesh(const Mesh& mesh);

/// Point location over a bucket grid.
class MeshLocator {
 public:
  explicit MeshLocator(const Mesh& mesh);
  /// Element containing x (with 1e-10 slack) and its barycentric coordinates.
  std::optional<std::pair<int, Eigen::Vector3d>> locate(const Vec2& x) const;

 private:
  const Mesh* mesh_;
  Vec2 origin_;
  double cell_ = 2.0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::vector<int>> buckets_;
};

/// Barycentric interpolation of nodal vectors; raises Error outside the mesh.
Vec2 p1_evaluate(const Mesh& mesh, const MeshLocator& locator, const std::vector<Vec2>& nodal, const Vec2& x);

/// Nodal field evaluated at every non-defect site of the closed hexagon;
/// other table entries are left NaN.
std::vector<Vec2> interpolate_to_lattice(const Mesh& mesh, const std::vector<Vec2>& nodal,
                                         const LatticeDomain& domain);

/// Unconstrained mesh nodes plus uncovered sites with beta < 1 (always zero
/// for meshes from this module, which contain every such site as a node).
std::size_t count_dof(const Mesh& mesh, const BlendField& blend, const LatticeDomain& domain);

}  // namespace bqce
