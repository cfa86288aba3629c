#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "bqce/mesh.hpp"

namespace bqce {

/// Plain-text dump read by the plotting scripts:
///   sites <count>        then `id x y`
///   elements <count>     then `id i j k` (plus ` v_eff` when volumes are given)
///   beta <count>         then `id beta`, only when beta is given
/// Coordinates use 15 significant digits.
void write_dump(std::ostream& out, const std::vector<Vec2>& points, const std::vector<std::array<int, 3>>& elements,
                const std::vector<double>* v_eff = nullptr, const std::vector<double>* beta = nullptr);

/// Lattice sites of the closed hexagon (defects excluded) with the
/// micro-triangulation; site ids are compact indices over the written sites.
void write_lattice_dump(std::ostream& out, const LatticeDomain& domain, const std::vector<double>* beta = nullptr,
                        const std::vector<Vec2>* positions = nullptr);

/// Mesh nodes and elements with effective volumes; beta per node (1 on
/// coarse nodes that are not lattice sites).
void write_mesh_dump(std::ostream& out, const Mesh& mesh, const std::vector<double>* beta_sites = nullptr,
                     const std::vector<Vec2>* positions = nullptr);

/// Displacement checkpoints: one `id ux uy` line per point.
struct StateEntry {
  int id = 0;
  Vec2 u = Vec2::Zero();
};
void write_state(std::ostream& out, const std::vector<StateEntry>& entries);
std::vector<StateEntry> read_state(std::istream& in);

}  // namespace bqce
