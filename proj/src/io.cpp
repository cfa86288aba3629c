#include "bqce/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace bqce {

namespace {

std::string g15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

void write_dump(std::ostream& out, const std::vector<Vec2>& points, const std::vector<std::array<int, 3>>& elements,
                const std::vector<double>* v_eff, const std::vector<double>* beta) {
  out << "sites " << points.size() << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) out << i << ' ' << g15(points[i].x()) << ' ' << g15(points[i].y()) << '\n';
  out << "elements " << elements.size() << '\n';
  for (std::size_t e = 0; e < elements.size(); ++e) {
    out << e << ' ' << elements[e][0] << ' ' << elements[e][1] << ' ' << elements[e][2];
    if (v_eff) out << ' ' << g15((*v_eff)[e]);
    out << '\n';
  }
  if (beta) {
    out << "beta " << beta->size() << '\n';
    for (std::size_t i = 0; i < beta->size(); ++i) out << i << ' ' << g15((*beta)[i]) << '\n';
  }
}

void write_lattice_dump(std::ostream& out, const LatticeDomain& domain, const std::vector<double>* beta,
                        const std::vector<Vec2>* positions) {
  // compact ids over the closed hexagon so the dump is self-contained
  std::vector<int> local(domain.size(), -1);
  std::vector<Vec2> points;
  std::vector<double> b;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const int id = static_cast<int>(i);
    if (domain.is_defect(id) || hex_norm(domain.index(id)) > domain.side()) continue;
    local[i] = static_cast<int>(points.size());
    points.push_back(positions ? (*positions)[i] : domain.position(id));
    if (beta) b.push_back((*beta)[i]);
  }
  auto tris = micro_triangulation(domain);
  for (auto& t : tris)
    for (int& v : t) v = local[v];
  write_dump(out, points, tris, nullptr, beta ? &b : nullptr);
}

void write_mesh_dump(std::ostream& out, const Mesh& mesh, const std::vector<double>* beta_sites,
                     const std::vector<Vec2>* positions) {
  std::vector<double> b;
  if (beta_sites) {
    b.resize(mesh.node_count());
    for (std::size_t v = 0; v < mesh.node_count(); ++v) {
      const int s = mesh.node_site[v];
      b[v] = s >= 0 ? (*beta_sites)[s] : 1.0;
    }
  }
  write_dump(out, positions ? *positions : mesh.nodes, mesh.elements, mesh.v_eff.empty() ? nullptr : &mesh.v_eff,
             beta_sites ? &b : nullptr);
}

void write_state(std::ostream& out, const std::vector<StateEntry>& entries) {
  for (const auto& e : entries) out << e.id << ' ' << g15(e.u.x()) << ' ' << g15(e.u.y()) << '\n';
}

std::vector<StateEntry> read_state(std::istream& in) {
  std::vector<StateEntry> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    StateEntry e;
    double x = 0.0;
    double y = 0.0;
    if (!(ss >> e.id >> x >> y)) throw Error("read_state: malformed line " + std::to_string(lineno));
    e.u = Vec2(x, y);
    out.push_back(e);
  }
  return out;
}

}  // namespace bqce
