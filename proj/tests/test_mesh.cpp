#include <doctest.h>

#include <numeric>

#include "bqce/assembly.hpp"
#include "bqce/geometry.hpp"
#include "bqce/mesh.hpp"
#include "support.hpp"

using namespace bqce;

namespace {

double hexagon_area(double side) { return 1.5 * std::sqrt(3.0) * side * side; }

Polygon random_convex(std::mt19937_64& g) {
  // vertices on a jittered circle, in angular order
  const int n = test::uniform_int(g, 3, 8);
  const Vec2 c(test::uniform(g, -1.0, 1.0), test::uniform(g, -1.0, 1.0));
  const double r = test::uniform(g, 0.3, 2.0);
  std::vector<double> ang(n);
  for (auto& a : ang) a = test::uniform(g, 0.0, 2.0 * M_PI);
  std::sort(ang.begin(), ang.end());
  Polygon p;
  for (double a : ang) p.push_back(c + r * Vec2(std::cos(a), std::sin(a)));
  return p;
}

struct Graded {
  LatticeDomain domain;
  Regions regions;
  ParameterPlan plan;
  BlendField blend;
  Mesh mesh;
};

Graded graded(int N, DefectKind defect, int K0) {
  Graded g{LatticeDomain::generate(N, defect), {}, {}, {}, {}};
  g.plan = select_parameters(3.0, 2.0, K0, N, ParameterRule::table);
  g.regions = classify_regions(g.domain, K0, g.plan.K1);
  g.blend = beta_smooth(g.domain, g.regions);
  g.mesh = build_graded_mesh(g.domain, g.regions, g.plan);
  effective_volumes(g.mesh, g.blend, g.domain);
  return g;
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("convex clipping") {
  const auto cell = voronoi_hexagon(Vec2::Zero());
  const std::array<Vec2, 3> big{Vec2(-3, -2), Vec2(3, -2), Vec2(0, 3)};
  CHECK(polygon_area(clip_convex(cell, big)) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
  CHECK(polygon_area(clip_convex(cell, cell)) == doctest::Approx(polygon_area(cell)).epsilon(1e-14));
  const std::array<Vec2, 3> far{Vec2(5, 5), Vec2(6, 5), Vec2(5, 6)};
  CHECK(clip_convex(cell, far).empty());
}

TEST_CASE("clipping is symmetric") {
  auto g = test::rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const Polygon p = random_convex(g);
    const Polygon q = random_convex(g);
    const double a = polygon_area(clip_convex(p, q));
    const double b = polygon_area(clip_convex(q, p));
    CHECK(std::abs(a - b) < 1e-12);
    CHECK(a <= std::min(polygon_area(p), polygon_area(q)) + 1e-12);
  }
}

TEST_CASE("micro mesh") {
  const LatticeDomain d = LatticeDomain::generate(10, DefectKind::none);
  const Mesh m = build_micro_mesh(d);
  const MeshReport rep = check_mesh(m);
  CHECK_MESSAGE(rep.ok, rep.message);
  CHECK(rep.total_area == doctest::Approx(hexagon_area(10 + kMeshOverhang)).epsilon(1e-12));
  CHECK(m.free_node_count() == d.free_sites().size());
  for (std::size_t v = 0; v < m.node_count(); ++v)
    CHECK(static_cast<bool>(m.dirichlet[v]) == (hex_norm(d.index(m.node_site[v])) >= 10));
}

TEST_CASE("graded mesh construction") {
  const Graded g = graded(100, DefectKind::none, 8);
  const MeshReport rep = check_mesh(g.mesh);
  CHECK_MESSAGE(rep.ok, rep.message);
  CHECK(rep.total_area == doctest::Approx(hexagon_area(100 + kMeshOverhang)).epsilon(1e-9));
  CHECK(max_adjacent_growth(g.mesh) <= 1.5);
  CHECK(g.mesh.node_count() < g.domain.hexagon_site_count());
  CHECK(g.mesh.rings > 0);

  // the first K0 + K1 layers are unit lattice triangles
  const auto dist = g.regions.distance;
  for (std::size_t e = 0; e < g.mesh.element_count(); ++e) {
    bool inner = false;
    for (int v : g.mesh.elements[e]) {
      const int s = g.mesh.node_site[v];
      if (s >= 0 && dist[s] <= 16) inner = true;
    }
    if (inner) CHECK(g.mesh.element_diameter(e) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // every site with beta < 1 is a node
  for (int s : g.domain.energy_sites())
    if (g.blend.beta[s] < 1.0) CHECK(g.mesh.site_node[s] >= 0);
}

TEST_CASE("graded mesh around defects") {
  for (DefectKind kind : {DefectKind::divacancy, DefectKind::microcrack11}) {
    for (int K0 : {3, 6, 11}) {
      const Graded g = graded(60, kind, K0);
      const MeshReport rep = check_mesh(g.mesh);
      CHECK_MESSAGE(rep.ok, rep.message);
      CHECK(max_adjacent_growth(g.mesh) <= 1.5);
    }
  }
  const LatticeDomain d = LatticeDomain::generate(30, DefectKind::none);
  const ParameterPlan plan = select_parameters(3.0, 2.0, 4, 30, ParameterRule::table);
  CHECK_THROWS_AS(build_graded_mesh(d, classify_regions(d, 4, 4), plan, MeshOptions{1.0, 2}), Error);
}

TEST_CASE("effective volumes") {
  const Graded g = graded(40, DefectKind::divacancy, 4);
  double beta_sum = 0.0;
  for (int s : g.domain.energy_sites()) beta_sum += g.blend.beta[s];
  const double v_sum = std::accumulate(g.mesh.v_eff.begin(), g.mesh.v_eff.end(), 0.0);
  CHECK(v_sum == doctest::Approx(kCellArea * beta_sum).epsilon(1e-10));

  Mesh serial = g.mesh;
  effective_volumes_serial(serial, g.blend, g.domain);
  CHECK(serial.v_eff == g.mesh.v_eff);

  // refinement invariance: the micro mesh carries the same total
  Mesh micro = build_micro_mesh(g.domain);
  effective_volumes(micro, g.blend, g.domain);
  CHECK(std::accumulate(micro.v_eff.begin(), micro.v_eff.end(), 0.0) == doctest::Approx(v_sum).epsilon(1e-10));

  // interior elements whose overlapping cells all have beta = 1 keep |T|
  for (std::size_t e = 0; e < g.mesh.element_count(); ++e) {
    bool all_one = true;
    bool interior = true;
    for (int v : g.mesh.elements[e]) {
      const Vec2 x = g.mesh.nodes[v];
      if (x.norm() < 16.0) all_one = false;
      if (g.mesh.dirichlet[v]) interior = false;
    }
    if (all_one && interior) CHECK(g.mesh.v_eff[e] == doctest::Approx(g.mesh.element_area(e)).epsilon(1e-12));
  }

  BlendField zero = g.blend;
  std::fill(zero.beta.begin(), zero.beta.end(), 0.0);
  Mesh z = g.mesh;
  effective_volumes(z, zero, g.domain);
  for (double v : z.v_eff) CHECK(v == 0.0);
}

TEST_CASE("P1 evaluation reproduces affine fields") {
  const Graded g = graded(40, DefectKind::microcrack11, 4);
  Mat2 G;
  G << 0.3, -0.2, 0.1, 0.4;
  const Vec2 t(0.7, -1.1);
  std::vector<Vec2> nodal(g.mesh.node_count());
  for (std::size_t v = 0; v < nodal.size(); ++v) nodal[v] = G * g.mesh.nodes[v] + t;
  const MeshLocator loc(g.mesh);
  auto rng = test::rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec2 x(test::uniform(rng, -35.0, 35.0), test::uniform(rng, -30.0, 30.0));
    if (!loc.locate(x)) continue;
    CHECK((p1_evaluate(g.mesh, loc, nodal, x) - (G * x + t)).norm() < 1e-11);
  }
  for (std::size_t v = 0; v < nodal.size(); v += 97)
    CHECK((p1_evaluate(g.mesh, loc, nodal, g.mesh.nodes[v]) - nodal[v]).norm() < 1e-11);
  for (std::size_t e = 0; e < g.mesh.element_count(); e += 53) {
    const auto& tri = g.mesh.elements[e];
    const Vec2 c = (g.mesh.nodes[tri[0]] + g.mesh.nodes[tri[1]] + g.mesh.nodes[tri[2]]) / 3.0;
    const Vec2 mean = (nodal[tri[0]] + nodal[tri[1]] + nodal[tri[2]]) / 3.0;
    CHECK((p1_evaluate(g.mesh, loc, nodal, c) - mean).norm() < 1e-11);
  }
  CHECK_THROWS_AS(p1_evaluate(g.mesh, loc, nodal, Vec2(500.0, 0.0)), Error);

  const auto lat = interpolate_to_lattice(g.mesh, nodal, g.domain);
  for (std::size_t i = 0; i < g.domain.size(); ++i) {
    const int id = static_cast<int>(i);
    if (g.domain.is_defect(id) || hex_norm(g.domain.index(id)) > 40) {
      CHECK(std::isnan(lat[i].x()));
      continue;
    }
    CHECK((lat[i] - (G * g.domain.position(id) + t)).norm() < 1e-11);
  }
}

TEST_CASE("DoF accounting") {
  const LatticeDomain d = LatticeDomain::generate(100, DefectKind::divacancy);
  CHECK(d.free_sites().size() == 30301u - 2u - 600u);
  const auto mask = ball_free_mask(d, 20);
  CHECK(static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)) == 3u * 19u * 19u + 3u * 19u + 1u - 2u);

  const Mesh micro = build_micro_mesh(d);
  const BlendField ones{BlendKind::qce, 0, 0, std::vector<double>(d.size(), 1.0), 0.0};
  CHECK(count_dof(micro, ones, d) == d.free_sites().size());

  std::size_t prev = 0;
  for (int K0 : {3, 4, 6, 8}) {
    const Graded g = graded(60, DefectKind::divacancy, K0);
    const std::size_t dof = count_dof(g.mesh, g.blend, g.domain);
    CHECK(dof > prev);
    CHECK(dof == g.mesh.free_node_count());
    prev = dof;
  }
}

}  // TEST_SUITE
