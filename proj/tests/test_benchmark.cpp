#include <doctest.h>

#include <sstream>

#include "bqce/benchmark.hpp"
#include "bqce/config.hpp"
#include "bqce/io.hpp"
#include "support.hpp"

using namespace bqce;

namespace {

const BenchmarkSetup& divacancy20() {
  static const BenchmarkSetup s = make_setup(Problem::divacancy, 20);
  return s;
}

const AtomisticSolution& divacancy20_reference() {
  static const AtomisticSolution a = solve_reference(divacancy20());
  return a;
}

Deformation shifted(const LatticeDomain& d, const Deformation& y, const Mat2& G) {
  Deformation out = y;
  for (std::size_t i = 0; i < d.size(); ++i) out[i] += G * d.position(static_cast<int>(i));
  return out;
}

}  // namespace

TEST_SUITE("benchmark") {

TEST_CASE("macroscopic loads") {
  const Mat2 F0 = find_ground_state(EamModel{});
  Mat2 Lc;
  Lc << 1.0, 0.03, 0.0, 1.03;
  Mat2 Ld;
  Ld << 1.03, 0.03, 0.0, 1.03;
  CHECK(load_strain(Problem::microcrack, F0) == Lc * F0);
  CHECK(load_strain(Problem::divacancy, F0) == Ld * F0);
  CHECK(load_strain(Problem::divacancy, F0, 0.0) == F0);
  CHECK(load_strain(Problem::microcrack, F0, 0.0) == F0);
  CHECK(defect_of(Problem::microcrack) == DefectKind::microcrack11);
  CHECK_THROWS_AS(parse_problem("vacancy"), Error);
}

TEST_CASE("the ground state is an equilibrium of the perfect lattice") {
  const EamModel m;
  const Mat2 F0 = find_ground_state(m);
  const LatticeDomain d = LatticeDomain::generate(20, DefectKind::none);
  const NeighborTable nbrs(d, m.density_cutoff, m.pair_cutoff);
  const PlanObjective obj(atomistic_plan(m, d, nbrs, domain_free_mask(d), F0));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(obj.size()));
  Eigen::VectorXd g;
  obj.value_gradient(x, g);
  CHECK(g.lpNorm<Eigen::Infinity>() < 1e-10);
  const SolveReport r = minimize(obj, x);
  CHECK(x.lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(r.grad_sup < 1e-10);
}

TEST_CASE("reference solution of the divacancy") {
  const BenchmarkSetup& s = divacancy20();
  const AtomisticSolution& a = divacancy20_reference();
  CHECK(a.report.grad_sup < 1e-10);
  CHECK(a.dof == s.domain.free_sites().size());
  const double homogeneous = atomistic_energy(s, homogeneous_deformation(s.domain, s.F));
  CHECK(a.energy < homogeneous);
  CHECK(a.energy == doctest::Approx(atomistic_energy(s, a.y)).epsilon(1e-14));
}

TEST_CASE("reduced atomistic problem at the full radius is the reference") {
  const BenchmarkSetup& s = divacancy20();
  const AtomisticSolution atm = solve_atm(s, 20);
  const ErrorNorms e = error_norms(s, divacancy20_reference().y, atm.y);
  CHECK(e.w12 < 1e-8);
  CHECK(e.w1inf < 1e-8);
  const AtomisticSolution small = solve_atm(s, 8);
  const ErrorNorms es = error_norms(s, divacancy20_reference().y, small.y);
  CHECK(es.w12 > e.w12);
  CHECK(small.dof < atm.dof);
}

TEST_CASE("error norms") {
  const BenchmarkSetup& s = divacancy20();
  const Deformation& y = divacancy20_reference().y;
  const ErrorNorms zero = error_norms(s, y, y);
  CHECK(zero.w12 == 0.0);
  CHECK(zero.w1inf == 0.0);

  Mat2 G;
  G << 0.01, -0.02, 0.005, 0.03;
  const ErrorNorms aff = seminorms(s.domain, s.micro, shifted(s.domain, y, G), y);
  const double area = static_cast<double>(s.micro.size()) * std::sqrt(3.0) / 4.0;
  CHECK(aff.w1inf_abs == doctest::Approx(G.norm()).epsilon(1e-10));
  CHECK(aff.w12_abs == doctest::Approx(G.norm() * std::sqrt(area)).epsilon(1e-10));

  // triangle inequality on random fields
  auto g = test::rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    Deformation a = y;
    Deformation b = y;
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] += Vec2(test::uniform(g, -0.01, 0.01), test::uniform(g, -0.01, 0.01));
      b[i] += Vec2(test::uniform(g, -0.01, 0.01), test::uniform(g, -0.01, 0.01));
    }
    const ErrorNorms ab = seminorms(s.domain, s.micro, a, b);
    const ErrorNorms ay = seminorms(s.domain, s.micro, a, y);
    const ErrorNorms yb = seminorms(s.domain, s.micro, y, b);
    CHECK(ab.w12_abs <= ay.w12_abs + yb.w12_abs + 1e-14);
    CHECK(ab.w1inf_abs <= ay.w1inf_abs + yb.w1inf_abs + 1e-14);
  }

  const Deformation homogeneous = homogeneous_deformation(s.domain, s.F);
  CHECK_THROWS_AS(error_norms(s, homogeneous, y), Error);
}

TEST_CASE("slope fitting") {
  std::vector<double> x;
  std::vector<double> y;
  for (int k = 1; k <= 6; ++k) {
    x.push_back(100.0 * k * k);
    y.push_back(std::pow(100.0 * k * k, -0.5));
  }
  CHECK(fit_slope(x, y) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(std::abs(fit_slope(x, std::vector<double>(6, 2.0))) < 1e-12);

  // only the upper half counts: a wild first half is ignored
  std::vector<double> y2 = y;
  y2[0] = 1e5;
  y2[1] = 1e-5;
  CHECK(fit_slope(x, y2) == doctest::Approx(-0.5).epsilon(1e-12));

  // random power laws
  auto g = test::rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const double p = test::uniform(g, -2.0, 0.5);
    std::vector<double> xs;
    std::vector<double> ys;
    for (int k = 0; k < 7; ++k) {
      xs.push_back(test::uniform(g, 10.0, 1e4));
      ys.push_back(3.0 * std::pow(xs.back(), p));
    }
    CHECK(fit_slope(xs, ys) == doctest::Approx(p).epsilon(1e-10).scale(1.0));
  }

  CHECK_THROWS_AS(fit_slope({1.0, 2.0, 3.0, 4.0}, {1.0, 2.0, 3.0, 4.0}), Error);
  CHECK_THROWS_AS(fit_slope({1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, {1.0, 2.0, 3.0, 0.0, 5.0, 6.0}), Error);
  CHECK_THROWS_AS(fit_slope({1.0, 2.0}, {1.0}), Error);
}

TEST_CASE("CSV round trip") {
  std::vector<ConvergenceRecord> recs(3);
  for (int k = 0; k < 3; ++k) {
    recs[k].method = k == 0 ? "atm" : "bqce-smooth";
    recs[k].K0 = 3 + k;
    recs[k].K1 = k == 0 ? 0 : 3 + k;
    recs[k].dof = 100u * (k + 1);
    recs[k].err_w12 = 0.1 / (k + 1);
    recs[k].err_w1inf = 0.3 / (k + 1);
    recs[k].err_energy_abs = 1e-3 / (k + 1);
    recs[k].err_energy_signed = -1e-3 / (k + 1);
    recs[k].energy = -1234.5678901234 + k;
    recs[k].wall_time_s = 0.25 * k;
  }
  std::stringstream ss;
  write_csv(ss, recs);
  std::string first;
  std::getline(std::stringstream(ss.str()), first);
  CHECK(first == kCsvHeader);
  const auto back = read_csv(ss);
  REQUIRE(back.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(back[k].method == recs[k].method);
    CHECK(back[k].K0 == recs[k].K0);
    CHECK(back[k].K1 == recs[k].K1);
    CHECK(back[k].dof == recs[k].dof);
    CHECK(back[k].err_w12 == doctest::Approx(recs[k].err_w12).epsilon(1e-14));
    CHECK(back[k].err_energy_signed == doctest::Approx(recs[k].err_energy_signed).epsilon(1e-14));
    CHECK(back[k].energy == doctest::Approx(recs[k].energy).epsilon(1e-14));
  }
  std::stringstream bad("method,K0\n");
  CHECK_THROWS_AS(read_csv(bad), Error);
  std::stringstream short_line(std::string(kCsvHeader) + "\natm,3,0\n");
  CHECK_THROWS_AS(read_csv(short_line), Error);
}

TEST_CASE("configuration") {
  RunConfig c = parse_config(R"({"problem": "microcrack", "N": 40, "method": "bqce-linear", "K0": [3, 5],
                                 "p": "inf", "model": {"a": 4.0}, "solver": {"gtol": 1e-9}})");
  CHECK(c.problem == "microcrack");
  CHECK(c.N == 40);
  CHECK(c.K0 == std::vector<int>{3, 5});
  CHECK(std::isinf(c.p));
  CHECK(c.model.a == 4.0);
  CHECK(c.model.b == 3.0);
  CHECK(c.solver.gtol == 1e-9);
  validate(c);

  const RunConfig back = parse_config(dump_config(c));
  CHECK(back.problem == c.problem);
  CHECK(back.N == c.N);
  CHECK(back.method == c.method);
  CHECK(back.K0 == c.K0);
  CHECK(std::isinf(back.p));
  CHECK(back.model.a == c.model.a);
  CHECK(back.solver.gtol == c.solver.gtol);
  CHECK(back.seed == c.seed);

  CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), Error);
  CHECK_THROWS_AS(parse_config("[1, 2]"), Error);
  CHECK_THROWS_AS(parse_config("{not json"), Error);
  RunConfig small = c;
  small.N = 10;
  CHECK_THROWS_AS(validate(small), Error);
  RunConfig wide = c;
  wide.K0 = {30};
  CHECK_THROWS_AS(validate(wide), Error);
  RunConfig unknown = c;
  unknown.method = "bqce-cubic";
  CHECK_THROWS_AS(validate(unknown), Error);
}

TEST_CASE("state and dump files") {
  auto g = test::rng(6);
  std::vector<StateEntry> st;
  for (int k = 0; k < 20; ++k) st.push_back({k * 3, Vec2(test::uniform(g, -1.0, 1.0), test::uniform(g, -1.0, 1.0))});
  std::stringstream ss;
  write_state(ss, st);
  const auto back = read_state(ss);
  REQUIRE(back.size() == st.size());
  for (std::size_t k = 0; k < st.size(); ++k) {
    CHECK(back[k].id == st[k].id);
    CHECK((back[k].u - st[k].u).norm() < 1e-14);
  }
  std::stringstream bad("1 0.5\n");
  CHECK_THROWS_AS(read_state(bad), Error);

  const LatticeDomain d = LatticeDomain::generate(8, DefectKind::divacancy);
  std::stringstream dump;
  write_lattice_dump(dump, d);
  std::string word;
  std::size_t count = 0;
  dump >> word >> count;
  CHECK(word == "sites");
  CHECK(count == d.hexagon_site_count());
  std::string line;
  for (std::size_t k = 0; k <= count; ++k) std::getline(dump, line);
  dump >> word >> count;
  CHECK(word == "elements");
  CHECK(count == 6u * 64u - 10u);
}

TEST_CASE("coupled sweeps") {
  const BenchmarkSetup& s = divacancy20();
  const AtomisticSolution& ref = divacancy20_reference();
  CoupledSettings settings;
  const auto qce = run_coupled(s, ref, BlendKind::qce, {2, 3, 4}, settings);
  REQUIRE(qce.size() == 3);
  for (const auto& r : qce) {
    CHECK(r.method == "qce");
    CHECK(r.K1 == 0);
  }
  const auto smooth = run_coupled(s, ref, BlendKind::smooth, {2, 3, 4}, settings);
  REQUIRE(smooth.size() == 3);
  for (std::size_t k = 0; k < smooth.size(); ++k) {
    CHECK(smooth[k].method == "bqce-smooth");
    CHECK(smooth[k].K1 == smooth[k].K0);
    CHECK(smooth[k].grad_sup < 1e-10);
    CHECK(smooth[k].monotone);
    CHECK(smooth[k].volume_residual < 1e-10);
    if (k > 0) CHECK(smooth[k].dof > smooth[k - 1].dof);
  }

  // a K0 that does not fit is logged and skipped
  std::ostringstream log;
  const auto skipped = run_coupled(s, ref, BlendKind::smooth, {3, 12}, settings, &log);
  CHECK(skipped.size() == 1);
  CHECK(!log.str().empty());

  const auto atm = run_atm(s, ref, {8, 12, 16}, {});
  REQUIRE(atm.size() == 3);
  for (const auto& r : atm) {
    CHECK(r.method == "atm");
    CHECK(r.err_w12 > 0.0);
  }
  CHECK(atm[2].err_w12 < atm[0].err_w12);
}

}  // TEST_SUITE
