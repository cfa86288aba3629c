#include <doctest.h>

#include <Eigen/Dense>

#include "bqce/blending.hpp"
#include "support.hpp"

using namespace bqce;

namespace {

constexpr LatticeIndex kDirs[3] = {{1, 0}, {0, 1}, {-1, 1}};

// Second-difference roughness written independently: table sites only,
// missing stencil points read 1.
double roughness(const LatticeDomain& d, const std::vector<double>& beta) {
  double phi = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const LatticeIndex c = d.index(static_cast<int>(i));
    for (auto a : kDirs) {
      const int p = d.find({c.n1 + a.n1, c.n2 + a.n2});
      const int q = d.find({c.n1 - a.n1, c.n2 - a.n2});
      const double v = (p >= 0 ? beta[p] : 1.0) - 2.0 * beta[i] + (q >= 0 ? beta[q] : 1.0);
      phi += v * v;
    }
  }
  return phi;
}

void check_admissible(const Regions& r, const BlendField& f) {
  for (std::size_t i = 0; i < f.beta.size(); ++i) {
    CHECK(f.beta[i] >= 0.0);
    CHECK(f.beta[i] <= 1.0);
    if (r.label[i] == Region::atomistic) CHECK(f.beta[i] == 0.0);
    if (r.label[i] == Region::continuum) CHECK(f.beta[i] == 1.0);
  }
}

}  // namespace

TEST_SUITE("blending") {

TEST_CASE("region classification") {
  const LatticeDomain d = LatticeDomain::generate(20, DefectKind::divacancy);
  const Regions r = classify_regions(d, 3, 4);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int dist = r.distance[i];
    CHECK((r.label[i] == Region::atomistic) == (dist <= 3));
    CHECK((r.label[i] == Region::blend) == (dist > 3 && dist <= 7));
  }
  const Regions none = classify_regions(d, 3, 0);
  CHECK(std::count(none.label.begin(), none.label.end(), Region::blend) == 0);

  std::ptrdiff_t prev = 0;
  for (int K0 = 1; K0 <= 10; ++K0) {
    const Regions rk = classify_regions(d, K0, 2);
    const auto n = std::count(rk.label.begin(), rk.label.end(), Region::atomistic);
    CHECK(n >= prev);
    prev = n;
  }
  CHECK_THROWS_AS(classify_regions(d, 10, 10), Error);
}

TEST_CASE("QCE blend") {
  const LatticeDomain d = LatticeDomain::generate(20, DefectKind::divacancy);
  const Regions r = classify_regions(d, 4, 0);
  const BlendField f = beta_qce(r);
  check_admissible(r, f);
  for (double b : f.beta) CHECK((b == 0.0 || b == 1.0));
  CHECK(f.beta[d.find({-1, 0})] == 0.0);
  CHECK(f.beta[d.find({20, 0})] == 1.0);
}

TEST_CASE("linear blend") {
  const LatticeDomain d = LatticeDomain::generate(30, DefectKind::none);
  const Regions r = classify_regions(d, 3, 6);
  const BlendField f = beta_linear(r);
  check_admissible(r, f);
  CHECK(f.beta[d.find({3, 0})] == 0.0);
  CHECK(f.beta[d.find({6, 0})] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f.beta[d.find({9, 0})] == 1.0);
  CHECK(f.beta[d.find({15, 0})] == 1.0);
  CHECK_THROWS_AS(beta_linear(classify_regions(d, 3, 0)), Error);
}

TEST_CASE("smooth blend minimises the roughness") {
  const LatticeDomain d = LatticeDomain::generate(24, DefectKind::microcrack11);
  const Regions r = classify_regions(d, 3, 5);
  const BlendField s = beta_smooth(d, r);
  const BlendField l = beta_linear(r);
  check_admissible(r, s);
  CHECK(roughness(d, s.beta) == doctest::Approx(blend_roughness(d, s.beta)).epsilon(1e-12));
  CHECK(roughness(d, s.beta) <= roughness(d, l.beta));
  CHECK(s.overshoot >= 0.0);

  // admissible perturbations inside the blend region never lower it, unless
  // the unperturbed field was clamped
  if (s.overshoot == 0.0) {
    auto g = test::rng(4);
    const double base = roughness(d, s.beta);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> b = s.beta;
      for (std::size_t i = 0; i < b.size(); ++i)
        if (r.label[i] == Region::blend) b[i] += test::uniform(g, -1e-3, 1e-3);
      CHECK(roughness(d, b) >= base - 1e-12);
    }
  }
}

TEST_CASE("smooth blend agrees with a dense quadratic solve") {
  const LatticeDomain d = LatticeDomain::generate(12, DefectKind::divacancy);
  const Regions r = classify_regions(d, 2, 3);
  std::vector<int> unknown;
  std::vector<double> base(d.size(), 1.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (r.label[i] == Region::atomistic) base[i] = 0.0;
    if (r.label[i] == Region::blend) {
      unknown.push_back(static_cast<int>(i));
      base[i] = 0.0;
    }
  }
  // roughness is quadratic in the unknowns: recover A and b by polarisation
  const int n = static_cast<int>(unknown.size());
  auto eval = [&](const Eigen::VectorXd& x) {
    std::vector<double> b = base;
    for (int k = 0; k < n; ++k) b[unknown[k]] = x[k];
    return roughness(d, b);
  };
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const double c = eval(zero);
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd lin(n);
  std::vector<double> diag(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd e = zero;
    e[k] = 1.0;
    const double fp = eval(e);
    const double fm = eval(-e);
    diag[k] = 0.5 * (fp + fm) - c;
    lin[k] = 0.5 * (fp - fm);
    A(k, k) = diag[k];
  }
  for (int k = 0; k < n; ++k)
    for (int j = k + 1; j < n; ++j) {
      Eigen::VectorXd e = zero;
      e[k] = 1.0;
      e[j] = 1.0;
      A(k, j) = A(j, k) = 0.5 * (eval(e) - c - lin[k] - lin[j] - diag[k] - diag[j]);
    }
  const Eigen::VectorXd x = A.ldlt().solve(-0.5 * lin);
  const BlendField s = beta_smooth(d, r);
  for (int k = 0; k < n; ++k) CHECK(s.beta[unknown[k]] == doctest::Approx(std::clamp(x[k], 0.0, 1.0)).epsilon(1e-9));
}

TEST_CASE("smooth blend is monotone along a radial ray") {
  const LatticeDomain d = LatticeDomain::generate(40, DefectKind::none);
  const Regions r = classify_regions(d, 4, 8);
  const BlendField s = beta_smooth(d, r);
  for (int k = 0; k < 20; ++k) CHECK(s.beta[d.find({k + 1, 0})] >= s.beta[d.find({k, 0})] - 1e-12);
}

TEST_CASE("roughness decreases with blend width") {
  const LatticeDomain d = LatticeDomain::generate(60, DefectKind::none);
  for (int k : {4, 8}) {
    const double narrow = roughness(d, beta_smooth(d, classify_regions(d, 4, k)).beta);
    const double wide = roughness(d, beta_smooth(d, classify_regions(d, 4, 2 * k)).beta);
    CHECK(wide < narrow);
  }
}

TEST_CASE("parameter selection") {
  const ParameterPlan t = select_parameters(3.0, 2.0, 8, 100, ParameterRule::table);
  CHECK(t.gamma == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(t.K1 == 8);
  CHECK(t.mesh_exponent == t.gamma);

  const ParameterPlan mu = select_parameters(3.0, 2.0, 4, 100, ParameterRule::mu);
  CHECK(mu.mu == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(mu.K1 == 16);

  const ParameterPlan g1 = select_parameters(2.0, 2.0, 5, 100, ParameterRule::table);
  CHECK(g1.gamma == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g1.K1 == static_cast<int>(std::ceil(5.0 * std::sqrt(std::log(20.0)))));

  const ParameterPlan inf = select_parameters(3.0, std::numeric_limits<double>::infinity(), 4, 100,
                                              ParameterRule::table);
  CHECK(inf.gamma == 3.0);

  CHECK_THROWS_AS(select_parameters(3.0, 3.0, 4, 100, ParameterRule::table), Error);
  CHECK_THROWS_AS(parse_rule("optimal"), Error);
  CHECK(parse_blend("bqce-smooth") == BlendKind::smooth);
}

}  // TEST_SUITE
