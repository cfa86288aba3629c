#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "bqce/cauchy_born.hpp"
#include "support.hpp"

using namespace bqce;

namespace {

Mat2 rotation(double t) {
  Mat2 Q;
  Q << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return Q;
}

Mat2 random_strain(std::mt19937_64& g, double amp) {
  Mat2 F = Mat2::Identity();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) F(i, j) += test::uniform(g, -amp, amp);
  return F;
}

// Minimiser of t -> W(tI) by golden-section search, independent of the
// library's Newton iteration.
double golden_minimiser(const EamModel& m, double lo, double hi) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo;
  double b = hi;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  auto W = [&](double t) { return cb_energy(m, t * Mat2::Identity()); };
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    if (W(c) < W(d)) b = d; else a = c;
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_SUITE("cauchy_born") {

TEST_CASE("density equals the site energy per cell area") {
  const EamModel m;
  const LatticeDomain d = LatticeDomain::generate(6, DefectKind::none);
  const NeighborTable nbrs(d, m.density_cutoff, m.pair_cutoff);
  auto g = test::rng(17);
  for (int trial = 0; trial < 8; ++trial) {
    const Mat2 F = trial == 0 ? Mat2::Identity() : random_strain(g, 0.05);
    const double e = site_energy(m, nbrs, homogeneous_deformation(d, F), d.find({0, 0}));
    CHECK(cb_energy(m, F) * kCellArea == doctest::Approx(e).epsilon(1e-12));
    CHECK(cb_density(m, F).W == doctest::Approx(cb_energy(m, F)).epsilon(1e-14));
  }
}

TEST_CASE("frame indifference") {
  const EamModel m;
  auto g = test::rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat2 F = random_strain(g, 0.05);
    const Mat2 Q = rotation(test::uniform(g, 0.0, 2.0 * M_PI));
    CHECK(cb_energy(m, Q * F) == doctest::Approx(cb_energy(m, F)).epsilon(1e-12));
  }
}

TEST_CASE("stress and tangent match finite differences") {
  const EamModel m;
  auto g = test::rng(8);
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const Mat2 F = random_strain(g, 0.05);
    const StrainState s = cb_density(m, F, true);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Mat2 Fp = F;
        Mat2 Fm = F;
        Fp(i, j) += h;
        Fm(i, j) -= h;
        const double fd = (cb_energy(m, Fp) - cb_energy(m, Fm)) / (2 * h);
        CHECK(s.dW(i, j) == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
        const Mat2 dfd = (cb_density(m, Fp, false).dW - cb_density(m, Fm, false).dW) / (2 * h);
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
            CHECK(s.d2W(2 * k + l, 2 * i + j) == doctest::Approx(dfd(k, l)).epsilon(1e-6).scale(1.0));
      }
    CHECK((s.d2W - s.d2W.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("ground state") {
  const EamModel m;
  const Mat2 F0 = find_ground_state(m);
  const double t0 = F0(0, 0);
  CHECK(F0(1, 1) == t0);
  CHECK(F0(0, 1) == 0.0);
  CHECK(t0 == doctest::Approx(golden_minimiser(m, 0.8, 1.2)).epsilon(1e-7));
  const StrainState s = cb_density(m, F0, true);
  CHECK(std::abs(s.dW.trace()) < 1e-10);
  CHECK(cb_energy(m, F0) <= cb_energy(m, 0.95 * F0));
  CHECK(cb_energy(m, F0) <= cb_energy(m, 1.05 * F0));
  const Eigen::SelfAdjointEigenSolver<Tensor4> eig(s.d2W);
  CHECK(eig.eigenvalues().minCoeff() > -1e-8);
}

TEST_CASE("inverted strain is rejected") {
  const EamModel m;
  Mat2 F;
  F << -1.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(cb_density(m, F), EvaluationError);
}

}  // TEST_SUITE
