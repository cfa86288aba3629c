#include <doctest.h>

#include <cmath>

#include "bqce/eam.hpp"
#include "support.hpp"

using namespace bqce;

namespace {

// Closed forms written out independently of the model code.
double phi_ref(double a, double r) { return std::exp(-2.0 * a * (r - 1.0)) - 2.0 * std::exp(-a * (r - 1.0)); }
double rho_ref(double b, double r) { return std::exp(-b * r); }
double embed_ref(double c, double rb0, double s) {
  const double t = s - rb0;
  return c * (t * t + t * t * t * t);
}

SiteStencil random_stencil(std::mt19937_64& g) {
  SiteStencil st;
  const double shells[3] = {1.0, std::sqrt(3.0), 2.0};
  for (int s = 0; s < 3; ++s) {
    for (int k = 0; k < 6; ++k) {
      const double ang = (k + 0.5 * s) * M_PI / 3.0;
      Vec2 d = shells[s] * Vec2(std::cos(ang), std::sin(ang));
      d += Vec2(test::uniform(g, -0.08, 0.08), test::uniform(g, -0.08, 0.08));
      st.push(d, true, s < 2);
    }
  }
  return st;
}

}  // namespace

TEST_SUITE("eam") {

TEST_CASE("pair, density and embedding values") {
  const EamModel m;
  CHECK(m.phi(1.0).value == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(m.phi(1.0).d1) < 1e-14);
  CHECK(m.phi(2.0).value == doctest::Approx(std::exp(-8.8) - 2.0 * std::exp(-4.4)).epsilon(1e-14));
  CHECK(m.rho(1.0).value == doctest::Approx(0.049787068367863944).epsilon(1e-15));
  CHECK(std::abs(m.embed(m.rho_bar_0).value) < 1e-300);
  CHECK(std::abs(m.embed(m.rho_bar_0).d1) < 1e-300);
  const double rb0 = 6.0 * std::exp(-3.0);
  CHECK(m.embed(0.0).value == doctest::Approx(5.0 * (rb0 * rb0 + std::pow(rb0, 4))).epsilon(1e-14));
  CHECK(EamModel::with(4.4, 2.0, 5.0).rho_bar_0 == doctest::Approx(6.0 * std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("jet derivatives match central differences") {
  const EamModel m;
  const double h = 1e-6;
  for (double r : {0.8, 1.0, 1.3, 1.9, 2.4}) {
    CHECK(m.phi(r).d1 == doctest::Approx((phi_ref(m.a, r + h) - phi_ref(m.a, r - h)) / (2 * h)).epsilon(1e-7));
    CHECK(m.phi(r).d2 == doctest::Approx((m.phi(r + h).d1 - m.phi(r - h).d1) / (2 * h)).epsilon(1e-6));
    CHECK(m.rho(r).d1 == doctest::Approx((rho_ref(m.b, r + h) - rho_ref(m.b, r - h)) / (2 * h)).epsilon(1e-7));
    CHECK(m.rho(r).d2 == doctest::Approx((m.rho(r + h).d1 - m.rho(r - h).d1) / (2 * h)).epsilon(1e-6));
  }
  for (double s : {0.0, 0.2, 0.3, 0.6}) {
    const double fd = (embed_ref(m.c, m.rho_bar_0, s + h) - embed_ref(m.c, m.rho_bar_0, s - h)) / (2 * h);
    CHECK(m.embed(s).d1 == doctest::Approx(fd).epsilon(1e-7));
    CHECK(m.embed(s).d2 == doctest::Approx((m.embed(s + h).d1 - m.embed(s - h).d1) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("perfect-lattice site energy by shell summation") {
  const EamModel m;
  const LatticeDomain d = LatticeDomain::generate(6, DefectKind::none);
  const NeighborTable nbrs(d, m.density_cutoff, m.pair_cutoff);
  const Deformation y = homogeneous_deformation(d, Mat2::Identity());
  const double s3 = std::sqrt(3.0);
  const double expected = 3.0 * (phi_ref(4.4, 1.0) + phi_ref(4.4, s3) + phi_ref(4.4, 2.0)) +
                          embed_ref(5.0, 6.0 * std::exp(-3.0), 6.0 * rho_ref(3.0, 1.0) + 6.0 * rho_ref(3.0, s3));
  CHECK(site_energy(m, nbrs, y, d.find({0, 0})) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("an isolated atom carries G(0)") {
  const EamModel m;
  SiteStencil empty;
  CHECK(eam_site_energy(m, empty) == doctest::Approx(m.embed(0.0).value).epsilon(1e-15));
}

TEST_CASE("homogeneous deformations give equal interior site energies") {
  const EamModel m;
  const LatticeDomain d = LatticeDomain::generate(8, DefectKind::none);
  const NeighborTable nbrs(d, m.density_cutoff, m.pair_cutoff);
  Mat2 F;
  F << 1.02, 0.05, -0.01, 0.97;
  const Deformation y = homogeneous_deformation(d, F);
  const double e0 = site_energy(m, nbrs, y, d.find({0, 0}));
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int id = static_cast<int>(i);
    if (hex_norm(d.index(id)) <= 6) CHECK(site_energy(m, nbrs, y, id) == doctest::Approx(e0).epsilon(1e-13));
  }
}

TEST_CASE("site gradient and Hessian match finite differences") {
  const EamModel m;
  auto g = test::rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const SiteStencil st = random_stencil(g);
    SiteDerivatives der;
    eam_site_energy(m, st, &der, true);
    const double h = 1e-6;
    double worst_g = 0.0;
    double worst_h = 0.0;
    for (std::size_t k = 0; k < st.count; ++k) {
      for (int c = 0; c < 2; ++c) {
        SiteStencil p = st;
        SiteStencil q = st;
        p.d[k][c] += h;
        q.d[k][c] -= h;
        const double fd = (eam_site_energy(m, p) - eam_site_energy(m, q)) / (2 * h);
        worst_g = std::max(worst_g, std::abs(fd - der.grad[k][c]));
        SiteDerivatives dp;
        SiteDerivatives dq;
        eam_site_energy(m, p, &dp, false);
        eam_site_energy(m, q, &dq, false);
        for (std::size_t l = 0; l < st.count; ++l)
          for (int e = 0; e < 2; ++e) {
            const double fdh = (dp.grad[l][e] - dq.grad[l][e]) / (2 * h);
            worst_h = std::max(worst_h, std::abs(fdh - der.hess(2 * l + e, 2 * k + c)));
          }
      }
    }
    CHECK(worst_g < 1e-8);
    CHECK(worst_h < 1e-6);
    CHECK((der.hess - der.hess.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("coincident atoms are a hard error") {
  const EamModel m;
  SiteStencil st;
  st.push(Vec2(1.0, 0.0), true, true);
  st.push(Vec2(0.0, 0.0), true, true);
  CHECK_THROWS_AS(eam_site_energy(m, st), CoincidentAtoms);
}

}  // TEST_SUITE
