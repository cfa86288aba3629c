#include "bqce/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

namespace bqce::verify {

namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CheckResult bound(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value < tol, value, tol, std::move(detail)};
}

Mat2 rotation(double angle) {
  Mat2 Q;
  Q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return Q;
}

// Every point of the plan becomes an unknown: the energy is then a function
// of all positions, which is what the invariance checks need.
AssemblyPlan unconstrained(AssemblyPlan plan) {
  plan.unknowns = 2 * plan.ref.size();
  for (std::size_t p = 0; p < plan.ref.size(); ++p) plan.dof[p] = static_cast<int>(2 * p);
  return plan;
}

struct Strains {
  Mat2 F0;
  Mat2 crack;
  Mat2 divac;
};

Strains strains(const EamModel& model) {
  const Mat2 F0 = find_ground_state(model);
  Mat2 Lc;
  Lc << 1.0, 0.03, 0.0, 1.03;
  Mat2 Ld;
  Ld << 1.03, 0.03, 0.0, 1.03;
  return {F0, Lc * F0, Ld * F0};
}

}  // namespace

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

void print(std::ostream& out, const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << std::setprecision(3) << std::scientific << r.value
        << " (bound " << r.tolerance << ")" << std::defaultfloat;
    if (!r.detail.empty()) out << " " << r.detail;
    out << '\n';
  }
}

Eigen::VectorXd random_vector(std::size_t n, double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  return v;
}

double gradient_fd_error(const Objective& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g;
  f.value_gradient(x, g);
  Eigen::VectorXd fd(g.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    const double ep = f.value(xp);
    xp[i] = x[i] - h;
    const double em = f.value(xp);
    xp[i] = x[i];
    fd[i] = (ep - em) / (2.0 * h);
  }
  return inf_norm(g - fd) / std::max(inf_norm(g), 1e-300);
}

double hessian_fd_error(const Objective& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v, double h) {
  const Eigen::VectorXd Hv = f.hessian(x) * v;
  Eigen::VectorXd gp;
  Eigen::VectorXd gm;
  f.value_gradient(x + h * v, gp);
  f.value_gradient(x - h * v, gm);
  const Eigen::VectorXd fd = (gp - gm) / (2.0 * h);
  return inf_norm(Hv - fd) / std::max(inf_norm(Hv), 1e-300);
}

double hessian_asymmetry(const SparseMatrix& H) {
  const SparseMatrix Ht = H.transpose();
  const SparseMatrix D = H - Ht;
  double dmax = 0.0;
  for (Eigen::Index k = 0; k < D.nonZeros(); ++k) dmax = std::max(dmax, std::abs(D.valuePtr()[k]));
  double hmax = 0.0;
  for (Eigen::Index k = 0; k < H.nonZeros(); ++k) hmax = std::max(hmax, std::abs(H.valuePtr()[k]));
  return dmax / std::max(hmax, 1e-300);
}

CoupledFixture coupled_fixture(const EamModel& model, int N, DefectKind defect, BlendKind kind, int K0, int K1,
                               const Mat2& F) {
  CoupledFixture fx;
  fx.domain = LatticeDomain::generate(N, defect);
  fx.nbrs = NeighborTable(fx.domain, model.density_cutoff, model.pair_cutoff);
  fx.regions = classify_regions(fx.domain, K0, K1);
  fx.blend = make_blend(fx.domain, fx.regions, kind);
  const ParameterPlan pp = select_parameters(3.0, 2.0, std::max(K0, 1), N, ParameterRule::table);
  fx.mesh = build_graded_mesh(fx.domain, fx.regions, pp);
  effective_volumes(fx.mesh, fx.blend, fx.domain);
  fx.plan = bqce_plan(model, fx.domain, fx.nbrs, fx.mesh, fx.blend, F);
  return fx;
}

std::vector<CheckResult> gradient_suite(std::uint64_t seed, int states) {
  const EamModel model;
  const Strains S = strains(model);
  std::mt19937_64 rng(seed);
  double atm_g = 0.0;
  double atm_h = 0.0;
  double bq_g = 0.0;
  double bq_h = 0.0;
  for (int k = 0; k < states; ++k) {
    const bool crack = k % 2 == 0;
    const DefectKind defect = crack ? DefectKind::microcrack11 : DefectKind::divacancy;
    const Mat2& F = crack ? S.crack : S.divac;

    const LatticeDomain dom = LatticeDomain::generate(10, defect);
    const NeighborTable nbrs(dom, model.density_cutoff, model.pair_cutoff);
    const PlanObjective atm(atomistic_plan(model, dom, nbrs, domain_free_mask(dom), F));
    const Eigen::VectorXd xa = random_vector(atm.size(), 0.03, rng);
    atm_g = std::max(atm_g, gradient_fd_error(atm, xa));
    atm_h = std::max(atm_h, hessian_fd_error(atm, xa, random_vector(atm.size(), 1.0, rng)));

    const BlendKind kind = static_cast<BlendKind>(k % 3);
    const int K1 = kind == BlendKind::qce ? 0 : 3;
    const CoupledFixture fx = coupled_fixture(model, 20, defect, kind, 3, K1, F);
    const PlanObjective bq(fx.plan);
    const Eigen::VectorXd xb = random_vector(bq.size(), 0.03, rng);
    bq_g = std::max(bq_g, gradient_fd_error(bq, xb));
    bq_h = std::max(bq_h, hessian_fd_error(bq, xb, random_vector(bq.size(), 1.0, rng)));
  }
  const std::string n = std::to_string(states) + " states";
  return {bound("atomistic gradient vs central differences", atm_g, 1e-6, n),
          bound("atomistic Hessian-vector vs differenced gradient", atm_h, 1e-5, n),
          bound("blended gradient vs central differences", bq_g, 1e-6, n),
          bound("blended Hessian-vector vs differenced gradient", bq_h, 1e-5, n)};
}

std::vector<CheckResult> invariants_suite(std::uint64_t seed) {
  const EamModel model;
  const Strains S = strains(model);
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;

  // homogeneous exactness on a defect-free domain
  {
    double worst = 0.0;
    std::string where;
    const LatticeDomain dom = LatticeDomain::generate(20, DefectKind::none);
    const NeighborTable nbrs(dom, model.density_cutoff, model.pair_cutoff);
    const std::array<std::pair<const char*, Mat2>, 3> Fs{{{"F0", S.F0}, {"crack", S.crack}, {"divacancy", S.divac}}};
    const std::array<std::pair<BlendKind, int>, 4> combos{
        {{BlendKind::qce, 0}, {BlendKind::qce, 4}, {BlendKind::linear, 4}, {BlendKind::smooth, 4}}};
    for (const auto& [fname, F] : Fs) {
      const AssemblyPlan ap = atomistic_plan(model, dom, nbrs, domain_free_mask(dom), F);
      const double Ea = kernels::serial::energy(ap, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ap.unknowns)));
      for (const auto& [kind, K1] : combos) {
        const CoupledFixture fx = coupled_fixture(model, 20, DefectKind::none, kind, 4, K1, F);
        const double Eb =
            kernels::serial::energy(fx.plan, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fx.plan.unknowns)));
        const double r = rel(Eb, Ea);
        if (r >= worst) {
          worst = r;
          where = std::string("worst at F=") + fname + ", " + std::string(to_string(kind)) + " K1=" +
                  std::to_string(K1);
        }
      }
    }
    out.push_back(bound("homogeneous exactness (N=20, K0=4)", worst, 1e-10, where));
  }

  // beta = 0 on the micro mesh reduces to the atomistic energy
  for (DefectKind defect : {DefectKind::microcrack11, DefectKind::divacancy}) {
    const LatticeDomain dom = LatticeDomain::generate(20, defect);
    const NeighborTable nbrs(dom, model.density_cutoff, model.pair_cutoff);
    Mesh mesh = build_micro_mesh(dom);
    BlendField zero;
    zero.beta.assign(dom.size(), 0.0);
    effective_volumes(mesh, zero, dom);
    const AssemblyPlan bp = bqce_plan(model, dom, nbrs, mesh, zero, S.divac);
    const AssemblyPlan ap = atomistic_plan(model, dom, nbrs, domain_free_mask(dom), S.divac);

    // both unknown vectors hold the same per-site displacement
    Eigen::VectorXd ua = random_vector(ap.unknowns, 0.03, rng);
    Eigen::VectorXd ub = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bp.unknowns));
    std::vector<std::pair<int, int>> map;  // (blended dof, atomistic dof)
    for (std::size_t v = 0; v < mesh.node_count(); ++v) {
      const int db = bp.dof[v];
      if (db < 0) continue;
      const int da = ap.dof[mesh.node_site[v]];
      if (da < 0) throw Error("invariants: free node without an atomistic dof");
      map.emplace_back(db, da);
      ub.segment<2>(db) = ua.segment<2>(da);
    }
    const bool same_count = map.size() * 2 == ap.unknowns && bp.unknowns == ap.unknowns;

    Eigen::VectorXd ga;
    Eigen::VectorXd gb;
    const double Ea = kernels::serial::energy_gradient(ap, ua, ga);
    const double Eb = kernels::serial::energy_gradient(bp, ub, gb);
    double gerr = 0.0;
    for (auto [db, da] : map) gerr = std::max(gerr, (gb.segment<2>(db) - ga.segment<2>(da)).cwiseAbs().maxCoeff());
    gerr /= std::max(inf_norm(ga), 1e-300);

    const SparseMatrix Ha = kernels::serial::hessian(ap, hessian_pattern(ap), ua);
    const SparseMatrix Hb = kernels::serial::hessian(bp, hessian_pattern(bp), ub);
    std::vector<int> a_of_b(bp.unknowns, -1);
    for (auto [db, da] : map) {
      a_of_b[db] = da;
      a_of_b[db + 1] = da + 1;
    }
    double herr = 0.0;
    double hmax = 0.0;
    for (Eigen::Index k = 0; k < Hb.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(Hb, k); it; ++it) {
        const double va = Ha.coeff(a_of_b[it.row()], a_of_b[it.col()]);
        herr = std::max(herr, std::abs(it.value() - va));
        hmax = std::max(hmax, std::abs(va));
      }
    herr /= std::max(hmax, 1e-300);

    const std::string tag = std::string(" (") + std::string(to_string(defect)) + ", N=20)";
    out.push_back(bound("reduction: dof count matches" + tag, same_count ? 0.0 : 1.0, 0.5));
    out.push_back(bound("reduction: energy" + tag, rel(Eb, Ea), 1e-12));
    out.push_back(bound("reduction: gradient" + tag, gerr, 1e-10));
    out.push_back(bound("reduction: Hessian" + tag, herr, 1e-8));
  }

  // effective-volume identity, symmetry and invariances on a blended fixture
  {
    const CoupledFixture fx = coupled_fixture(model, 20, DefectKind::microcrack11, BlendKind::smooth, 3, 3, S.crack);
    double beta_sum = 0.0;
    for (int s : fx.domain.energy_sites()) beta_sum += fx.blend.beta[s];
    const double v_sum = std::accumulate(fx.mesh.v_eff.begin(), fx.mesh.v_eff.end(), 0.0);
    out.push_back(bound("effective-volume identity", rel(v_sum, kCellArea * beta_sum), 1e-10));

    const PlanObjective bq(fx.plan);
    const Eigen::VectorXd x = random_vector(bq.size(), 0.03, rng);
    out.push_back(bound("blended Hessian symmetry", hessian_asymmetry(bq.hessian(x)), 1e-12));

    const AssemblyPlan all = unconstrained(fx.plan);
    Eigen::VectorXd u(static_cast<Eigen::Index>(all.unknowns));
    {
      // copy the constrained state, then perturb every point
      const auto y = bq.positions(x);
      for (std::size_t p = 0; p < y.size(); ++p) u.segment<2>(2 * p) = y[p] - all.F * all.ref[p];
      u += random_vector(all.unknowns, 0.01, rng);
    }
    const double E = kernels::serial::energy(all, u);
    Eigen::VectorXd shifted = u;
    for (Eigen::Index i = 0; i < shifted.size(); i += 2) shifted.segment<2>(i) += Vec2(0.37, -1.21);
    out.push_back(bound("blended translation invariance", rel(kernels::serial::energy(all, shifted), E), 1e-10));

    Eigen::VectorXd g;
    kernels::serial::energy_gradient(all, u, g);
    Vec2 net = Vec2::Zero();
    for (Eigen::Index i = 0; i < g.size(); i += 2) net += g.segment<2>(i);
    out.push_back(bound("blended net force", net.lpNorm<Eigen::Infinity>() / std::max(inf_norm(g), 1e-300), 1e-10));
  }

  // atomistic translation and rotation invariance, Hessian symmetry
  {
    const LatticeDomain dom = LatticeDomain::generate(10, DefectKind::divacancy);
    const NeighborTable nbrs(dom, model.density_cutoff, model.pair_cutoff);
    const AssemblyPlan ap = atomistic_plan(model, dom, nbrs, domain_free_mask(dom), S.divac);
    const PlanObjective atm(ap);
    out.push_back(bound("atomistic Hessian symmetry",
                        hessian_asymmetry(atm.hessian(random_vector(atm.size(), 0.03, rng))), 1e-12));

    const AssemblyPlan all = unconstrained(ap);
    const Eigen::VectorXd u = random_vector(all.unknowns, 0.03, rng);
    const double E = kernels::serial::energy(all, u);
    Eigen::VectorXd shifted = u;
    for (Eigen::Index i = 0; i < shifted.size(); i += 2) shifted.segment<2>(i) += Vec2(-2.5, 0.75);
    out.push_back(bound("atomistic translation invariance", rel(kernels::serial::energy(all, shifted), E), 1e-12));

    AssemblyPlan rotated = all;
    const Mat2 Q = rotation(0.61);
    rotated.F = Q * all.F;
    Eigen::VectorXd ur = u;
    for (Eigen::Index i = 0; i < ur.size(); i += 2) ur.segment<2>(i) = Q * u.segment<2>(i);
    out.push_back(bound("atomistic rotation invariance", rel(kernels::serial::energy(rotated, ur), E), 1e-10));

    Eigen::VectorXd g;
    kernels::serial::energy_gradient(all, u, g);
    Vec2 net = Vec2::Zero();
    for (Eigen::Index i = 0; i < g.size(); i += 2) net += g.segment<2>(i);
    out.push_back(bound("atomistic net force", net.lpNorm<Eigen::Infinity>() / std::max(inf_norm(g), 1e-300), 1e-10));
  }

  // |vor(0)| W(F) equals the interior site energy under y^F
  {
    const LatticeDomain dom = LatticeDomain::generate(6, DefectKind::none);
    const NeighborTable nbrs(dom, model.density_cutoff, model.pair_cutoff);
    double worst = 0.0;
    for (const Mat2& F : {S.F0, S.crack, S.divac}) {
      const Deformation y = homogeneous_deformation(dom, F);
      worst = std::max(worst, rel(kCellArea * cb_energy(model, F), site_energy(model, nbrs, y, dom.find({0, 0}))));
    }
    out.push_back(bound("Cauchy-Born homogeneity link", worst, 1e-12));
  }
  return out;
}

std::vector<CheckResult> ghostforce_suite() {
  const EamModel model;
  const Mat2 F0 = find_ground_state(model);
  const int N = 60;
  const LatticeDomain dom = LatticeDomain::generate(N, DefectKind::none);
  const NeighborTable nbrs(dom, model.density_cutoff, model.pair_cutoff);
  std::vector<CheckResult> out;

  auto sup_for = [&](BlendKind kind, int K0, int K1) {
    const Regions regions = classify_regions(dom, K0, K1);
    const BlendField blend = make_blend(dom, regions, kind);
    const ParameterPlan pp = select_parameters(3.0, 2.0, K0, N, ParameterRule::table);
    Mesh mesh = build_graded_mesh(dom, regions, pp);
    effective_volumes(mesh, blend, dom);
    return ghost_force_norm(model, dom, nbrs, mesh, blend, F0).sup;
  };
  auto ratios = [&](const char* name, BlendKind kind, bool vary_K1, double lo, double hi) {
    std::array<double, 3> sup{};
    const std::array<int, 3> K{4, 8, 16};
    for (int i = 0; i < 3; ++i) sup[i] = vary_K1 ? sup_for(kind, 4, K[i]) : sup_for(kind, K[i], 0);
    std::ostringstream d;
    d << std::setprecision(4) << "sup-norms " << sup[0] << ", " << sup[1] << ", " << sup[2];
    for (int i = 0; i < 2; ++i) {
      const double r = sup[i + 1] / sup[i];
      CheckResult c;
      c.name = std::string(name) + " ratio " + std::to_string(K[i + 1]) + "/" + std::to_string(K[i]);
      c.passed = r >= lo && r <= hi;
      c.value = r;
      c.tolerance = hi;
      c.detail = "range [" + std::to_string(lo).substr(0, 4) + ", " + std::to_string(hi).substr(0, 4) + "], " + d.str();
      out.push_back(c);
    }
  };
  ratios("smooth blend ghost force, K1", BlendKind::smooth, true, 0.15, 0.5);
  ratios("linear blend ghost force, K1", BlendKind::linear, true, 0.35, 0.75);
  ratios("QCE ghost force, K0", BlendKind::qce, false, 0.5, 1.5);

  // no ghost force without coupling
  {
    const LatticeDomain small = LatticeDomain::generate(20, DefectKind::none);
    const NeighborTable sn(small, model.density_cutoff, model.pair_cutoff);
    Mesh mesh = build_micro_mesh(small);
    BlendField zero;
    zero.beta.assign(small.size(), 0.0);
    effective_volumes(mesh, zero, small);
    out.push_back(bound("beta = 0 ghost force", ghost_force_norm(model, small, sn, mesh, zero, F0).sup, 1e-10));
  }
  return out;
}

}  // namespace bqce::verify
