#include "bqce/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <Eigen/LU>

namespace bqce {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Unknown vector of an atomistic plan holding y - F x at its dof sites.
Eigen::VectorXd displacement_of(const AssemblyPlan& plan, const Deformation& y) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(plan.unknowns));
  for (std::size_t p = 0; p < plan.dof.size(); ++p) {
    const int d = plan.dof[p];
    if (d < 0) continue;
    const Vec2 v = y[p] - plan.F * plan.ref[p];
    u[d] = v.x();
    u[d + 1] = v.y();
  }
  return u;
}

AtomisticSolution solve_masked(const BenchmarkSetup& s, const std::vector<std::uint8_t>& mask,
                               const SolverOptions& options) {
  PlanObjective objective(atomistic_plan(s.model, s.domain, s.nbrs, mask, s.F));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(objective.size()));
  AtomisticSolution sol;
  sol.report = minimize(objective, x, options);
  sol.y = objective.positions(x);
  sol.dof = objective.size() / 2;
  sol.energy = sol.report.energy;
  return sol;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

Problem parse_problem(std::string_view name) {
  if (name == "microcrack") return Problem::microcrack;
  if (name == "divacancy") return Problem::divacancy;
  throw Error("unknown problem '" + std::string(name) + "'");
}

std::string_view to_string(Problem p) { return p == Problem::microcrack ? "microcrack" : "divacancy"; }

DefectKind defect_of(Problem p) { return p == Problem::microcrack ? DefectKind::microcrack11 : DefectKind::divacancy; }

Mat2 load_strain(Problem p, const Mat2& F0, double g) {
  Mat2 L;
  if (p == Problem::microcrack) {
    L << 1.0, g, 0.0, 1.0 + g;
  } else {
    L << 1.0 + g, g, 0.0, 1.0 + g;
  }
  return L * F0;
}

BenchmarkSetup make_setup(Problem p, int N, const EamModel& model, double load) {
  BenchmarkSetup s;
  s.problem = p;
  s.model = model;
  s.F0 = find_ground_state(model);
  s.F = load_strain(p, s.F0, load);
  s.domain = LatticeDomain::generate(N, defect_of(p));
  s.nbrs = NeighborTable(s.domain, model.density_cutoff, model.pair_cutoff);
  s.micro = micro_triangulation(s.domain);
  return s;
}

double atomistic_energy(const BenchmarkSetup& s, const Deformation& y) {
  const AssemblyPlan plan = atomistic_plan(s.model, s.domain, s.nbrs, domain_free_mask(s.domain), s.F);
  return kernels::omp::energy(plan, displacement_of(plan, y));
}

AtomisticSolution solve_reference(const BenchmarkSetup& setup, const SolverOptions& options) {
  return solve_masked(setup, domain_free_mask(setup.domain), options);
}

AtomisticSolution solve_atm(const BenchmarkSetup& setup, int radius, const SolverOptions& options) {
  AtomisticSolution sol = solve_masked(setup, ball_free_mask(setup.domain, radius), options);
  sol.energy = atomistic_energy(setup, sol.y);
  return sol;
}

ErrorNorms seminorms(const LatticeDomain& domain, const std::vector<std::array<int, 3>>& micro,
                     const Deformation& a, const Deformation& b) {
  ErrorNorms n;
  double sum = 0.0;
  for (const auto& t : micro) {
    const Vec2 x0 = domain.position(t[0]);
    Mat2 D;
    D.col(0) = domain.position(t[1]) - x0;
    D.col(1) = domain.position(t[2]) - x0;
    Mat2 Y;
    Y.col(0) = (a[t[1]] - b[t[1]]) - (a[t[0]] - b[t[0]]);
    Y.col(1) = (a[t[2]] - b[t[2]]) - (a[t[0]] - b[t[0]]);
    const Mat2 G = Y * D.inverse();
    const double f = G.norm();
    if (!std::isfinite(f)) throw Error("seminorms: field undefined at a vertex of micro element " +
                                       std::to_string(&t - micro.data()));
    sum += 0.5 * std::abs(D.determinant()) * f * f;
    n.w1inf_abs = std::max(n.w1inf_abs, f);
  }
  n.w12_abs = std::sqrt(sum);
  n.w12 = n.w12_abs;
  n.w1inf = n.w1inf_abs;
  return n;
}

ErrorNorms error_norms(const BenchmarkSetup& setup, const Deformation& y_ref, const Deformation& y_test) {
  if (y_ref.size() != setup.domain.size() || y_test.size() != setup.domain.size()) {
    throw Error("error_norms: deformations do not match the domain");
  }
  const Deformation yF = homogeneous_deformation(setup.domain, setup.F);
  const ErrorNorms scale = seminorms(setup.domain, setup.micro, y_ref, yF);
  if (!(scale.w12_abs > 0.0) || !(scale.w1inf_abs > 0.0)) {
    throw Error("error_norms: the reference defect field vanishes, relative errors are undefined");
  }
  ErrorNorms n = seminorms(setup.domain, setup.micro, y_test, y_ref);
  n.w12 = n.w12_abs / scale.w12_abs;
  n.w1inf = n.w1inf_abs / scale.w1inf_abs;
  return n;
}

bool is_coupled_method(std::string_view method) {
  return method == "qce" || method == "bqce-linear" || method == "bqce-smooth";
}

CoupledSolution solve_coupled(const BenchmarkSetup& setup, BlendKind kind, int K0, const CoupledSettings& settings) {
  const LatticeDomain& domain = setup.domain;
  CoupledSolution sol;
  sol.plan = select_parameters(settings.alpha, settings.p, K0, domain.side(), settings.rule);
  const int K1 = kind == BlendKind::qce ? 0 : sol.plan.K1;
  sol.regions = classify_regions(domain, K0, K1);
  sol.blend = make_blend(domain, sol.regions, kind);
  sol.mesh = build_graded_mesh(domain, sol.regions, sol.plan, settings.mesh);
  effective_volumes(sol.mesh, sol.blend, domain);
  sol.dof = count_dof(sol.mesh, sol.blend, domain);

  PlanObjective objective(bqce_plan(setup.model, domain, setup.nbrs, sol.mesh, sol.blend, setup.F),
                          settings.reduction);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(objective.size()));
  sol.report = minimize(objective, x, settings.solver);
  sol.nodal = objective.positions(x);
  sol.nodal.resize(sol.mesh.node_count());
  return sol;
}

ConvergenceRecord run_coupled_one(const BenchmarkSetup& setup, const AtomisticSolution& reference, BlendKind kind,
                                  int K0, const CoupledSettings& settings) {
  const auto t0 = Clock::now();
  const LatticeDomain& domain = setup.domain;
  const CoupledSolution sol = solve_coupled(setup, kind, K0, settings);
  const SolveReport& rep = sol.report;

  ConvergenceRecord rec;
  rec.method = std::string(to_string(kind));
  rec.K0 = K0;
  rec.K1 = sol.regions.K1;
  rec.dof = sol.dof;

  double beta_volume = 0.0;
  for (int s : domain.energy_sites()) beta_volume += sol.blend.beta[s] * kCellArea;
  const double v_sum = std::accumulate(sol.mesh.v_eff.begin(), sol.mesh.v_eff.end(), 0.0);
  rec.volume_residual = beta_volume > 0.0 ? std::abs(v_sum - beta_volume) / beta_volume : std::abs(v_sum);

  const Deformation y = interpolate_to_lattice(sol.mesh, sol.nodal, domain);
  const ErrorNorms err = error_norms(setup, reference.y, y);

  rec.err_w12 = err.w12;
  rec.err_w1inf = err.w1inf;
  rec.energy = rep.energy;
  rec.err_energy_signed = rep.energy - reference.energy;
  rec.err_energy_abs = std::abs(rec.err_energy_signed);
  rec.grad_sup = rep.grad_sup;
  rec.monotone = rep.monotone;
  rec.pcg_iterations = rep.pcg_iterations;
  rec.newton_residuals = rep.newton_residuals;
  rec.wall_time_s = seconds_since(t0);
  return rec;
}

std::vector<ConvergenceRecord> run_coupled(const BenchmarkSetup& setup, const AtomisticSolution& reference,
                                           BlendKind kind, const std::vector<int>& K0s,
                                           const CoupledSettings& settings, std::ostream* log) {
  std::vector<ConvergenceRecord> out;
  for (int K0 : K0s) {
    try {
      out.push_back(run_coupled_one(setup, reference, kind, K0, settings));
      if (log) {
        const auto& r = out.back();
        *log << to_string(kind) << " K0=" << K0 << " K1=" << r.K1 << " dof=" << r.dof << " w12=" << r.err_w12
             << " w1inf=" << r.err_w1inf << " dE=" << r.err_energy_signed << " |g|=" << r.grad_sup << " ("
             << r.wall_time_s << " s)\n";
      }
    } catch (const Error& e) {
      if (log) *log << to_string(kind) << " K0=" << K0 << " failed: " << e.what() << "\n";
    }
  }
  return out;
}

std::vector<ConvergenceRecord> run_atm(const BenchmarkSetup& setup, const AtomisticSolution& reference,
                                       const std::vector<int>& radii, const SolverOptions& options,
                                       std::ostream* log) {
  std::vector<ConvergenceRecord> out;
  for (int R : radii) {
    try {
      const auto t0 = Clock::now();
      const AtomisticSolution sol = solve_atm(setup, R, options);
      const ErrorNorms err = error_norms(setup, reference.y, sol.y);
      ConvergenceRecord rec;
      rec.method = "atm";
      rec.K0 = R;
      rec.K1 = 0;
      rec.dof = sol.dof;
      rec.err_w12 = err.w12;
      rec.err_w1inf = err.w1inf;
      rec.energy = sol.energy;
      rec.err_energy_signed = sol.energy - reference.energy;
      rec.err_energy_abs = std::abs(rec.err_energy_signed);
      rec.grad_sup = sol.report.grad_sup;
      rec.monotone = sol.report.monotone;
      rec.pcg_iterations = sol.report.pcg_iterations;
      rec.newton_residuals = sol.report.newton_residuals;
      rec.wall_time_s = seconds_since(t0);
      out.push_back(rec);
      if (log) {
        *log << "atm R=" << R << " dof=" << rec.dof << " w12=" << rec.err_w12 << " w1inf=" << rec.err_w1inf
             << " dE=" << rec.err_energy_signed << " |g|=" << rec.grad_sup << " (" << rec.wall_time_s << " s)\n";
      }
    } catch (const Error& e) {
      if (log) *log << "atm R=" << R << " failed: " << e.what() << "\n";
    }
  }
  return out;
}

double fit_slope(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size()) throw Error("fit_slope: x and y differ in length");
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  const std::size_t n = x.size();
  const std::size_t first = n / 2;  // upper half, middle point included for odd n
  if (n - first < 3) throw Error("fit_slope: fewer than three points in the upper half");
  double mx = 0.0;
  double my = 0.0;
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t k = first; k < n; ++k) {
    const std::size_t i = order[k];
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error("fit_slope: nonpositive value in the fit window");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    mx += lx.back();
    my += ly.back();
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  if (!(sxx > 0.0)) throw Error("fit_slope: all x values coincide");
  return sxy / sxx;
}

double fit_slope(const std::vector<ConvergenceRecord>& records, ErrorKind kind) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& r : records) {
    x.push_back(static_cast<double>(r.dof));
    y.push_back(kind == ErrorKind::w12 ? r.err_w12 : kind == ErrorKind::w1inf ? r.err_w1inf : r.err_energy_abs);
  }
  return fit_slope(std::move(x), std::move(y));
}

void write_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.method << ',' << r.K0 << ',' << r.K1 << ',' << r.dof << ',' << format_double(r.err_w12) << ','
        << format_double(r.err_w1inf) << ',' << format_double(r.err_energy_abs) << ','
        << format_double(r.err_energy_signed) << ',' << format_double(r.energy) << ','
        << format_double(r.wall_time_s) << '\n';
  }
  out << "# err_w12, err_w1inf: seminorms of y - y_ref on the micro-triangulation divided by the same seminorm"
         " of y_ref - F x; err_energy_signed = E_method - E_atomistic\n";
}

std::vector<ConvergenceRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error("read_csv: line 1 is not the expected header");
  std::vector<ConvergenceRecord> out;
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw Error("read_csv: line " + std::to_string(lineno) + " has " + std::to_string(f.size()) +
                                    " fields, expected 10");
    try {
      ConvergenceRecord r;
      r.method = f[0];
      r.K0 = std::stoi(f[1]);
      r.K1 = std::stoi(f[2]);
      r.dof = static_cast<std::size_t>(std::stoull(f[3]));
      r.err_w12 = std::stod(f[4]);
      r.err_w1inf = std::stod(f[5]);
      r.err_energy_abs = std::stod(f[6]);
      r.err_energy_signed = std::stod(f[7]);
      r.energy = std::stod(f[8]);
      r.wall_time_s = std::stod(f[9]);
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw Error("read_csv: line " + std::to_string(lineno) + " has a malformed number");
    }
  }
  return out;
}

}  // namespace bqce
