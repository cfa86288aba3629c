#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bqce/benchmark.hpp"
#include "bqce/config.hpp"
#include "bqce/io.hpp"
#include "bqce/verify.hpp"

namespace {

using namespace bqce;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

// Reference minimiser, read from `cache` when it exists, else solved and
// written there.
AtomisticSolution reference_for(const BenchmarkSetup& setup, const RunConfig& cfg) {
  const std::string& cache = cfg.reference_cache;
  if (!cache.empty() && std::filesystem::exists(cache)) {
    std::ifstream in(cache);
    const auto entries = read_state(in);
    AtomisticSolution sol;
    sol.y = homogeneous_deformation(setup.domain, setup.F);
    for (const auto& e : entries) {
      if (e.id < 0 || static_cast<std::size_t>(e.id) >= sol.y.size()) throw Error("reference cache does not match N");
      sol.y[e.id] += e.u;
    }
    sol.energy = atomistic_energy(setup, sol.y);
    std::cerr << "reference read from " << cache << " (E = " << sol.energy << ")\n";
    return sol;
  }
  std::cerr << "solving the atomistic reference (N=" << setup.domain.side() << ") ...\n";
  AtomisticSolution sol = solve_reference(setup, cfg.solver);
  std::cerr << "reference: E = " << sol.energy << ", |g| = " << sol.report.grad_sup << ", "
            << sol.report.pcg_iterations << " PCG steps, " << sol.report.wall_time_s << " s\n";
  if (!cache.empty()) {
    std::vector<StateEntry> entries;
    for (int s : setup.domain.free_sites()) entries.push_back({s, sol.y[s] - setup.F * setup.domain.position(s)});
    auto out = open_out(cache);
    write_state(out, entries);
  }
  return sol;
}

void print_slopes(const std::vector<ConvergenceRecord>& records) {
  const std::size_t n = records.size();
  if (n - n / 2 < 3) return;
  try {
    std::cerr << "upper-window slopes vs DoF: w12 " << fit_slope(records, ErrorKind::w12) << ", w1inf "
              << fit_slope(records, ErrorKind::w1inf) << ", energy " << fit_slope(records, ErrorKind::energy) << "\n";
  } catch (const Error& e) {
    std::cerr << "slope fit skipped: " << e.what() << "\n";
  }
}

int run_bench(const RunConfig& cfg) {
  validate(cfg);
  const BenchmarkSetup setup = make_setup(parse_problem(cfg.problem), cfg.N, cfg.model, cfg.load);
  const AtomisticSolution ref = reference_for(setup, cfg);
  std::vector<ConvergenceRecord> records;
  if (cfg.method == "atm") {
    records = run_atm(setup, ref, cfg.K0, cfg.solver, &std::cerr);
  } else {
    records = run_coupled(setup, ref, parse_blend(cfg.method), cfg.K0, cfg.coupled(), &std::cerr);
  }
  print_slopes(records);
  if (cfg.out.empty() || cfg.out == "-") {
    write_csv(std::cout, records);
  } else {
    auto out = open_out(cfg.out);
    write_csv(out, records);
  }
  return records.size() == cfg.K0.size() ? 0 : 1;
}

int run_solve(const RunConfig& cfg, const std::string& out_path) {
  validate(cfg);
  const BenchmarkSetup setup = make_setup(parse_problem(cfg.problem), cfg.N, cfg.model, cfg.load);
  const int K0 = cfg.K0.front();
  std::vector<StateEntry> entries;
  SolveReport rep;
  if (cfg.method == "atm") {
    const AtomisticSolution sol = solve_atm(setup, K0, cfg.solver);
    for (int s : setup.domain.free_sites()) entries.push_back({s, sol.y[s] - setup.F * setup.domain.position(s)});
    rep = sol.report;
  } else {
    const CoupledSolution sol = solve_coupled(setup, parse_blend(cfg.method), K0, cfg.coupled());
    for (std::size_t v = 0; v < sol.mesh.node_count(); ++v) {
      entries.push_back({static_cast<int>(v), sol.nodal[v] - setup.F * sol.mesh.nodes[v]});
    }
    rep = sol.report;
  }
  auto out = open_out(out_path);
  write_state(out, entries);
  std::cout << "energy " << rep.energy << "\ngrad_sup " << rep.grad_sup << "\npcg_iterations " << rep.pcg_iterations
            << "\ntermination " << to_string(rep.reason) << "\nnewton_steps " << rep.newton_steps << "\nwall_time_s "
            << rep.wall_time_s << "\n";
  return 0;
}

int run_dump(const RunConfig& cfg, const std::string& out_path) {
  const LatticeDomain domain = LatticeDomain::generate(cfg.N, defect_of(parse_problem(cfg.problem)));
  auto out = open_out(out_path);
  const int K0 = cfg.K0.front();
  if (cfg.method == "atm") {
    std::vector<double> beta(domain.size(), 1.0);
    for (int s : domain.free_sites())
      if (hex_norm(domain.index(s)) <= K0 - 1) beta[s] = 0.0;
    write_lattice_dump(out, domain, &beta);
    return 0;
  }
  const CoupledSettings settings = cfg.coupled();
  const BlendKind kind = parse_blend(cfg.method);
  const ParameterPlan plan = select_parameters(settings.alpha, settings.p, K0, cfg.N, settings.rule);
  const Regions regions = classify_regions(domain, K0, kind == BlendKind::qce ? 0 : plan.K1);
  const BlendField blend = make_blend(domain, regions, kind);
  Mesh mesh = build_graded_mesh(domain, regions, plan, settings.mesh);
  effective_volumes(mesh, blend, domain);
  write_mesh_dump(out, mesh, &blend.beta);
  std::cerr << "mesh: " << mesh.node_count() << " nodes, " << mesh.element_count() << " elements, K1 = "
            << regions.K1 << ", max adjacent growth " << max_adjacent_growth(mesh) << "\n";
  return 0;
}

int run_check(const std::string& suite, std::uint64_t seed) {
  std::vector<verify::CheckResult> results;
  if (suite == "gradients") results = verify::gradient_suite(seed);
  else if (suite == "invariants") results = verify::invariants_suite(seed);
  else if (suite == "ghostforce") results = verify::ghostforce_suite();
  else throw Error("unknown suite '" + suite + "'");
  verify::print(std::cout, results);
  return verify::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blended quasicontinuum engine and benchmark harness"};
  app.require_subcommand(1);

  RunConfig bench_cfg;
  std::string problem = "divacancy";
  std::string p_text = "2";
  auto* bench = app.add_subcommand("bench", "Run a K0 sweep and write a convergence CSV");
  bench->add_option("--problem", problem, "microcrack or divacancy")->required();
  bench->add_option("--method", bench_cfg.method, "atm, qce, bqce-linear or bqce-smooth")->required();
  bench->add_option("--N", bench_cfg.N, "hexagon side length")->required();
  bench->add_option("--K0", bench_cfg.K0, "atomistic layers (ATM: sub-domain radii)")->required()->delimiter(',');
  bench->add_option("--rule", bench_cfg.rule, "blend-width rule: table or mu");
  bench->add_option("--alpha", bench_cfg.alpha, "decay exponent of the defect field");
  bench->add_option("--p", p_text, "error norm exponent: 1, 2 or inf");
  bench->add_option("--growth-cap", bench_cfg.growth_cap, "largest diameter ratio of adjacent elements");
  bench->add_option("--reference-cache", bench_cfg.reference_cache, "state file caching the atomistic reference");
  bench->add_flag("--reproducible", bench_cfg.reproducible, "ordered reductions, bitwise reproducible");
  bench->add_option("--out", bench_cfg.out, "CSV path ('-' for stdout)")->required();

  std::string config_path;
  std::string out_path;
  auto* solve = app.add_subcommand("solve", "Solve one configuration and write its displacement state");
  solve->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out_path, "state file (id ux uy)")->required();

  auto* dump = app.add_subcommand("dump-mesh", "Write the mesh (or ATM lattice) with v_eff and beta");
  dump->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  dump->add_option("--out", out_path, "dump path")->required();

  std::string suite;
  std::uint64_t seed = 1;
  auto* check = app.add_subcommand("check", "Run a verification suite (exit code 0 on success)");
  check->add_option("--suite", suite, "gradients, invariants or ghostforce")
      ->required()
      ->check(CLI::IsMember({"gradients", "invariants", "ghostforce"}));
  check->add_option("--seed", seed, "seed of the random perturbations");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) {
      bench_cfg.problem = problem;
      bench_cfg.p = p_text == "inf" ? std::numeric_limits<double>::infinity() : std::stod(p_text);
      return run_bench(bench_cfg);
    }
    if (*solve) return run_solve(load_config(config_path), out_path);
    if (*dump) return run_dump(load_config(config_path), out_path);
    if (*check) return run_check(suite, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
