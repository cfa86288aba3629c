// Times the serial and OpenMP assembly kernels on a blended plan and an
// atomistic plan, and checks that reproducible reductions match serial
// bitwise.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "bqce/assembly.hpp"
#include "bqce/benchmark.hpp"

using namespace bqce;

namespace {

double time_best(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

bool bench_plan(const char* label, const AssemblyPlan& plan, int reps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-0.02, 0.02);
  Eigen::VectorXd u(static_cast<Eigen::Index>(plan.unknowns));
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = U(rng);
  const SparseMatrix pattern = hessian_pattern(plan);

  Eigen::VectorXd gs;
  Eigen::VectorXd gf;
  Eigen::VectorXd gr;
  double es = 0.0;
  double ef = 0.0;
  double er = 0.0;
  SparseMatrix hs;
  SparseMatrix ho;

  std::printf("%s: %zu unknowns, %zu site terms, %zu element terms, %d threads\n", label, plan.unknowns,
              plan.sites.size(), plan.elements.size(), omp_get_max_threads());
  std::printf("  %-10s %12s %12s %12s\n", "kernel", "serial [ms]", "omp fast", "omp repro");
  const double e_s = time_best(reps, [&] { es = kernels::serial::energy(plan, u); });
  const double e_f = time_best(reps, [&] { ef = kernels::omp::energy(plan, u, Reduction::fast); });
  const double e_r = time_best(reps, [&] { er = kernels::omp::energy(plan, u, Reduction::reproducible); });
  std::printf("  %-10s %12.3f %12.3f %12.3f\n", "energy", 1e3 * e_s, 1e3 * e_f, 1e3 * e_r);
  const bool energy_bitwise = er == es;

  const double g_s = time_best(reps, [&] { es = kernels::serial::energy_gradient(plan, u, gs); });
  const double g_f = time_best(reps, [&] { ef = kernels::omp::energy_gradient(plan, u, gf, Reduction::fast); });
  const double g_r =
      time_best(reps, [&] { er = kernels::omp::energy_gradient(plan, u, gr, Reduction::reproducible); });
  std::printf("  %-10s %12.3f %12.3f %12.3f\n", "gradient", 1e3 * g_s, 1e3 * g_f, 1e3 * g_r);
  const bool grad_bitwise = er == es && gr == gs;

  const double h_s = time_best(reps, [&] { hs = kernels::serial::hessian(plan, pattern, u); });
  const double h_o = time_best(reps, [&] { ho = kernels::omp::hessian(plan, pattern, u); });
  std::printf("  %-10s %12.3f %12.3f %12s\n", "hessian", 1e3 * h_s, 1e3 * h_o, "-");
  const bool hess_bitwise = SparseMatrix(hs - ho).norm() == 0.0;

  const double fast_dev = std::abs(ef - es) / std::max(std::abs(es), 1e-300);
  std::printf("  fast-mode relative energy deviation %.2e; bitwise: energy %s, gradient %s, hessian %s\n", fast_dev,
              energy_bitwise ? "yes" : "no", grad_bitwise ? "yes" : "no", hess_bitwise ? "yes" : "no");
  return energy_bitwise && grad_bitwise && hess_bitwise;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs OpenMP assembly kernel timings"};
  int N = 100;
  int K0 = 8;
  int reps = 5;
  std::uint64_t seed = 1;
  app.add_option("--N", N, "hexagon side")->check(CLI::Range(20, 2000));
  app.add_option("--K0", K0, "atomistic radius of the blended plan")->check(CLI::PositiveNumber);
  app.add_option("--reps", reps, "repetitions; the best time is reported")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed of the random displacement");
  CLI11_PARSE(app, argc, argv);

  try {
    const BenchmarkSetup setup = make_setup(Problem::divacancy, N);
    const AssemblyPlan atm =
        atomistic_plan(setup.model, setup.domain, setup.nbrs, domain_free_mask(setup.domain), setup.F);
    bool ok = bench_plan("atomistic", atm, reps, seed);

    const CoupledSolution cs = solve_coupled(setup, BlendKind::smooth, K0, CoupledSettings{});
    const AssemblyPlan bq = bqce_plan(setup.model, setup.domain, setup.nbrs, cs.mesh, cs.blend, setup.F);
    ok = bench_plan("bqce-smooth", bq, reps, seed) && ok;
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bench_assembly: %s\n", e.what());
    return 2;
  }
}
