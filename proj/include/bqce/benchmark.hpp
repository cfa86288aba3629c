#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bqce/assembly.hpp"
#include "bqce/solver.hpp"

namespace bqce {

enum class Problem { microcrack, divacancy };
Problem parse_problem(std::string_view name);
std::string_view to_string(Problem p);
DefectKind defect_of(Problem p);

/// Macroscopic strain applied to the ground state F0:
/// microcrack [[1, g], [0, 1+g]] F0, divacancy [[1+g, g], [0, 1+g]] F0.
Mat2 load_strain(Problem p, const Mat2& F0, double g = 0.03);

/// Everything a benchmark problem shares across methods.
struct BenchmarkSetup {
  Problem problem = Problem::divacancy;
  EamModel model;
  Mat2 F0 = Mat2::Identity();
  Mat2 F = Mat2::Identity();
  LatticeDomain domain;
  NeighborTable nbrs;
  std::vector<std::array<int, 3>> micro;  // error-norm triangulation
};
BenchmarkSetup make_setup(Problem p, int N, const EamModel& model = {}, double load = 0.03);

/// Deformation of every table site plus the solve record.
struct AtomisticSolution {
  Deformation y;
  double energy = 0.0;  // full-domain atomistic energy at y
  std::size_t dof = 0;
  SolveReport report;
};

/// Full-lattice minimiser with the boundary layer and halo clamped to F x.
AtomisticSolution solve_reference(const BenchmarkSetup& setup, const SolverOptions& options = {});

/// Reduced atomistic problem: only sites with hex_norm <= radius-1 move;
/// the result is extended by F x to the whole table.
AtomisticSolution solve_atm(const BenchmarkSetup& setup, int radius, const SolverOptions& options = {});

/// Full-domain atomistic energy (every energy-carrying site) of a table
/// deformation.
double atomistic_energy(const BenchmarkSetup& setup, const Deformation& y);

struct ErrorNorms {
  double w12 = 0.0;
  double w1inf = 0.0;
  double w12_abs = 0.0;
  double w1inf_abs = 0.0;
};

/// Discrete W^{1,2} and W^{1,inf} seminorms of y_test - y_ref on the
/// micro-triangulation, relative to the same seminorms of y_ref - F x.
ErrorNorms error_norms(const BenchmarkSetup& setup, const Deformation& y_ref, const Deformation& y_test);

/// Same seminorms of an arbitrary field difference, unnormalised.
ErrorNorms seminorms(const LatticeDomain& domain, const std::vector<std::array<int, 3>>& micro,
                     const Deformation& a, const Deformation& b);

struct ConvergenceRecord {
  std::string method;
  int K0 = 0;
  int K1 = 0;
  std::size_t dof = 0;
  double err_w12 = 0.0;
  double err_w1inf = 0.0;
  double err_energy_abs = 0.0;
  double err_energy_signed = 0.0;
  double energy = 0.0;
  double wall_time_s = 0.0;

  // diagnostics, not part of the CSV
  double grad_sup = 0.0;
  bool monotone = true;
  double volume_residual = 0.0;  // |sum v_T - |vor| sum beta| / |vor| sum beta
  std::size_t pcg_iterations = 0;
  std::vector<double> newton_residuals;
};

struct CoupledSettings {
  ParameterRule rule = ParameterRule::table;
  double alpha = 3.0;
  double p = 2.0;
  MeshOptions mesh;
  SolverOptions solver;
  Reduction reduction = Reduction::fast;
};

/// The method names accepted by run_method: atm, qce, bqce-linear, bqce-smooth.
bool is_coupled_method(std::string_view method);

/// Everything produced by one blended solve.
struct CoupledSolution {
  ParameterPlan plan;
  Regions regions;
  BlendField blend;
  Mesh mesh;
  std::vector<Vec2> nodal;  // deformed node positions
  SolveReport report;
  std::size_t dof = 0;
};

/// Regions, blend, graded mesh, effective volumes and minimisation from y = F x.
CoupledSolution solve_coupled(const BenchmarkSetup& setup, BlendKind kind, int K0, const CoupledSettings& settings);

/// One coupled solve: regions, blend, mesh, effective volumes, minimisation
/// and errors against the reference.
ConvergenceRecord run_coupled_one(const BenchmarkSetup& setup, const AtomisticSolution& reference, BlendKind kind,
                                  int K0, const CoupledSettings& settings);

/// K0 sweep; a failing K0 is reported on `log` and skipped.
std::vector<ConvergenceRecord> run_coupled(const BenchmarkSetup& setup, const AtomisticSolution& reference,
                                           BlendKind kind, const std::vector<int>& K0s,
                                           const CoupledSettings& settings, std::ostream* log = nullptr);

/// ATM sweep over sub-domain radii (stored in the K0 column).
std::vector<ConvergenceRecord> run_atm(const BenchmarkSetup& setup, const AtomisticSolution& reference,
                                       const std::vector<int>& radii, const SolverOptions& options = {},
                                       std::ostream* log = nullptr);

/// Least-squares slope of log y against log x over the upper half of the
/// points ordered by x. Needs at least three points there, all positive.
double fit_slope(std::vector<double> x, std::vector<double> y);

enum class ErrorKind { w12, w1inf, energy };
double fit_slope(const std::vector<ConvergenceRecord>& records, ErrorKind kind);

inline constexpr std::string_view kCsvHeader =
    "method,K0,K1,dof,err_w12,err_w1inf,err_energy_abs,err_energy_signed,energy,wall_time_s";

void write_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records);
/// Skips comment lines starting with '#'; raises Error naming a malformed line.
std::vector<ConvergenceRecord> read_csv(std::istream& in);

}  // namespace bqce
