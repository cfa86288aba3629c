#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "bqce/assembly.hpp"

namespace bqce::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity
  double tolerance = 0.0;  // bound it was compared against
  std::string detail;
};

bool all_passed(const std::vector<CheckResult>& results);
void print(std::ostream& out, const std::vector<CheckResult>& results);

/// Uniform random vector with entries in [-amplitude, amplitude].
Eigen::VectorXd random_vector(std::size_t n, double amplitude, std::mt19937_64& rng);

/// ||g - g_fd||_inf / ||g||_inf with central differences on every component.
double gradient_fd_error(const Objective& f, const Eigen::VectorXd& x, double h = 1e-5);

/// ||H v - (g(x+hv) - g(x-hv)) / 2h||_inf / ||H v||_inf.
double hessian_fd_error(const Objective& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v, double h = 1e-5);

/// max |H - H^T| / max |H|.
double hessian_asymmetry(const SparseMatrix& H);

/// A small blended problem: domain, neighbours, blend, graded mesh with
/// effective volumes, and its plan at strain F.
struct CoupledFixture {
  LatticeDomain domain;
  NeighborTable nbrs;
  Regions regions;
  BlendField blend;
  Mesh mesh;
  AssemblyPlan plan;
};
CoupledFixture coupled_fixture(const EamModel& model, int N, DefectKind defect, BlendKind kind, int K0, int K1,
                               const Mat2& F);

/// Analytic vs finite-difference gradients and Hessian-vector products on
/// random perturbed states of atomistic and blended energies.
std::vector<CheckResult> gradient_suite(std::uint64_t seed = 1, int states = 10);

/// Homogeneous exactness, reduction to the atomistic energy, effective
/// volume identity, translation and rotation invariance, Hessian symmetry.
std::vector<CheckResult> invariants_suite(std::uint64_t seed = 1);

/// Ghost-force decay under smooth and linear blending and its absence of
/// decay under QCE, on a defect-free domain at the ground state.
std::vector<CheckResult> ghostforce_suite();

}  // namespace bqce::verify
