#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "bqce/assembly.hpp"
#include "bqce/linear.hpp"

namespace bqce {

struct SolverOptions {
  std::size_t max_iter = 0;  // 0: 5 x unknowns
  double gtol = 0.0;         // PCG stops early below this gradient sup-norm; 0 runs to descent loss
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  int newton_steps = 3;
  double newton_target = 1e-10;  // gradient sup-norm expected after polishing
};

enum class Termination { converged, descent_lost, max_iter };
std::string_view to_string(Termination t);

struct SolveReport {
  std::size_t pcg_iterations = 0;
  std::size_t newton_steps = 0;
  double energy = 0.0;
  double grad_sup = 0.0;
  Termination reason = Termination::converged;
  double wall_time_s = 0.0;
  std::vector<double> energies;       // initial energy then one per accepted PCG step
  std::vector<double> newton_residuals;  // gradient sup-norm before the first and after every Newton step
  bool monotone = true;               // accepted PCG steps never raised the energy
  const char* preconditioner = "identity";
};

/// Symmetric positive definite operator applied to gradients.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual Eigen::VectorXd apply(const Eigen::VectorXd& g) const = 0;
  virtual const char* name() const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  Eigen::VectorXd apply(const Eigen::VectorXd& g) const override { return g; }
  const char* name() const override { return "identity"; }
};

class FactorizedPreconditioner final : public Preconditioner {
 public:
  explicit FactorizedPreconditioner(SpdFactorization factor) : factor_(std::move(factor)) {}
  Eigen::VectorXd apply(const Eigen::VectorXd& g) const override { return factor_.solve(g); }
  const char* name() const override { return "hessian"; }

 private:
  SpdFactorization factor_;
};

/// Hessian of the objective at x (the homogeneous state when x = 0),
/// factorized once; the identity when that Hessian is not positive definite.
std::unique_ptr<Preconditioner> default_preconditioner(const Objective& objective, const Eigen::VectorXd& x);

/// Preconditioned Polak-Ribiere+ nonlinear CG with an Armijo backtracking
/// line search. Stops when the search direction loses descent (round-off),
/// when the gradient drops below gtol, or after max_iter steps.
SolveReport minimize_pcg(const Objective& objective, Eigen::VectorXd& x, const Preconditioner& preconditioner,
                         const SolverOptions& options = {});

/// Full Newton steps with sparse Cholesky solves; raises SolverError when a
/// Hessian is not positive definite. Appends to `report`.
void newton_polish(const Objective& objective, Eigen::VectorXd& x, int steps, SolveReport& report);

/// PCG from x followed by Newton polishing.
SolveReport minimize(const Objective& objective, Eigen::VectorXd& x, const SolverOptions& options = {});

}  // namespace bqce
