#include "bqce/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace bqce {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double sup_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Energy that maps evaluation failures (inverted elements, coincident atoms)
// to +inf so the line search backtracks away from them.
double safe_value(const Objective& f, const Eigen::VectorXd& x) {
  try {
    return f.value(x);
  } catch (const EvaluationError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::descent_lost: return "descent-lost";
    case Termination::max_iter: return "max-iter";
  }
  return "?";
}

std::unique_ptr<Preconditioner> default_preconditioner(const Objective& objective, const Eigen::VectorXd& x) {
  SpdFactorization factor;
  try {
    if (factor.factorize(objective.hessian(x))) return std::make_unique<FactorizedPreconditioner>(std::move(factor));
  } catch (const EvaluationError&) {
  }
  return std::make_unique<IdentityPreconditioner>();
}

SolveReport minimize_pcg(const Objective& f, Eigen::VectorXd& x, const Preconditioner& P,
                         const SolverOptions& opt) {
  const auto t0 = Clock::now();
  SolveReport rep;
  rep.preconditioner = P.name();
  const std::size_t max_iter = opt.max_iter ? opt.max_iter : 5 * std::max<std::size_t>(f.size(), 1);

  Eigen::VectorXd g;
  double E = f.value_gradient(x, g);
  rep.energies.push_back(E);
  Eigen::VectorXd z = P.apply(g);
  Eigen::VectorXd d = -z;
  double gz = g.dot(z);
  double alpha_prev = 1.0;
  double slope_prev = 0.0;
  rep.reason = Termination::max_iter;

  Eigen::VectorXd x_new;
  Eigen::VectorXd g_new;
  while (rep.pcg_iterations < max_iter) {
    if (opt.gtol > 0.0 && sup_norm(g) <= opt.gtol) {
      rep.reason = Termination::converged;
      break;
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      d = -z;  // restart along the preconditioned steepest descent
      slope = -gz;
      if (!(slope < 0.0)) {
        rep.reason = Termination::descent_lost;
        break;
      }
    }

    double alpha = rep.pcg_iterations == 0 ? 1.0 : std::min(1.0, alpha_prev * slope_prev / slope);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) alpha = 1.0;
    const double alpha0 = alpha;
    // predicted decrease below the round-off of the energy sum
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(E));
    if (alpha0 * -slope <= noise) {
      rep.reason = Termination::descent_lost;
      break;
    }
    double E_new = 0.0;
    bool accepted = false;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
      x_new = x + alpha * d;
      E_new = safe_value(f, x_new);
      if (E_new <= E + opt.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      double next = opt.backtrack * alpha;
      if (std::isfinite(E_new)) {
        // minimiser of the quadratic through E, slope and E_new, kept in [0.1, 0.5] alpha
        const double q = -slope * alpha * alpha / (2.0 * (E_new - E - slope * alpha));
        if (std::isfinite(q)) next = std::clamp(q, 0.1 * alpha, opt.backtrack * alpha);
      }
      alpha = next;
    }
    if (!accepted) {
      // a failed search this close to the round-off floor is stagnation
      if (alpha0 * -slope <= 1e4 * noise) {
        rep.reason = Termination::descent_lost;
        break;
      }
      throw SolverError("line search failed after " + std::to_string(opt.max_backtracks) +
                        " backtracks along a descent direction (slope " + std::to_string(slope) + ")");
    }

    const double E_acc = f.value_gradient(x_new, g_new);
    if (E_acc > E) rep.monotone = false;
    x.swap(x_new);
    E = E_acc;
    ++rep.pcg_iterations;
    rep.energies.push_back(E);

    const Eigen::VectorXd z_new = P.apply(g_new);
    const double gz_new = g_new.dot(z_new);
    const double beta = std::max(0.0, (gz_new - g.dot(z_new)) / gz);  // PR+
    d = -z_new + beta * d;
    g.swap(g_new);
    z = z_new;
    gz = gz_new;
    alpha_prev = alpha;
    slope_prev = slope;
  }

  rep.energy = E;
  rep.grad_sup = sup_norm(g);
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

void newton_polish(const Objective& f, Eigen::VectorXd& x, int steps, SolveReport& rep) {
  const auto t0 = Clock::now();
  Eigen::VectorXd g;
  double E = f.value_gradient(x, g);
  rep.newton_residuals.push_back(sup_norm(g));
  SpdFactorization factor;
  for (int k = 0; k < steps; ++k) {
    if (!factor.factorize(f.hessian(x))) {
      throw SolverError("Newton step " + std::to_string(k + 1) +
                        ": Hessian is not positive definite (state is not near a strict minimiser)");
    }
    x -= factor.solve(g);
    E = f.value_gradient(x, g);
    rep.newton_residuals.push_back(sup_norm(g));
    ++rep.newton_steps;
  }
  rep.energy = E;
  rep.grad_sup = sup_norm(g);
  rep.wall_time_s += seconds_since(t0);
}

SolveReport minimize(const Objective& f, Eigen::VectorXd& x, const SolverOptions& opt) {
  const auto t0 = Clock::now();
  const auto P = default_preconditioner(f, x);
  SolveReport rep = minimize_pcg(f, x, *P, opt);
  newton_polish(f, x, opt.newton_steps, rep);
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

}  // namespace bqce
