#pragma once

#include <functional>
#include <limits>

#include "tomoed/numerics.hpp"

namespace tomoed {

/// Twice-differentiable convex function on R^d. eval returns +inf outside the
/// domain; grad/hess are filled only when non-null (and only inside the
/// domain).
using SmoothFn = std::function<double(const RVec& z, RVec* grad, RMat* hess)>;

struct BarrierOptions {
  double mu0 = 1.0;
  double mu_factor = 0.1;
  double gap_tol = 1e-9;        // outer stop: degree * mu <= gap_tol
  double newton_tol = 1e-12;    // inner stop: decrement^2/2 <= tol*(1+|f|)
  int max_newton_per_stage = 200;
  int max_total_newton = 20000;
  double alpha = 0.01;          // line search sufficient-decrease
  double beta = 0.5;            // line search backtracking factor
};

struct BarrierResult {
  RVec z;
  double objective = std::numeric_limits<double>::quiet_NaN();  // f(z), no barrier
  double gap = 0.0;             // certified duality gap: degree * mu_final
  double mu_final = 0.0;
  int newton_iters = 0;
  double grad_norm = 0.0;       // |grad of f + mu*phi| at the solution
  bool converged = false;
};

/// Minimize f(z) + mu*phi(z) along the standard decreasing-mu central path.
/// `degree` is the barrier's cone degree (log-det of an n x n block counts n,
/// each scalar log counts 1); it controls the certified gap degree*mu.
/// Throws SolverMaxIter when the Newton budget is exhausted.
BarrierResult barrier_minimize(const SmoothFn& f, const SmoothFn& phi, double degree, RVec z0,
                               const BarrierOptions& opts = {});

/// Damped-Newton minimization of a single smooth convex function (used for the
/// mu-stages and for refinement loops).
struct NewtonResult {
  RVec z;
  double value = 0.0;
  int iters = 0;
  bool converged = false;
};
NewtonResult newton_minimize(const SmoothFn& f, RVec z0, double tol, int max_iter, double alpha = 0.01,
                             double beta = 0.5);

}  // namespace tomoed
