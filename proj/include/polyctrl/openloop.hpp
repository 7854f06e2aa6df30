#pragma once

#include "polyctrl/integrate.hpp"
#include "polyctrl/problem.hpp"

namespace polyctrl {

// Settings for the two-point step-size gradient iteration.
struct SolverConfig {
  double tol = 1e-5;          // stopping tolerance on the control-space gradient norm
  int max_iters = 2000;
  int linesearch_memory = 10; // window of recent costs for the nonmonotone reference
  double armijo_c = 1e-4;
  double eta_shrink = 0.5;
  double eta_min = 1e-12;
  double bb_min = 1e-8;
  double bb_max = 1e8;

  void validate() const;
};

struct OpenLoopSolution {
  ControlSignal u_star;
  Trajectory y_star;
  Trajectory p_star;
  double cost = 0.0;                 // J(u*); equals the value at x0
  Vector value_gradient;             // p*(0)
  int iterations = 0;
  double final_grad_norm = 0.0;
  bool converged = false;
  int linesearch_failures = 0;

  double value() const { return cost; }
};

struct ReducedGradient {
  Matrix grad;   // m x (K+1), nodal samples of g(y)^T p + 2 beta u
  double cost = 0.0;
  Trajectory y;
  Trajectory p;
};

// One forward solve, one adjoint solve, cost quadrature, and the nodal
// gradient field.
ReducedGradient reduced_gradient(const ControlAffineProblem& problem, const Vector& x0,
                                 const ControlSignal& u, Scheme scheme);

// Two-point stepsize from the difference pair (S, Y) = (u_k - u_{k-1},
// G_k - G_{k-1}): (S,Y)/(S,S) on odd iterations, (Y,Y)/(S,Y) on even ones.
// Degenerate or non-positive values fall back to 1.0; the result is clamped
// to [bb_min, bb_max].
double bb_stepsize(const Matrix& s, const Matrix& y, int iteration, const TimeGrid& grid,
                   double bb_min = 1e-8, double bb_max = 1e8);

// Reduced-gradient descent with two-point stepsizes and a nonmonotone
// backtracking linesearch, started from u_{-1} = 0, u_0 = -G(0). Returns the
// final iterate either way; `converged` reports whether the gradient-norm
// tolerance was met within the iteration cap.
OpenLoopSolution solve_open_loop(const ControlAffineProblem& problem, const Vector& x0,
                                 const TimeGrid& grid, Scheme scheme,
                                 const SolverConfig& config = {});

}  // namespace polyctrl
