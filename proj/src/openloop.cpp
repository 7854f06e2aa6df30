#include "polyctrl/openloop.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace polyctrl {

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (max_iters < 1) throw ConfigError("iteration cap must be >= 1");
  if (linesearch_memory < 1) throw ConfigError("linesearch memory must be >= 1");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("armijo constant must be in (0,1)");
  if (!(eta_shrink > 0.0 && eta_shrink < 1.0)) throw ConfigError("shrink factor must be in (0,1)");
  if (!(bb_min < bb_max)) throw ConfigError("stepsize clamp must satisfy min < max");
}

ReducedGradient reduced_gradient(const ControlAffineProblem& problem, const Vector& x0,
                                 const ControlSignal& u, Scheme scheme) {
  ReducedGradient rg;
  rg.y = integrate_forward(problem, x0, u, scheme);
  rg.p = integrate_adjoint(problem, rg.y, u, scheme);
  rg.cost = quadrature_cost(problem, rg.y, u);

  const TimeGrid& grid = u.grid;
  const double two_beta = 2.0 * problem.control_penalty();
  rg.grad.resize(u.dim(), grid.num_nodes());
  for (int k = 0; k <= grid.steps; ++k) {
    rg.grad.col(k) =
        problem.control_transpose_apply(rg.y.values.col(k), rg.p.values.col(k)) +
        two_beta * u.values.col(k);
  }
  return rg;
}

double bb_stepsize(const Matrix& s, const Matrix& y, int iteration, const TimeGrid& grid,
                   double bb_min, double bb_max) {
  if (s.rows() != y.rows() || s.cols() != y.cols()) {
    throw ContractViolation("bb_stepsize: shape mismatch");
  }
  const bool odd = (iteration % 2) != 0;
  double num, den;
  if (odd) {
    num = l2_inner(s, y, grid);
    den = l2_inner(s, s, grid);
  } else {
    num = l2_inner(y, y, grid);
    den = l2_inner(s, y, grid);
  }
  if (!(den > 0.0) || !std::isfinite(den)) return 1.0;
  double alpha = num / den;
  if (!(alpha > 0.0) || !std::isfinite(alpha)) return 1.0;
  return std::clamp(alpha, bb_min, bb_max);
}

namespace {

// Adjoint solve and gradient assembly for a forward trajectory that is
// already available (the linesearch computes it while probing the cost).
ReducedGradient gradient_from_forward(const ControlAffineProblem& problem, Trajectory y,
                                      double cost, const ControlSignal& u, Scheme scheme) {
  ReducedGradient rg;
  rg.y = std::move(y);
  rg.p = integrate_adjoint(problem, rg.y, u, scheme);
  rg.cost = cost;
  const TimeGrid& grid = u.grid;
  const double two_beta = 2.0 * problem.control_penalty();
  rg.grad.resize(u.dim(), grid.num_nodes());
  for (int k = 0; k <= grid.steps; ++k) {
    rg.grad.col(k) =
        problem.control_transpose_apply(rg.y.values.col(k), rg.p.values.col(k)) +
        two_beta * u.values.col(k);
  }
  return rg;
}

}  // namespace

OpenLoopSolution solve_open_loop(const ControlAffineProblem& problem, const Vector& x0,
                                 const TimeGrid& grid, Scheme scheme,
                                 const SolverConfig& config) {
  config.validate();
  const int m = problem.control_dim();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // u_{-1} = 0, u_0 = -G(0).
  ControlSignal u_prev = ControlSignal::zero(grid, m);
  ReducedGradient rg_prev = reduced_gradient(problem, x0, u_prev, scheme);

  ControlSignal u(grid, m);
  u.values = -rg_prev.grad;
  ReducedGradient rg = reduced_gradient(problem, x0, u, scheme);

  Matrix diff_u = u.values - u_prev.values;
  Matrix diff_g = rg.grad - rg_prev.grad;

  std::deque<double> cost_window{rg_prev.cost, rg.cost};
  auto push_cost = [&](double c) {
    cost_window.push_back(c);
    while (static_cast<int>(cost_window.size()) > config.linesearch_memory) {
      cost_window.pop_front();
    }
  };

  OpenLoopSolution sol;
  int k = 0;
  double grad_norm = l2_norm(rg.grad, grid);

  while (grad_norm >= config.tol && k < config.max_iters) {
    const double alpha = bb_stepsize(diff_u, diff_g, k, grid, config.bb_min, config.bb_max);
    const Matrix direction = rg.grad / alpha;
    const double slope = l2_inner(rg.grad, direction, grid);
    double reference = -kInf;
    for (double c : cost_window) reference = std::max(reference, c);

    double eta = 1.0;
    ControlSignal u_trial(grid, m);
    Trajectory y_trial;
    double cost_trial = kInf;
    bool exhausted = false;
    while (true) {
      u_trial.values = u.values - eta * direction;
      try {
        y_trial = integrate_forward(problem, x0, u_trial, scheme);
        cost_trial = quadrature_cost(problem, y_trial, u_trial);
      } catch (const IntegrationError&) {
        cost_trial = kInf;  // reject the probe and keep shrinking
      }
      if (cost_trial <= reference - config.armijo_c * eta * slope) break;
      eta *= config.eta_shrink;
      if (eta < config.eta_min) {
        exhausted = true;
        break;
      }
    }
    if (exhausted) {
      ++sol.linesearch_failures;
      if (!std::isfinite(cost_trial)) {
        throw IntegrationError("trajectory diverges even at the minimal linesearch step", -1);
      }
      // Keep the smallest probed step and continue; the stepsize pair usually
      // recovers on the next iteration.
    }

    u_prev.values = u.values;
    const Matrix grad_prev = rg.grad;
    u.values = u_trial.values;
    rg = gradient_from_forward(problem, std::move(y_trial), cost_trial, u, scheme);
    diff_u = u.values - u_prev.values;
    diff_g = rg.grad - grad_prev;
    push_cost(rg.cost);
    grad_norm = l2_norm(rg.grad, grid);
    ++k;
  }

  sol.u_star = std::move(u);
  sol.y_star = std::move(rg.y);
  sol.p_star = std::move(rg.p);
  sol.cost = rg.cost;
  sol.value_gradient = sol.p_star.values.col(0);
  sol.iterations = k;
  sol.final_grad_norm = grad_norm;
  sol.converged = grad_norm < config.tol;
  return sol;
}

}  // namespace polyctrl
