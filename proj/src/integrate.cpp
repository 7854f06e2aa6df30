#include "polyctrl/integrate.hpp"

#include <cmath>

namespace polyctrl {

Scheme scheme_from_string(const std::string& s) {
  if (s == "rk4") return Scheme::RK4;
  if (s == "cn") return Scheme::CrankNicolson;
  throw ConfigError("unknown integrator '" + s + "' (expected rk4|cn)");
}

std::string to_string(Scheme s) { return s == Scheme::RK4 ? "rk4" : "cn"; }

TimeGrid::TimeGrid(double horizon, int num_steps) : T(horizon), steps(num_steps) {
  if (!(T > 0.0) || steps < 1) throw ContractViolation("time grid requires T > 0 and K >= 1");
}

TimeGrid TimeGrid::from_dt(double horizon, double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0)) {
    throw ContractViolation("time grid requires positive T and dt");
  }
  auto steps = static_cast<long long>(std::llround(horizon / dt));
  if (steps < 1 || std::abs(static_cast<double>(steps) * dt - horizon) >
                       1e-12 * std::max(1.0, std::abs(horizon))) {
    throw ConfigError("dt does not divide the horizon evenly");
  }
  return TimeGrid(horizon, static_cast<int>(steps));
}

Vector ControlSignal::at_time(double t) const {
  const double dt = grid.dt();
  double s = t / dt;
  int k = std::clamp(static_cast<int>(std::floor(s)), 0, grid.steps - 1);
  double w = std::clamp(s - k, 0.0, 1.0);
  return (1.0 - w) * values.col(k) + w * values.col(k + 1);
}

double l2_inner(const Matrix& a, const Matrix& b, const TimeGrid& grid) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.cols() != grid.num_nodes()) {
    throw ContractViolation("l2_inner: shape mismatch");
  }
  const int k_last = grid.steps;
  double total = 0.5 * (a.col(0).dot(b.col(0)) + a.col(k_last).dot(b.col(k_last)));
  for (int k = 1; k < k_last; ++k) total += a.col(k).dot(b.col(k));
  return total * grid.dt();
}

double l2_norm(const Matrix& a, const TimeGrid& grid) { return std::sqrt(l2_inner(a, a, grid)); }

namespace {

constexpr double kNewtonTol = 1e-10;
constexpr int kNewtonMaxIter = 50;

void check_state(const Vector& y, int step) {
  if (!y.allFinite()) {
    throw DivergenceError("state became non-finite at step " + std::to_string(step), step);
  }
}

Vector crank_nicolson_step(const ControlAffineProblem& problem, const Vector& yk,
                           const Vector& uk, const Vector& uk1, double dt, int step) {
  const Vector fk = eval_rhs(problem, yk, uk);
  Vector z = yk + dt * fk;  // explicit predictor
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    Vector residual = z - yk - 0.5 * dt * (fk + eval_rhs(problem, z, uk1));
    if (!residual.allFinite()) {
      throw DivergenceError("implicit step residual non-finite at step " + std::to_string(step),
                            step);
    }
    if (residual.norm() <= kNewtonTol) return z;
    Matrix jac = Matrix::Identity(z.size(), z.size()) - 0.5 * dt * problem.rhs_jacobian(z, uk1);
    z -= jac.partialPivLu().solve(residual);
  }
  throw IntegrationError("Newton iteration failed to converge at step " + std::to_string(step),
                         step);
}

}  // namespace

Trajectory integrate_forward(const ControlAffineProblem& problem, const Vector& x0,
                             const ControlSignal& u, Scheme scheme) {
  if (x0.size() != problem.state_dim()) {
    throw ContractViolation("integrate_forward: initial state dimension mismatch");
  }
  if (u.dim() != problem.control_dim()) {
    throw ContractViolation("integrate_forward: control dimension mismatch");
  }
  if (!x0.allFinite()) throw ContractViolation("integrate_forward: initial state not finite");

  const TimeGrid& grid = u.grid;
  const double dt = grid.dt();
  Trajectory traj(grid, problem.state_dim());
  Vector y = x0;
  traj.values.col(0) = y;

  for (int k = 0; k < grid.steps; ++k) {
    const Vector uk = u.values.col(k);
    if (scheme == Scheme::RK4) {
      const Vector uk1 = u.values.col(k + 1);
      const Vector um = u.mid(k);
      Vector s1 = eval_rhs(problem, y, uk);
      Vector s2 = eval_rhs(problem, y + 0.5 * dt * s1, um);
      Vector s3 = eval_rhs(problem, y + 0.5 * dt * s2, um);
      Vector s4 = eval_rhs(problem, y + dt * s3, uk1);
      y += (dt / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
    } else {
      y = crank_nicolson_step(problem, y, uk, u.values.col(k + 1), dt, k);
    }
    check_state(y, k + 1);
    traj.values.col(k + 1) = y;
  }
  return traj;
}

Trajectory integrate_adjoint(const ControlAffineProblem& problem, const Trajectory& y,
                             const ControlSignal& u, Scheme scheme) {
  if (!(y.grid == u.grid)) throw ContractViolation("integrate_adjoint: grids differ");
  if (y.dim() != problem.state_dim() || u.dim() != problem.control_dim()) {
    throw ContractViolation("integrate_adjoint: dimension mismatch");
  }

  const TimeGrid& grid = y.grid;
  const double dt = grid.dt();
  const int n = problem.state_dim();
  Trajectory adj(grid, n);
  Vector p = Vector::Zero(n);
  adj.values.col(grid.steps) = p;

  if (scheme == Scheme::RK4) {
    auto rhs = [&](const Vector& ys, const Vector& us, const Vector& ps) {
      return eval_adjoint_rhs(problem, ys, us, ps);
    };
    for (int k = grid.steps - 1; k >= 0; --k) {
      const Vector y_r = y.values.col(k + 1), y_l = y.values.col(k);
      const Vector y_m = 0.5 * (y_r + y_l);
      const Vector u_r = u.values.col(k + 1), u_l = u.values.col(k);
      const Vector u_m = 0.5 * (u_r + u_l);
      // RK4 on dp/dtau = rhs with tau = T - t.
      Vector s1 = rhs(y_r, u_r, p);
      Vector s2 = rhs(y_m, u_m, p + 0.5 * dt * s1);
      Vector s3 = rhs(y_m, u_m, p + 0.5 * dt * s2);
      Vector s4 = rhs(y_l, u_l, p + dt * s3);
      p += (dt / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
      check_state(p, k);
      adj.values.col(k) = p;
    }
  } else {
    // The adjoint equation is linear in p, so the trapezoidal step is a
    // single linear solve per step.
    const Matrix eye = Matrix::Identity(n, n);
    Matrix jac_next = problem.rhs_jacobian(y.values.col(grid.steps), u.values.col(grid.steps));
    Vector src_next = problem.running_cost_grad(y.values.col(grid.steps));
    for (int k = grid.steps - 1; k >= 0; --k) {
      Matrix jac_k = problem.rhs_jacobian(y.values.col(k), u.values.col(k));
      Vector src_k = problem.running_cost_grad(y.values.col(k));
      Vector rhs = p + 0.5 * dt * (jac_next.transpose() * p + src_next + src_k);
      p = (eye - 0.5 * dt * jac_k.transpose()).partialPivLu().solve(rhs);
      check_state(p, k);
      adj.values.col(k) = p;
      jac_next = std::move(jac_k);
      src_next = std::move(src_k);
    }
  }
  return adj;
}

double quadrature_cost(const ControlAffineProblem& problem, const Trajectory& y,
                       const ControlSignal& u) {
  if (!(y.grid == u.grid)) throw ContractViolation("quadrature_cost: grids differ");
  const TimeGrid& grid = y.grid;
  const double beta = problem.control_penalty();
  auto node_cost = [&](int k) {
    return problem.running_cost(y.values.col(k)) + beta * u.values.col(k).squaredNorm();
  };
  double total = 0.5 * (node_cost(0) + node_cost(grid.steps));
  for (int k = 1; k < grid.steps; ++k) total += node_cost(k);
  return total * grid.dt();
}

}  // namespace polyctrl
