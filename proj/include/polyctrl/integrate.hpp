#pragma once

#include "polyctrl/problem.hpp"
#include "polyctrl/types.hpp"

namespace polyctrl {

enum class Scheme { RK4, CrankNicolson };

Scheme scheme_from_string(const std::string& s);
std::string to_string(Scheme s);

// Uniform grid on [0, T] with K steps; K * dt == T is enforced exactly by
// storing K and deriving dt.
struct TimeGrid {
  double T = 1.0;
  int steps = 1;

  TimeGrid() = default;
  TimeGrid(double horizon, int num_steps);
  static TimeGrid from_dt(double horizon, double dt);

  double dt() const { return T / steps; }
  int num_nodes() const { return steps + 1; }
  double node(int k) const { return T * (static_cast<double>(k) / steps); }
  bool operator==(const TimeGrid& o) const { return T == o.T && steps == o.steps; }
};

// State samples at the grid nodes, one column per node.
struct Trajectory {
  TimeGrid grid;
  Matrix values;  // n x (K+1)

  Trajectory() = default;
  Trajectory(const TimeGrid& g, int dim) : grid(g), values(Matrix::Zero(dim, g.num_nodes())) {}
  int dim() const { return static_cast<int>(values.rows()); }
};

// Control samples at the grid nodes, piecewise linear in between.
struct ControlSignal {
  TimeGrid grid;
  Matrix values;  // m x (K+1)

  ControlSignal() = default;
  ControlSignal(const TimeGrid& g, int dim) : grid(g), values(Matrix::Zero(dim, g.num_nodes())) {}
  static ControlSignal zero(const TimeGrid& g, int dim) { return ControlSignal(g, dim); }

  int dim() const { return static_cast<int>(values.rows()); }
  Vector mid(int k) const { return 0.5 * (values.col(k) + values.col(k + 1)); }
  Vector at_time(double t) const;
};

// Discrete L^2(0,T) inner product of two node-sampled fields (trapezoidal
// weights). Shapes must match.
double l2_inner(const Matrix& a, const Matrix& b, const TimeGrid& grid);
double l2_norm(const Matrix& a, const TimeGrid& grid);

// Solves dy/dt = f(y) + g(y) u, y(0) = x0 on u.grid. Crank-Nicolson resolves
// each step by Newton iteration (residual tolerance 1e-10, at most 50 sweeps)
// with the problem's Jacobian, or a finite-difference one when none is
// registered.
Trajectory integrate_forward(const ControlAffineProblem& problem, const Vector& x0,
                             const ControlSignal& u, Scheme scheme);

// Solves -dp/dt = (d/dy (f + g u))^T p + grad l(y), p(T) = 0 backward on the
// grid shared by y and u, with the same order of accuracy as the forward pass.
Trajectory integrate_adjoint(const ControlAffineProblem& problem, const Trajectory& y,
                             const ControlSignal& u, Scheme scheme);

// Trapezoidal approximation of integral_0^T l(y) + beta |u|^2 dt.
double quadrature_cost(const ControlAffineProblem& problem, const Trajectory& y,
                       const ControlSignal& u);

}  // namespace polyctrl
