#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polyctrl/integrate.hpp"

using namespace polyctrl;

namespace {

// Terminal error of the forward solve of dot y = -y, y(0) = 1 at resolution dt.
double exp_decay_error(Scheme scheme, double dt) {
  oracle::ScalarLinearProblem problem(-1.0, 1.0, 0.0, 0.1, 1.0);
  TimeGrid grid = TimeGrid::from_dt(1.0, dt);
  ControlSignal u = ControlSignal::zero(grid, 1);
  Vector x0 = Vector::Constant(1, 1.0);
  Trajectory y = integrate_forward(problem, x0, u, scheme);
  return std::abs(y.values(0, grid.steps) - std::exp(-1.0));
}

}  // namespace

TEST_CASE("time grid construction") {
  TimeGrid g = TimeGrid::from_dt(3.0, 1e-3);
  CHECK(g.steps == 3000);
  CHECK(std::abs(g.steps * g.dt() - g.T) < 1e-12);
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(g.steps) == doctest::Approx(3.0));
  CHECK_THROWS_AS(TimeGrid::from_dt(1.0, 0.3), ConfigError);
  CHECK_THROWS_AS(TimeGrid(0.0, 10), ContractViolation);
}

TEST_CASE("exponential decay to quadrature accuracy") {
  CHECK(exp_decay_error(Scheme::RK4, 0.01) < 1e-6);
}

TEST_CASE("rk4 is fourth order, trapezoidal stepping second order") {
  double rk_coarse = exp_decay_error(Scheme::RK4, 0.02);
  double rk_fine = exp_decay_error(Scheme::RK4, 0.01);
  double ratio_rk = rk_coarse / rk_fine;
  CHECK(ratio_rk > 12.0);
  CHECK(ratio_rk < 20.0);

  double cn_coarse = exp_decay_error(Scheme::CrankNicolson, 0.02);
  double cn_fine = exp_decay_error(Scheme::CrankNicolson, 0.01);
  double ratio_cn = cn_coarse / cn_fine;
  CHECK(ratio_cn > 3.5);
  CHECK(ratio_cn < 4.5);
}

TEST_CASE("equilibria stay put") {
  VanDerPolProblem vdp;
  TimeGrid grid = TimeGrid::from_dt(3.0, 0.01);
  Trajectory y = integrate_forward(vdp, Vector::Zero(2), ControlSignal::zero(grid, 1),
                                   Scheme::RK4);
  CHECK(y.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("control interpolation is piecewise linear") {
  TimeGrid grid(1.0, 4);
  ControlSignal u(grid, 1);
  u.values << 0.0, 1.0, 0.0, 2.0, 2.0;
  CHECK(u.at_time(0.125)[0] == doctest::Approx(0.5));
  CHECK(u.at_time(0.25)[0] == doctest::Approx(1.0));
  CHECK(u.at_time(0.875)[0] == doctest::Approx(2.0));
  CHECK(u.mid(0)[0] == doctest::Approx(0.5));
}

TEST_CASE("divergence is reported with the step index") {
  oracle::ScalarLinearProblem problem(25.0, 1.0, 0.0, 0.1, 4.0);
  TimeGrid grid = TimeGrid::from_dt(4.0, 0.05);
  ControlSignal u = ControlSignal::zero(grid, 1);
  Vector x0 = Vector::Constant(1, 1e300);
  CHECK_THROWS_AS(integrate_forward(problem, x0, u, Scheme::RK4), DivergenceError);
}

TEST_CASE("zero running cost gives a zero adjoint") {
  oracle::ScalarLinearProblem problem(-0.4, 1.0, 0.0, 0.1, 2.0);
  TimeGrid grid = TimeGrid::from_dt(2.0, 0.01);
  ControlSignal u(grid, 1);
  u.values.setConstant(0.3);
  Trajectory y = integrate_forward(problem, Vector::Constant(1, 1.0), u, Scheme::RK4);
  for (Scheme scheme : {Scheme::RK4, Scheme::CrankNicolson}) {
    Trajectory p = integrate_adjoint(problem, y, u, scheme);
    CHECK(p.values.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("adjoint of the scalar linear problem matches the closed form") {
  // dot y = a y + u with constant u; cost y^2. The backward equation
  // -dot p = a p + 2 y(t), p(T) = 0 integrates in closed form.
  const double a = -0.7, ubar = 0.4, y0 = 1.3, T = 1.0;
  oracle::ScalarLinearProblem problem(a, 1.0, 1.0, 0.1, T);

  auto p_exact = [&](double t) {
    const double c = y0 + ubar / a;
    double term1 = c * std::exp(-a * t) * (std::exp(2.0 * a * T) - std::exp(2.0 * a * t)) / a;
    double term2 = -2.0 * (ubar / a) * (std::exp(a * (T - t)) - 1.0) / a;
    return term1 + term2;
  };

  TimeGrid grid = TimeGrid::from_dt(T, 1e-3);
  ControlSignal u(grid, 1);
  u.values.setConstant(ubar);
  Vector x0 = Vector::Constant(1, y0);

  Trajectory y = integrate_forward(problem, x0, u, Scheme::RK4);
  Trajectory p_rk = integrate_adjoint(problem, y, u, Scheme::RK4);
  CHECK(std::abs(p_rk.values(0, 0) - p_exact(0.0)) / std::abs(p_exact(0.0)) < 1e-7);
  CHECK(std::abs(p_rk.values(0, 500) - p_exact(0.5)) / std::abs(p_exact(0.5)) < 1e-7);

  Trajectory y_cn = integrate_forward(problem, x0, u, Scheme::CrankNicolson);
  Trajectory p_cn = integrate_adjoint(problem, y_cn, u, Scheme::CrankNicolson);
  CHECK(std::abs(p_cn.values(0, 0) - p_exact(0.0)) / std::abs(p_exact(0.0)) < 1e-4);
}

TEST_CASE("quadrature cost basics") {
  VanDerPolProblem vdp;
  TimeGrid grid = TimeGrid::from_dt(3.0, 0.1);

  Trajectory y(grid, 2);
  ControlSignal u = ControlSignal::zero(grid, 1);
  CHECK(quadrature_cost(vdp, y, u) == 0.0);

  // Constant state: the trapezoid is exact, cost = l(y) * T.
  y.values.colwise() = Vector::Constant(2, 1.5).eval();
  double expected = (1.5 * 1.5 * 2) * 3.0;
  CHECK(quadrature_cost(vdp, y, u) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("discrete inner product uses trapezoidal weights") {
  TimeGrid grid(1.0, 2);
  Matrix a(1, 3), b(1, 3);
  a << 1.0, 2.0, 3.0;
  b << 1.0, 1.0, 1.0;
  // dt = 0.5; weights (1/2, 1, 1/2) -> (0.5*1 + 2 + 0.5*3) * 0.5
  CHECK(l2_inner(a, b, grid) == doctest::Approx(2.0));
  CHECK(l2_norm(b, grid) == doctest::Approx(1.0));
}
