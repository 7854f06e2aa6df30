#pragma once

// Independent references used by the unit and acceptance suites. Everything
// here is deliberately written against the math, not against the library
// implementation it checks.

#include <functional>

#include "polyctrl/openloop.hpp"
#include "polyctrl/problem.hpp"

namespace oracle {

using polyctrl::Matrix;
using polyctrl::Vector;

// Finite-horizon Riccati solution P(0) for
//   dot y = A y + B u,  cost integral y^T Q y + beta |u|^2,
// integrated backward from P(T) = 0 with RK4 at the given step.
Matrix riccati_p0(const Matrix& A, const Matrix& B, const Matrix& Q, double beta, double T,
                  double dt);

// Proximal-gradient (ISTA) reference for
//   min |A x - b|^2 + lambda sum_k w_k |x_k|
// run until the successive objective gap falls below gap_tol.
Vector ista_lasso(const Matrix& A, const Vector& b, double lambda, const Vector& w,
                  double gap_tol = 1e-10, int max_iter = 400000);

double lasso_objective(const Matrix& A, const Vector& b, double lambda, const Vector& w,
                       const Vector& x);

// Gauss-Legendre nodes/weights on [-1,1] via the Jacobi matrix eigenproblem.
void gauss_legendre(int n, Vector& nodes, Vector& weights);

// Central finite-difference Jacobian of a vector field.
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                   double h_scale = 1e-5);

// ---------------------------------------------------------------------------
// Small configurable problems for integrator and solver tests
// ---------------------------------------------------------------------------

// Scalar dynamics dot y = a y + g u with running cost c y^2.
class ScalarLinearProblem final : public polyctrl::ControlAffineProblem {
public:
  ScalarLinearProblem(double a, double g, double cost_coeff, double beta, double T)
      : ControlAffineProblem("scalar-linear", 1, 1, beta, T, Vector::Constant(1, -1.0),
                             Vector::Constant(1, 1.0)),
        a_(a), g_(g), c_(cost_coeff) {}

  Vector drift(const Vector& y) const override { return a_ * y; }
  Matrix control_map(const Vector&) const override { return Matrix::Constant(1, 1, g_); }
  Vector rhs_jac_transpose_apply(const Vector&, const Vector&, const Vector& p) const override {
    return a_ * p;
  }
  double running_cost(const Vector& y) const override { return c_ * y.squaredNorm(); }
  Vector running_cost_grad(const Vector& y) const override { return 2.0 * c_ * y; }
  bool has_rhs_jacobian() const override { return true; }
  Matrix rhs_jacobian(const Vector&, const Vector&) const override {
    return Matrix::Constant(1, 1, a_);
  }

private:
  double a_, g_, c_;
};

}  // namespace oracle
