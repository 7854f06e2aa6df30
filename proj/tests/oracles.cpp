#include "oracles.hpp"

#include <cmath>

namespace oracle {

Matrix riccati_p0(const Matrix& A, const Matrix& B, const Matrix& Q, double beta, double T,
                  double dt) {
  const auto n = A.rows();
  const Matrix gain = B * B.transpose() / beta;
  // Backward in t means forward in tau = T - t:
  //   dP/dtau = Q + A^T P + P A - P (B B^T / beta) P,  P(tau = 0) = 0.
  auto rhs = [&](const Matrix& p) -> Matrix {
    return Q + A.transpose() * p + p * A - p * gain * p;
  };
  const auto steps = static_cast<long>(std::llround(T / dt));
  Matrix p = Matrix::Zero(n, n);
  for (long k = 0; k < steps; ++k) {
    Matrix k1 = rhs(p);
    Matrix k2 = rhs(p + 0.5 * dt * k1);
    Matrix k3 = rhs(p + 0.5 * dt * k2);
    Matrix k4 = rhs(p + dt * k3);
    p += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return 0.5 * (p + p.transpose());
}

double lasso_objective(const Matrix& A, const Vector& b, double lambda, const Vector& w,
                       const Vector& x) {
  double data = (A * x - b).squaredNorm();
  double penalty = 0.0;
  for (int k = 0; k < x.size(); ++k) penalty += w[k] * std::abs(x[k]);
  return data + lambda * penalty;
}

Vector ista_lasso(const Matrix& A, const Vector& b, double lambda, const Vector& w,
                  double gap_tol, int max_iter) {
  const auto q = A.cols();
  const Matrix gram = A.transpose() * A;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const double lipschitz = 2.0 * eig.eigenvalues().maxCoeff();
  const double step = 1.0 / lipschitz;

  Vector x = Vector::Zero(q);
  double prev_obj = lasso_objective(A, b, lambda, w, x);
  for (int it = 0; it < max_iter; ++it) {
    Vector grad = 2.0 * (gram * x - A.transpose() * b);
    Vector z = x - step * grad;
    for (int k = 0; k < q; ++k) {
      double level = step * lambda * w[k];
      double mag = std::abs(z[k]) - level;
      x[k] = mag > 0.0 ? (z[k] > 0.0 ? mag : -mag) : 0.0;
    }
    double obj = lasso_objective(A, b, lambda, w, x);
    if (std::abs(prev_obj - obj) < gap_tol) break;
    prev_obj = obj;
  }
  return x;
}

void gauss_legendre(int n, Vector& nodes, Vector& weights) {
  Matrix jacobi = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double off = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  nodes = eig.eigenvalues();
  weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double first = eig.eigenvectors()(0, k);
    weights[k] = 2.0 * first * first;
  }
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                   double h_scale) {
  const Vector f0 = f(x);
  Matrix jac(f0.size(), x.size());
  Vector xp = x, xm = x;
  for (int j = 0; j < x.size(); ++j) {
    double h = h_scale * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    jac.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return jac;
}

}  // namespace oracle
