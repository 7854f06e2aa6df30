#include "polyctrl/chebyshev.hpp"

#include <cmath>

namespace polyctrl {

namespace {

// First-derivative collocation matrix on the Chebyshev-Gauss-Lobatto points
// x_j = cos(j pi / M), j = 0..M, with the negative-sum trick on the diagonal
// so that constants are annihilated exactly.
Matrix cheb_diff_matrix(const Vector& x) {
  const int m = static_cast<int>(x.size()) - 1;
  Vector c(m + 1);
  for (int i = 0; i <= m; ++i) c[i] = (i == 0 || i == m) ? 2.0 : 1.0;
  Matrix d(m + 1, m + 1);
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) {
      if (i == j) continue;
      double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = (c[i] / c[j]) * sign / (x[i] - x[j]);
    }
  }
  for (int i = 0; i <= m; ++i) {
    double row = 0.0;
    for (int j = 0; j <= m; ++j) {
      if (j != i) row += d(i, j);
    }
    d(i, i) = -row;
  }
  return d;
}

// Clenshaw-Curtis weights via the moment equations: W is fixed by requiring
// sum_j w_j T_k(x_j) = integral of T_k for k = 0..M. The Chebyshev-
// Vandermonde matrix at CGL nodes is well conditioned.
Vector clenshaw_curtis_weights(const Vector& x) {
  const int m = static_cast<int>(x.size()) - 1;
  Matrix vand(m + 1, m + 1);
  for (int j = 0; j <= m; ++j) {
    double tkm1 = 1.0, tk = x[j];
    vand(0, j) = 1.0;
    if (m >= 1) vand(1, j) = tk;
    for (int k = 2; k <= m; ++k) {
      double tk1 = 2.0 * x[j] * tk - tkm1;
      tkm1 = tk;
      tk = tk1;
      vand(k, j) = tk;
    }
  }
  Vector moments(m + 1);
  for (int k = 0; k <= m; ++k) {
    moments[k] = (k % 2 == 0) ? 2.0 / (1.0 - static_cast<double>(k) * k) : 0.0;
  }
  return vand.partialPivLu().solve(moments);
}

}  // namespace

ChebNeumannOperator build_cheb_collocation(int n_colloc) {
  if (n_colloc < 4) throw ContractViolation("collocation needs at least 4 retained nodes");
  const int m = n_colloc + 1;  // full grid has m+1 points, indices 0..m

  ChebNeumannOperator op;
  op.full_nodes.resize(m + 1);
  for (int j = 0; j <= m; ++j) op.full_nodes[j] = std::cos(M_PI * j / m);

  Matrix d1 = cheb_diff_matrix(op.full_nodes);
  Matrix d2 = d1 * d1;

  // Neumann constraints (d1 y)_0 = (d1 y)_m = 0 define the boundary values in
  // terms of the interior ones.
  Eigen::Matrix2d corner;
  corner << d1(0, 0), d1(0, m), d1(m, 0), d1(m, m);
  Matrix rhs(2, n_colloc);
  for (int j = 1; j < m; ++j) {
    rhs(0, j - 1) = -d1(0, j);
    rhs(1, j - 1) = -d1(m, j);
  }
  Matrix bound = corner.partialPivLu().solve(rhs);  // 2 x n_colloc

  op.extension = Matrix::Zero(m + 1, n_colloc);
  op.extension.row(0) = bound.row(0);
  op.extension.row(m) = bound.row(1);
  for (int j = 1; j < m; ++j) op.extension(j, j - 1) = 1.0;

  op.d2 = d2.middleRows(1, n_colloc) * op.extension;
  op.nodes = op.full_nodes.segment(1, n_colloc);
  op.quad_weights = clenshaw_curtis_weights(op.full_nodes);
  return op;
}

}  // namespace polyctrl
