#pragma once

#include "polyctrl/types.hpp"

namespace polyctrl {

// Chebyshev-Gauss-Lobatto collocation of the second derivative on [-1,1]
// with homogeneous Neumann conditions condensed out. The full grid has
// n_colloc + 2 points; the two boundary values are expressed through the
// Neumann constraint and eliminated, leaving n_colloc retained unknowns.
struct ChebNeumannOperator {
  Vector nodes;        // retained (interior) nodes, strictly decreasing
  Matrix d2;           // n x n second-derivative operator on retained values
  Vector full_nodes;   // all n+2 grid points
  Matrix extension;    // (n+2) x n map from retained values to full grid values
  Vector quad_weights; // Clenshaw-Curtis weights on the full grid
};

ChebNeumannOperator build_cheb_collocation(int n_colloc);

}  // namespace polyctrl
