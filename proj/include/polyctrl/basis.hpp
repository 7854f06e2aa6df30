#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polyctrl/types.hpp"

namespace polyctrl {

enum class IndexKind { TensorProduct, TotalDegree, HyperbolicCross };
enum class BasisKind { Legendre, Chebyshev };

IndexKind index_kind_from_string(const std::string& s);
BasisKind basis_kind_from_string(const std::string& s);
std::string to_string(IndexKind k);
std::string to_string(BasisKind k);

// An ordered set of multi-indices in N_0^n. Construction enumerates
//   TensorProduct:   max_j i_j <= s
//   TotalDegree:     sum_j i_j <= s
//   HyperbolicCross: prod_j (i_j + 1) <= s + 1
// ordered by prod_j (i_j + 1) with lexicographic tie-breaking, so the zero
// index always comes first and orderings are comparable across runs.
class MultiIndexSet {
public:
  MultiIndexSet() = default;  // empty set; populate through build()
  static MultiIndexSet build(int n, int s, IndexKind kind, std::int64_t cap = 10'000'000);

  int dim() const { return n_; }
  int order() const { return s_; }
  IndexKind kind() const { return kind_; }
  int size() const { return q_; }
  int degree(int k, int j) const { return flat_[static_cast<std::size_t>(k) * n_ + j]; }
  const int* index(int k) const { return flat_.data() + static_cast<std::size_t>(k) * n_; }
  int max_degree() const { return max_degree_; }

  bool contains(const std::vector<int>& idx) const;

private:
  int n_ = 0, s_ = 0, q_ = 0, max_degree_ = 0;
  IndexKind kind_ = IndexKind::HyperbolicCross;
  std::vector<int> flat_;
};

// Cardinality without materializing the set (exact while it fits a double).
double index_set_cardinality(int n, int s, IndexKind kind);

// min{ 2 s^3 4^n, e^2 s^(2 + log2 n) }, the coarse size estimate used for
// diagnostics and the resource cap message.
double hc_cardinality_bound(int n, int s);

// Orthonormal univariate value and derivative at z. Legendre is orthonormal
// for Lebesgue measure on (-1,1); Chebyshev for the normalized arcsine
// measure. Evaluation runs through three-term recurrences, which extend
// polynomially outside [-1,1]; inputs within 1e-12 of the interval are
// snapped onto it.
struct Eval {
  double value;
  double derivative;
};
Eval eval_univariate(BasisKind kind, int degree, double z);

// Tensorized basis row evaluation with per-coordinate value/derivative
// tables and prefix/suffix products (O(n q) for the full gradient). Holds
// scratch space; create one per thread.
class BasisEvaluator {
public:
  BasisEvaluator(const MultiIndexSet& set, BasisKind kind);

  // phi[k] = prod_j phi_{i_j}(z_j); resized to q.
  void eval(const Vector& z, Vector& phi);
  // Additionally grad(j, k) = d phi_k / d z_j; resized to n x q.
  void eval_with_grad(const Vector& z, Vector& phi, Matrix& grad);

  const MultiIndexSet& set() const { return set_; }
  BasisKind kind() const { return kind_; }

private:
  void fill_tables(const Vector& z);

  const MultiIndexSet& set_;
  BasisKind kind_;
  Matrix values_, derivs_;       // (max_degree+1) x n tables
  std::vector<double> prefix_, suffix_;
};

// Affine map between a sampling hyperrectangle and the unit cube [-1,1]^n.
struct DomainMap {
  Vector lo, hi;

  DomainMap() = default;
  DomainMap(Vector lo_in, Vector hi_in);

  int dim() const { return static_cast<int>(lo.size()); }
  Vector to_unit(const Vector& x) const;
  Vector from_unit(const Vector& z) const;
  // dz/dx, the constant diagonal 2/(hi - lo).
  Vector jacobian_diag() const;
};

// w_k = prod_j (1 + i_j)^(alpha/2); alpha must be finite here. The
// "no regularization" setting (alpha = -inf) never reaches this function --
// the regression layer drops the l1 term instead.
Vector hyperbolic_cross_weights(const MultiIndexSet& set, double alpha);

}  // namespace polyctrl
