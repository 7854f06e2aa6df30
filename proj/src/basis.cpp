#include "polyctrl/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace polyctrl {

IndexKind index_kind_from_string(const std::string& s) {
  if (s == "tp") return IndexKind::TensorProduct;
  if (s == "td") return IndexKind::TotalDegree;
  if (s == "hc") return IndexKind::HyperbolicCross;
  throw ConfigError("unknown index set kind '" + s + "' (expected tp|td|hc)");
}

BasisKind basis_kind_from_string(const std::string& s) {
  if (s == "legendre") return BasisKind::Legendre;
  if (s == "chebyshev") return BasisKind::Chebyshev;
  throw ConfigError("unknown basis kind '" + s + "' (expected legendre|chebyshev)");
}

std::string to_string(IndexKind k) {
  switch (k) {
    case IndexKind::TensorProduct: return "tp";
    case IndexKind::TotalDegree: return "td";
    case IndexKind::HyperbolicCross: return "hc";
  }
  return "?";
}

std::string to_string(BasisKind k) {
  return k == BasisKind::Legendre ? "legendre" : "chebyshev";
}

namespace {

std::uint64_t index_weight(const int* idx, int n) {
  std::uint64_t prod = 1;
  for (int j = 0; j < n; ++j) prod *= static_cast<std::uint64_t>(idx[j] + 1);
  return prod;
}

// Depth-first enumeration with per-kind pruning; never touches the tensor
// grid outside the admissible region.
void enumerate(int n, int s, IndexKind kind, std::int64_t cap, std::vector<int>& cur, int dim,
               std::int64_t budget_used, std::uint64_t prod, std::vector<int>& out,
               std::int64_t& count) {
  if (dim == n) {
    ++count;
    if (count > cap) {
      throw ResourceError("index set exceeds the cardinality cap of " + std::to_string(cap));
    }
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int d = 0;; ++d) {
    bool admissible = true;
    switch (kind) {
      case IndexKind::TensorProduct:
        admissible = d <= s;
        break;
      case IndexKind::TotalDegree:
        admissible = budget_used + d <= s;
        break;
      case IndexKind::HyperbolicCross:
        admissible = prod * static_cast<std::uint64_t>(d + 1) <= static_cast<std::uint64_t>(s) + 1;
        break;
    }
    if (!admissible) break;
    cur[dim] = d;
    enumerate(n, s, kind, cap, cur, dim + 1, budget_used + d,
              prod * static_cast<std::uint64_t>(d + 1), out, count);
  }
  cur[dim] = 0;
}

void count_only(int n, int s, IndexKind kind, int dim, std::int64_t budget_used,
                std::uint64_t prod, double& count) {
  if (dim == n) {
    count += 1.0;
    return;
  }
  for (int d = 0;; ++d) {
    bool admissible = true;
    switch (kind) {
      case IndexKind::TensorProduct:
        admissible = d <= s;
        break;
      case IndexKind::TotalDegree:
        admissible = budget_used + d <= s;
        break;
      case IndexKind::HyperbolicCross:
        admissible = prod * static_cast<std::uint64_t>(d + 1) <= static_cast<std::uint64_t>(s) + 1;
        break;
    }
    if (!admissible) break;
    count_only(n, s, kind, dim + 1, budget_used + d, prod * static_cast<std::uint64_t>(d + 1),
               count);
  }
}

}  // namespace

MultiIndexSet MultiIndexSet::build(int n, int s, IndexKind kind, std::int64_t cap) {
  if (n < 1) throw ContractViolation("index set dimension must be >= 1");
  if (s < 0) throw ContractViolation("index set order must be >= 0");

  MultiIndexSet set;
  set.n_ = n;
  set.s_ = s;
  set.kind_ = kind;

  // Cheap cardinality pre-check so hopeless requests fail before enumeration.
  double predicted = index_set_cardinality(n, s, kind);
  if (predicted > static_cast<double>(cap)) {
    throw ResourceError("index set of predicted size " + std::to_string(predicted) +
                        " exceeds the cardinality cap of " + std::to_string(cap));
  }

  std::vector<int> cur(n, 0);
  std::int64_t count = 0;
  enumerate(n, s, kind, cap, cur, 0, 0, 1, set.flat_, count);
  set.q_ = static_cast<int>(count);

  // Graded ordering: by prod (i_j + 1), ties lexicographic.
  std::vector<int> perm(set.q_);
  std::iota(perm.begin(), perm.end(), 0);
  const auto* data = set.flat_.data();
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    const int* ia = data + static_cast<std::size_t>(a) * n;
    const int* ib = data + static_cast<std::size_t>(b) * n;
    std::uint64_t wa = index_weight(ia, n);
    std::uint64_t wb = index_weight(ib, n);
    if (wa != wb) return wa < wb;
    return std::lexicographical_compare(ia, ia + n, ib, ib + n);
  });
  std::vector<int> sorted(set.flat_.size());
  for (int k = 0; k < set.q_; ++k) {
    std::copy_n(data + static_cast<std::size_t>(perm[k]) * n, n,
                sorted.begin() + static_cast<std::size_t>(k) * n);
  }
  set.flat_ = std::move(sorted);
  set.max_degree_ = set.flat_.empty() ? 0 : *std::max_element(set.flat_.begin(), set.flat_.end());
  return set;
}

bool MultiIndexSet::contains(const std::vector<int>& idx) const {
  if (static_cast<int>(idx.size()) != n_) return false;
  for (int k = 0; k < q_; ++k) {
    if (std::equal(idx.begin(), idx.end(), index(k))) return true;
  }
  return false;
}

double index_set_cardinality(int n, int s, IndexKind kind) {
  if (n < 1 || s < 0) throw ContractViolation("bad index set parameters");
  switch (kind) {
    case IndexKind::TensorProduct:
      return std::pow(static_cast<double>(s) + 1.0, n);
    case IndexKind::TotalDegree: {
      // 1 + sum_{j=1..s} C(n+j-1, j)
      double total = 1.0;
      double binom = 1.0;  // C(n-1+j, j), starting at j=0
      for (int j = 1; j <= s; ++j) {
        binom *= static_cast<double>(n - 1 + j) / j;
        total += binom;
      }
      return total;
    }
    case IndexKind::HyperbolicCross: {
      double count = 0.0;
      count_only(n, s, kind, 0, 0, 1, count);
      return count;
    }
  }
  return 0.0;
}

double hc_cardinality_bound(int n, int s) {
  if (n < 1 || s < 1) throw ContractViolation("hc_cardinality_bound requires n >= 1, s >= 1");
  double b1 = 2.0 * std::pow(static_cast<double>(s), 3) * std::pow(4.0, n);
  double b2 = std::exp(2.0) * std::pow(static_cast<double>(s), 2.0 + std::log2(static_cast<double>(n)));
  return std::min(b1, b2);
}

namespace {

constexpr double kUnitOvershoot = 1e-12;

double snap_to_unit(double z) {
  if (z > 1.0 && z <= 1.0 + kUnitOvershoot) return 1.0;
  if (z < -1.0 && z >= -1.0 - kUnitOvershoot) return -1.0;
  return z;
}

// Legendre values/derivatives up to max_deg via the three-term recurrence and
// the derivative recurrence P'_{k+1} = (2k+1) P_k + P'_{k-1}, then scaled by
// sqrt(k + 1/2) for unit L^2(-1,1) norm.
void legendre_table(int max_deg, double z, double* val, double* der) {
  double pkm1 = 1.0, pk = z;      // P_0, P_1
  double dkm1 = 0.0, dk = 1.0;    // P'_0, P'_1
  val[0] = std::sqrt(0.5) * pkm1;
  der[0] = 0.0;
  if (max_deg >= 1) {
    double c = std::sqrt(1.5);
    val[1] = c * pk;
    der[1] = c * dk;
  }
  for (int k = 1; k < max_deg; ++k) {
    double pk1 = ((2.0 * k + 1.0) * z * pk - k * pkm1) / (k + 1.0);
    double dk1 = (2.0 * k + 1.0) * pk + dkm1;
    pkm1 = pk; pk = pk1;
    dkm1 = dk; dk = dk1;
    double c = std::sqrt(k + 1.5);
    val[k + 1] = c * pk;
    der[k + 1] = c * dk;
  }
}

// Chebyshev via T_k and U_k recurrences: phi_0 = 1, phi_k = sqrt(2) T_k, and
// phi'_k = sqrt(2) k U_{k-1}. The recurrences are exact at the endpoints.
void chebyshev_table(int max_deg, double z, double* val, double* der) {
  val[0] = 1.0;
  der[0] = 0.0;
  if (max_deg < 1) return;
  const double r2 = std::sqrt(2.0);
  double tkm1 = 1.0, tk = z;        // T_0, T_1
  double ukm1 = 1.0;                // U_0
  val[1] = r2 * tk;
  der[1] = r2 * 1.0 * ukm1;
  double uk = 2.0 * z;              // U_1
  for (int k = 2; k <= max_deg; ++k) {
    double tk1 = 2.0 * z * tk - tkm1;
    tkm1 = tk; tk = tk1;
    val[k] = r2 * tk;
    der[k] = r2 * k * uk;           // U_{k-1}
    double uk1 = 2.0 * z * uk - ukm1;
    ukm1 = uk; uk = uk1;
  }
}

}  // namespace

Eval eval_univariate(BasisKind kind, int degree, double z) {
  if (degree < 0) throw ContractViolation("polynomial degree must be >= 0");
  z = snap_to_unit(z);
  std::vector<double> val(degree + 1), der(degree + 1);
  if (kind == BasisKind::Legendre) {
    legendre_table(degree, z, val.data(), der.data());
  } else {
    chebyshev_table(degree, z, val.data(), der.data());
  }
  return {val[degree], der[degree]};
}

BasisEvaluator::BasisEvaluator(const MultiIndexSet& set, BasisKind kind)
    : set_(set), kind_(kind) {
  values_.resize(set.max_degree() + 1, set.dim());
  derivs_.resize(set.max_degree() + 1, set.dim());
  prefix_.resize(set.dim() + 1);
  suffix_.resize(set.dim() + 1);
}

void BasisEvaluator::fill_tables(const Vector& z) {
  if (static_cast<int>(z.size()) != set_.dim()) {
    throw ContractViolation("basis evaluation point has wrong dimension");
  }
  const int max_deg = set_.max_degree();
  for (int j = 0; j < set_.dim(); ++j) {
    double zj = snap_to_unit(z[j]);
    if (kind_ == BasisKind::Legendre) {
      legendre_table(max_deg, zj, values_.col(j).data(), derivs_.col(j).data());
    } else {
      chebyshev_table(max_deg, zj, values_.col(j).data(), derivs_.col(j).data());
    }
  }
}

void BasisEvaluator::eval(const Vector& z, Vector& phi) {
  fill_tables(z);
  const int n = set_.dim(), q = set_.size();
  phi.resize(q);
  for (int k = 0; k < q; ++k) {
    const int* idx = set_.index(k);
    double prod = 1.0;
    for (int j = 0; j < n; ++j) prod *= values_(idx[j], j);
    phi[k] = prod;
  }
}

void BasisEvaluator::eval_with_grad(const Vector& z, Vector& phi, Matrix& grad) {
  fill_tables(z);
  const int n = set_.dim(), q = set_.size();
  phi.resize(q);
  grad.resize(n, q);
  for (int k = 0; k < q; ++k) {
    const int* idx = set_.index(k);
    prefix_[0] = 1.0;
    for (int j = 0; j < n; ++j) prefix_[j + 1] = prefix_[j] * values_(idx[j], j);
    suffix_[n] = 1.0;
    for (int j = n - 1; j >= 0; --j) suffix_[j] = values_(idx[j], j) * suffix_[j + 1];
    phi[k] = prefix_[n];
    for (int j = 0; j < n; ++j) {
      grad(j, k) = prefix_[j] * derivs_(idx[j], j) * suffix_[j + 1];
    }
  }
}

DomainMap::DomainMap(Vector lo_in, Vector hi_in) : lo(std::move(lo_in)), hi(std::move(hi_in)) {
  if (lo.size() != hi.size()) throw ContractViolation("domain bounds differ in dimension");
  for (int i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw ContractViolation("domain requires lo < hi componentwise");
  }
}

Vector DomainMap::to_unit(const Vector& x) const {
  if (x.size() != lo.size()) throw ContractViolation("domain map input has wrong dimension");
  return ((2.0 * x - lo - hi).array() / (hi - lo).array()).matrix();
}

Vector DomainMap::from_unit(const Vector& z) const {
  if (z.size() != lo.size()) throw ContractViolation("domain map input has wrong dimension");
  return (lo.array() + 0.5 * (z.array() + 1.0) * (hi - lo).array()).matrix();
}

Vector DomainMap::jacobian_diag() const {
  return (2.0 / (hi - lo).array()).matrix();
}

Vector hyperbolic_cross_weights(const MultiIndexSet& set, double alpha) {
  if (!std::isfinite(alpha)) {
    throw ContractViolation("weight exponent must be finite here; the -inf setting disables the "
                            "l1 term upstream");
  }
  Vector w(set.size());
  for (int k = 0; k < set.size(); ++k) {
    const int* idx = set.index(k);
    double log_v = 0.0;
    for (int j = 0; j < set.dim(); ++j) log_v += std::log1p(static_cast<double>(idx[j]));
    w[k] = std::exp(0.5 * alpha * log_v);
  }
  return w;
}

}  // namespace polyctrl
