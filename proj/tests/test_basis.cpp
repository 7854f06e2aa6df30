#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "polyctrl/basis.hpp"

using namespace polyctrl;

namespace {

// Brute-force reference: filter the total-degree superset (valid because the
// cross set is contained in it at equal order).
std::vector<std::vector<int>> brute_force_hc(int n, int s) {
  MultiIndexSet td = MultiIndexSet::build(n, s, IndexKind::TotalDegree);
  std::vector<std::vector<int>> kept;
  for (int k = 0; k < td.size(); ++k) {
    long long prod = 1;
    std::vector<int> idx(n);
    for (int j = 0; j < n; ++j) {
      idx[j] = td.degree(k, j);
      prod *= idx[j] + 1;
    }
    if (prod <= s + 1) kept.push_back(std::move(idx));
  }
  return kept;
}

}  // namespace

TEST_CASE("hyperbolic cross cardinalities match the reported settings") {
  CHECK(MultiIndexSet::build(2, 16, IndexKind::HyperbolicCross).size() == 52);
  CHECK(MultiIndexSet::build(18, 4, IndexKind::HyperbolicCross).size() == 226);
  CHECK(MultiIndexSet::build(18, 8, IndexKind::HyperbolicCross).size() == 1879);
  CHECK(MultiIndexSet::build(80, 4, IndexKind::HyperbolicCross).size() == 3481);
}

TEST_CASE("cross set agrees with the brute-force filter for small dimensions") {
  for (auto [n, s] : {std::pair{2, 16}, {3, 7}, {4, 5}, {6, 8}}) {
    MultiIndexSet set = MultiIndexSet::build(n, s, IndexKind::HyperbolicCross);
    auto expected = brute_force_hc(n, s);
    REQUIRE(set.size() == static_cast<int>(expected.size()));
    for (const auto& idx : expected) CHECK(set.contains(idx));
  }
}

TEST_CASE("tensor and total degree counts") {
  CHECK(MultiIndexSet::build(3, 2, IndexKind::TensorProduct).size() == 27);
  CHECK(index_set_cardinality(3, 2, IndexKind::TensorProduct) == doctest::Approx(27));
  CHECK(index_set_cardinality(80, 4, IndexKind::TotalDegree) == doctest::Approx(1929501));
  CHECK(index_set_cardinality(80, 4, IndexKind::TensorProduct) ==
        doctest::Approx(8.27e55).epsilon(0.01));
}

TEST_CASE("cardinality bound") {
  double bound = hc_cardinality_bound(80, 4);
  CHECK(bound == doctest::Approx(7.56e5).epsilon(0.01));
  CHECK(3481.0 <= bound);
  for (int s = 1; s <= 10; ++s) CHECK(hc_cardinality_bound(1, s) >= s + 1);
}

TEST_CASE("cardinality cap raises a resource error") {
  CHECK_THROWS_AS(MultiIndexSet::build(10, 9, IndexKind::TensorProduct, 1000), ResourceError);
}

TEST_CASE("ordering is graded with the zero index first") {
  MultiIndexSet set = MultiIndexSet::build(3, 6, IndexKind::HyperbolicCross);
  for (int j = 0; j < 3; ++j) CHECK(set.degree(0, j) == 0);
  long long prev = 0;
  for (int k = 0; k < set.size(); ++k) {
    long long prod = 1;
    for (int j = 0; j < 3; ++j) prod *= set.degree(k, j) + 1;
    CHECK(prod >= prev);
    prev = prod;
  }
}

TEST_CASE("index sets are nested in the order and across kinds") {
  for (int s = 0; s <= 5; ++s) {
    MultiIndexSet hc = MultiIndexSet::build(3, s, IndexKind::HyperbolicCross);
    MultiIndexSet hc_next = MultiIndexSet::build(3, s + 1, IndexKind::HyperbolicCross);
    MultiIndexSet td = MultiIndexSet::build(3, s, IndexKind::TotalDegree);
    MultiIndexSet tp = MultiIndexSet::build(3, s, IndexKind::TensorProduct);
    for (int k = 0; k < hc.size(); ++k) {
      std::vector<int> idx(hc.index(k), hc.index(k) + 3);
      CHECK(hc_next.contains(idx));
      CHECK(td.contains(idx));
    }
    for (int k = 0; k < td.size(); ++k) {
      std::vector<int> idx(td.index(k), td.index(k) + 3);
      CHECK(tp.contains(idx));
    }
  }
}

TEST_CASE("univariate normalization constants") {
  auto [v0, d0] = eval_univariate(BasisKind::Legendre, 0, 0.37);
  CHECK(v0 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(d0 == 0.0);
  auto [v1, d1] = eval_univariate(BasisKind::Legendre, 1, 0.37);
  CHECK(v1 == doctest::Approx(std::sqrt(1.5) * 0.37).epsilon(1e-14));
  CHECK(d1 == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));

  // Chebyshev endpoint values follow the analytic limits.
  auto [c2, c2d] = eval_univariate(BasisKind::Chebyshev, 2, 1.0);
  CHECK(c2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(c2d == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-14));
  auto [c3, c3d] = eval_univariate(BasisKind::Chebyshev, 3, -1.0);
  CHECK(c3 == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
  CHECK(c3d == doctest::Approx(9.0 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("orthonormality under the matching quadrature") {
  // Degrees up to 20; 25-point Gauss-Legendre integrates products exactly.
  Vector nodes, weights;
  oracle::gauss_legendre(25, nodes, weights);
  for (int j = 0; j <= 20; j += 4) {
    for (int k = j; k <= 20; k += 3) {
      double acc = 0.0;
      for (int t = 0; t < nodes.size(); ++t) {
        acc += weights[t] * eval_univariate(BasisKind::Legendre, j, nodes[t]).value *
               eval_univariate(BasisKind::Legendre, k, nodes[t]).value;
      }
      CHECK(acc == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-10));
    }
  }
  // Chebyshev-Gauss points for the arcsine measure: integral f dmu ~ mean of f.
  const int m = 64;
  for (int j = 0; j <= 20; j += 5) {
    for (int k = j; k <= 20; k += 4) {
      double acc = 0.0;
      for (int t = 0; t < m; ++t) {
        double x = std::cos((2.0 * t + 1.0) * M_PI / (2.0 * m));
        acc += eval_univariate(BasisKind::Chebyshev, j, x).value *
               eval_univariate(BasisKind::Chebyshev, k, x).value;
      }
      acc /= m;
      CHECK(acc == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("derivatives match central differences at interior points") {
  for (BasisKind kind : {BasisKind::Legendre, BasisKind::Chebyshev}) {
    for (int k = 0; k <= 20; ++k) {
      for (int pt = 0; pt < 100; ++pt) {
        double z = -0.95 + 1.9 * pt / 99.0;
        const double h = 1e-6;
        double fd = (eval_univariate(kind, k, z + h).value -
                     eval_univariate(kind, k, z - h).value) /
                    (2.0 * h);
        double d = eval_univariate(kind, k, z).derivative;
        CHECK(std::abs(fd - d) / std::max(1.0, std::abs(d)) < 1e-6);
      }
    }
  }
}

TEST_CASE("uniform bounds on the unit interval") {
  for (int k = 0; k <= 20; ++k) {
    for (int pt = 0; pt <= 200; ++pt) {
      double z = -1.0 + pt / 100.0;
      CHECK(std::abs(eval_univariate(BasisKind::Legendre, k, z).value) <=
            std::sqrt(k + 1.0) + 1e-12);
      CHECK(std::abs(eval_univariate(BasisKind::Chebyshev, k, z).value) <=
            std::sqrt(2.0) + 1e-12);
    }
  }
}

TEST_CASE("basis rows and gradients") {
  MultiIndexSet set = MultiIndexSet::build(2, 16, IndexKind::HyperbolicCross);
  BasisEvaluator evaluator(set, BasisKind::Legendre);

  Vector z(2);
  z << 0.5, -0.3;
  Vector phi;
  Matrix grad;
  evaluator.eval_with_grad(z, phi, grad);

  // Zero index: constant value, zero gradient.
  CHECK(phi[0] == doctest::Approx(0.5).epsilon(1e-14));  // (1/sqrt(2))^2
  CHECK(grad(0, 0) == 0.0);
  CHECK(grad(1, 0) == 0.0);

  // Locate (1,0) and check the hand-computed value.
  for (int k = 0; k < set.size(); ++k) {
    if (set.degree(k, 0) == 1 && set.degree(k, 1) == 0) {
      CHECK(phi[k] == doctest::Approx(std::sqrt(1.5) * 0.5 / std::sqrt(2.0)).epsilon(1e-14));
      CHECK(grad(0, k) == doctest::Approx(std::sqrt(1.5) / std::sqrt(2.0)).epsilon(1e-14));
    }
  }

  // Full row gradient against finite differences.
  auto row = [&](const Vector& pt) {
    Vector out;
    BasisEvaluator ev(set, BasisKind::Legendre);
    ev.eval(pt, out);
    return out;
  };
  Matrix fd = oracle::fd_jacobian(row, z, 1e-6);
  for (int k = 0; k < set.size(); ++k) {
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(fd(k, j) - grad(j, k)) / std::max(1.0, std::abs(grad(j, k))) < 1e-6);
    }
  }

  // Values-only evaluation agrees with the gradient path.
  Vector phi2;
  evaluator.eval(z, phi2);
  CHECK((phi - phi2).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("domain map endpoints, midpoint, and round trip") {
  Vector lo = Vector::Constant(2, -3.0), hi = Vector::Constant(2, 3.0);
  DomainMap map(lo, hi);

  CHECK(map.to_unit(lo)[0] == doctest::Approx(-1.0));
  CHECK(map.to_unit(hi)[1] == doctest::Approx(1.0));
  Vector zero = Vector::Zero(2);
  CHECK(map.to_unit(zero).norm() == doctest::Approx(0.0));
  CHECK(map.jacobian_diag()[0] == doctest::Approx(1.0 / 3.0));

  Vector x(2);
  x << 1.7, -2.9;
  CHECK((map.from_unit(map.to_unit(x)) - x).lpNorm<Eigen::Infinity>() < 1e-14);

  CHECK_THROWS_AS(DomainMap(hi, lo), ContractViolation);
}

TEST_CASE("weights") {
  MultiIndexSet set = MultiIndexSet::build(2, 8, IndexKind::HyperbolicCross);
  for (double alpha : {0.0, 1.0, 2.0}) {
    Vector w = hyperbolic_cross_weights(set, alpha);
    CHECK(w[0] == doctest::Approx(1.0));  // zero index
    for (int k = 1; k < set.size(); ++k) {
      if (alpha > 0.0) CHECK(w[k] >= 1.0);
      double expected = 1.0;
      for (int j = 0; j < 2; ++j) {
        expected *= std::pow(1.0 + set.degree(k, j), 0.5 * alpha);
      }
      CHECK(w[k] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  Vector flat = hyperbolic_cross_weights(set, 0.0);
  CHECK(flat.minCoeff() == 1.0);
  CHECK(flat.maxCoeff() == 1.0);
}
