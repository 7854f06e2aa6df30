#include "polyctrl/regression.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace polyctrl {

FitVariant fit_variant_from_string(const std::string& s) {
  if (s == "pl2") return FitVariant::Pl2;
  if (s == "apl2") return FitVariant::APl2;
  if (s == "pl1") return FitVariant::Pl1;
  if (s == "apl1") return FitVariant::APl1;
  throw ConfigError("unknown fit variant '" + s + "' (expected pl2|apl2|pl1|apl1)");
}

std::string to_string(FitVariant v) {
  switch (v) {
    case FitVariant::Pl2: return "pl2";
    case FitVariant::APl2: return "apl2";
    case FitVariant::Pl1: return "pl1";
    case FitVariant::APl1: return "apl1";
  }
  return "?";
}

bool variant_is_augmented(FitVariant v) {
  return v == FitVariant::APl2 || v == FitVariant::APl1;
}

bool variant_is_l1(FitVariant v) { return v == FitVariant::Pl1 || v == FitVariant::APl1; }

DesignSystem assemble(const Dataset& dataset, const std::vector<int>& train,
                      const MultiIndexSet& set, BasisKind kind, const DomainMap& map,
                      bool augmented, ExecPolicy policy) {
  const int n = dataset.state_dim;
  const int n_train = static_cast<int>(train.size());
  const int q = set.size();
  if (n_train < 1) throw ContractViolation("assemble: empty training set");
  if (set.dim() != n || map.dim() != n) {
    throw ContractViolation("assemble: basis/domain dimension does not match the dataset");
  }
  for (int idx : train) {
    if (idx < 0 || idx >= dataset.size()) throw ContractViolation("assemble: index out of range");
    if (!dataset.samples[idx].converged) {
      throw ContractViolation("assemble: sample " + std::to_string(idx + 1) +
                              " did not converge and cannot be used for training");
    }
  }

  DesignSystem sys;
  sys.n_train = n_train;
  sys.n_dims = n;
  sys.augmented = augmented;
  const int blocks = augmented ? n + 1 : 1;
  sys.A.resize(static_cast<Eigen::Index>(blocks) * n_train, q);
  sys.b.resize(static_cast<Eigen::Index>(blocks) * n_train);

  const double row_scale = 1.0 / std::sqrt(static_cast<double>(n_train));
  const Vector half_width = 0.5 * (map.hi - map.lo);  // dx/dz, the chain-rule factor

  // Exceptions must not escape the parallel region; record the first bad
  // sample and rethrow afterwards.
  std::atomic<int> bad_sample{-1};

  parallel_for(n_train, policy, [&](std::int64_t r) {
    const Sample& sample = dataset.samples[train[static_cast<std::size_t>(r)]];
    if (!sample.x.allFinite() || !std::isfinite(sample.value) ||
        (augmented && !sample.value_gradient.allFinite())) {
      int expected = -1;
      bad_sample.compare_exchange_strong(expected, train[static_cast<std::size_t>(r)]);
      return;
    }
    BasisEvaluator evaluator(set, kind);
    const Vector z = map.to_unit(sample.x);
    if (augmented) {
      Vector phi;
      Matrix grad;
      evaluator.eval_with_grad(z, phi, grad);
      sys.A.row(r) = row_scale * phi.transpose();
      sys.b[r] = row_scale * sample.value;
      for (int mcoord = 0; mcoord < n; ++mcoord) {
        const Eigen::Index row = static_cast<Eigen::Index>(mcoord + 1) * n_train + r;
        sys.A.row(row) = row_scale * grad.row(mcoord);
        sys.b[row] = row_scale * sample.value_gradient[mcoord] * half_width[mcoord];
      }
    } else {
      Vector phi;
      evaluator.eval(z, phi);
      sys.A.row(r) = row_scale * phi.transpose();
      sys.b[r] = row_scale * sample.value;
    }
  });

  if (bad_sample.load() >= 0) {
    throw DataError("assemble: non-finite data in sample " +
                    std::to_string(bad_sample.load() + 1));
  }
  return sys;
}

int count_nonzeros(const Vector& theta) {
  int count = 0;
  for (int k = 0; k < theta.size(); ++k) {
    if (std::abs(theta[k]) > 1e-20) ++count;
  }
  return count;
}

FitResult solve_ls_cg(const DesignSystem& system, double tol, int max_iter) {
  const Matrix& A = system.A;
  const Vector& b = system.b;
  const int q = system.cols();

  FitResult result;
  result.variant = system.augmented ? FitVariant::APl2 : FitVariant::Pl2;

  Vector atb = A.transpose() * b;
  const double target = tol * atb.norm();
  if (atb.norm() == 0.0) {
    result.theta = Vector::Zero(q);
    result.converged = true;
    result.nonzero_count = 0;
    return result;
  }

  // Jacobi preconditioner from the column norms of A.
  Vector diag(q);
  for (int k = 0; k < q; ++k) {
    double d = A.col(k).squaredNorm();
    diag[k] = d > 1e-300 ? d : 1.0;
  }

  Vector theta = Vector::Zero(q);
  Vector r = atb;  // A^T b - A^T A theta at theta = 0
  Vector z = r.cwiseQuotient(diag);
  Vector p = z;
  double rz = r.dot(z);
  int iter = 0;
  double rnorm = r.norm();
  while (rnorm > target && iter < max_iter) {
    Vector ap = A.transpose() * (A * p);
    double denom = p.dot(ap);
    if (!(denom > 0.0) || !std::isfinite(denom)) break;  // numerical breakdown on a null direction
    double step = rz / denom;
    theta += step * p;
    r -= step * ap;
    rnorm = r.norm();
    z = r.cwiseQuotient(diag);
    double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    ++iter;
  }

  result.theta = std::move(theta);
  result.iterations = iter;
  result.residual = rnorm;
  result.converged = rnorm <= target;
  result.nonzero_count = count_nonzeros(result.theta);
  return result;
}

Vector prox_weighted_l1(const Vector& v, double threshold_scale, const Vector& w) {
  if (v.size() != w.size()) throw ContractViolation("prox_weighted_l1: shape mismatch");
  Vector out(v.size());
  for (int k = 0; k < v.size(); ++k) {
    const double level = threshold_scale * w[k];
    const double mag = std::abs(v[k]) - level;
    out[k] = mag > 0.0 ? (v[k] > 0.0 ? mag : -mag) : 0.0;
  }
  return out;
}

FitResult solve_lasso_admm(const DesignSystem& system, double lambda, const Vector& w,
                           const AdmmConfig& config) {
  if (lambda < 0.0) throw ContractViolation("lasso strength must be >= 0");
  if (lambda == 0.0) {
    // Penalty off: this is the plain least-squares problem.
    FitResult result = solve_ls_cg(system);
    result.variant = system.augmented ? FitVariant::APl1 : FitVariant::Pl1;
    result.lambda = 0.0;
    return result;
  }
  const int q = system.cols();
  if (q > config.dense_cap) {
    throw ResourceError("basis cardinality " + std::to_string(q) +
                        " exceeds the dense factorization cap of " +
                        std::to_string(config.dense_cap));
  }
  if (w.size() != q) throw ContractViolation("weight vector does not match the basis");

  const Matrix& A = system.A;
  const double rho = config.rho;
  Matrix gram = 2.0 * (A.transpose() * A);
  gram.diagonal().array() += rho;
  Eigen::LLT<Matrix> chol(gram);
  if (chol.info() != Eigen::Success) {
    throw Error("Cholesky factorization of the quadratic update failed");
  }
  const Vector atb2 = 2.0 * (A.transpose() * system.b);

  Vector theta = Vector::Zero(q);
  Vector z = Vector::Zero(q);
  Vector h = Vector::Zero(q);

  FitResult result;
  result.variant = system.augmented ? FitVariant::APl1 : FitVariant::Pl1;
  result.lambda = lambda;

  int iter = 0;
  double primal = std::numeric_limits<double>::infinity();
  double dual = std::numeric_limits<double>::infinity();
  while (iter < config.max_iter) {
    theta = chol.solve(atb2 + rho * (z - h));
    z = prox_weighted_l1(theta + h, lambda / rho, w);
    const Vector h_prev = h;
    h += theta - z;
    primal = (theta - z).norm();
    dual = rho * (h - h_prev).norm();
    ++iter;
    if (primal < config.tol && dual < config.tol) break;
  }

  result.theta = z;  // the thresholded iterate, so zeros are exact
  result.iterations = iter;
  result.residual = primal;
  result.converged = primal < config.tol && dual < config.tol;
  result.nonzero_count = count_nonzeros(result.theta);
  return result;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_fit(const FitFile& file, const MultiIndexSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");

  nlohmann::json header = {
      {"format", "polyctrl-fit"},
      {"version", 1},
      {"code_version", kVersion},
      {"problem", file.problem_id},
      {"variant", to_string(file.fit.variant)},
      {"lambda", file.fit.lambda},
      {"alpha", file.fit.alpha},
      {"basis", to_string(file.basis_kind)},
      {"index", to_string(file.index_kind)},
      {"s", file.order},
      {"n", set.dim()},
      {"q", set.size()},
      {"beta", file.beta},
      {"domain_lo", std::vector<double>(file.domain_lo.begin(), file.domain_lo.end())},
      {"domain_hi", std::vector<double>(file.domain_hi.begin(), file.domain_hi.end())},
      {"nonzero", file.fit.nonzero_count},
      {"iterations", file.fit.iterations},
      {"converged", file.fit.converged},
      {"config_hash", file.config_hash},
  };
  out << header.dump() << "\n";
  for (int k = 0; k < set.size(); ++k) {
    const int* idx = set.index(k);
    for (int j = 0; j < set.dim(); ++j) out << idx[j] << ',';
    out << fmt17(file.fit.theta[k]) << "\n";
  }
  if (!out) throw DataError("write to '" + path + "' failed");
}

FitFile load_fit(const std::string& path, MultiIndexSet& set_out) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty fit file '" + path + "'");
  nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("format", "") != "polyctrl-fit") {
    throw DataError("'" + path + "' is not a coefficient file");
  }

  FitFile file;
  file.problem_id = header.at("problem").get<std::string>();
  file.fit.variant = fit_variant_from_string(header.at("variant").get<std::string>());
  file.fit.lambda = header.at("lambda").get<double>();
  file.fit.alpha = header.at("alpha").get<double>();
  file.basis_kind = basis_kind_from_string(header.at("basis").get<std::string>());
  file.index_kind = index_kind_from_string(header.at("index").get<std::string>());
  file.order = header.at("s").get<int>();
  file.beta = header.at("beta").get<double>();
  auto lo = header.at("domain_lo").get<std::vector<double>>();
  auto hi = header.at("domain_hi").get<std::vector<double>>();
  file.domain_lo = Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  file.domain_hi = Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  file.fit.nonzero_count = header.at("nonzero").get<int>();
  file.fit.iterations = header.at("iterations").get<int>();
  file.fit.converged = header.at("converged").get<bool>();
  file.config_hash = header.value("config_hash", "");

  const int n = header.at("n").get<int>();
  const int q = header.at("q").get<int>();

  set_out = MultiIndexSet::build(n, file.order, file.index_kind);
  if (set_out.size() != q) {
    throw DataError("fit file '" + path + "' is inconsistent: rebuilt index set has " +
                    std::to_string(set_out.size()) + " elements, header says " +
                    std::to_string(q));
  }

  file.fit.theta.resize(q);
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= q) throw DataError("fit file '" + path + "' has extra rows");
    std::stringstream ss(line);
    std::string tok;
    for (int j = 0; j < n; ++j) {
      if (!std::getline(ss, tok, ',')) throw DataError("truncated fit row");
      if (std::stoi(tok) != set_out.degree(row, j)) {
        throw DataError("fit file '" + path + "' row " + std::to_string(row + 1) +
                        " does not match the canonical index ordering");
      }
    }
    if (!std::getline(ss, tok, ',')) throw DataError("truncated fit row");
    file.fit.theta[row] = std::stod(tok);
    ++row;
  }
  if (row != q) throw DataError("fit file '" + path + "' is missing rows");
  file.fit.nonzero_count = count_nonzeros(file.fit.theta);
  return file;
}

}  // namespace polyctrl
