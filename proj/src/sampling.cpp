#include "polyctrl/sampling.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace polyctrl {

namespace {

constexpr std::array<int, 100> kPrimes = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,  59,
    61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131, 137, 139,
    149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233,
    239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311, 313, 317, 331, 337,
    347, 349, 353, 359, 367, 373, 379, 383, 389, 397, 401, 409, 419, 421, 431, 433, 439,
    443, 449, 457, 461, 463, 467, 479, 487, 491, 499, 503, 509, 521, 523, 541};

double radical_inverse(long index, int base) {
  double inv_base = 1.0 / base;
  double factor = inv_base;
  double result = 0.0;
  long i = index;
  while (i > 0) {
    result += factor * static_cast<double>(i % base);
    i /= base;
    factor *= inv_base;
  }
  return result;
}

}  // namespace

int halton_max_dim() { return static_cast<int>(kPrimes.size()); }

Vector halton_point(long index, int dim) {
  if (index < 1) throw ContractViolation("Halton index is 1-based");
  if (dim < 1) throw ContractViolation("Halton dimension must be >= 1");
  if (dim > halton_max_dim()) {
    throw ConfigError("Halton dimension " + std::to_string(dim) + " exceeds the prime table (" +
                      std::to_string(halton_max_dim()) + ")");
  }
  Vector point(dim);
  for (int j = 0; j < dim; ++j) point[j] = radical_inverse(index, kPrimes[j]);
  return point;
}

Dataset generate_dataset(const ControlAffineProblem& problem, int count,
                         const GenerationConfig& config) {
  if (count < 1) throw ContractViolation("sample count must be >= 1");
  config.solver.validate();

  const int n = problem.state_dim();
  Dataset ds;
  ds.samples.resize(count);
  ds.problem_id = problem.id();
  ds.state_dim = n;
  ds.control_dim = problem.control_dim();
  ds.beta = problem.control_penalty();
  ds.domain_lo = problem.domain_lo();
  ds.domain_hi = problem.domain_hi();
  ds.grid = config.grid;
  ds.scheme = config.scheme;
  ds.solver = config.solver;
  ds.skip = config.skip;

  if (n > halton_max_dim()) {
    throw ConfigError("state dimension exceeds the Halton prime table");
  }

  const Vector width = ds.domain_hi - ds.domain_lo;
  std::atomic<int> hard_failures{0};

  parallel_for(count, config.policy, [&](std::int64_t j) {
    Sample& sample = ds.samples[static_cast<std::size_t>(j)];
    const Vector h = halton_point(config.skip + j + 1, n);
    sample.x = ds.domain_lo + h.cwiseProduct(width);
    try {
      OpenLoopSolution sol =
          solve_open_loop(problem, sample.x, config.grid, config.scheme, config.solver);
      sample.value = sol.cost;
      sample.value_gradient = sol.value_gradient;
      sample.converged = sol.converged;
      sample.solver_iterations = sol.iterations;
      sample.final_grad_norm = sol.final_grad_norm;
    } catch (const std::exception&) {
      sample.value = std::numeric_limits<double>::quiet_NaN();
      sample.value_gradient = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
      sample.converged = false;
      sample.solver_iterations = 0;
      sample.final_grad_norm = std::numeric_limits<double>::quiet_NaN();
      hard_failures.fetch_add(1, std::memory_order_relaxed);
    }
  });

  if (2 * hard_failures.load() > count) {
    throw DataError("more than half of the open-loop solves failed (" +
                    std::to_string(hard_failures.load()) + " of " + std::to_string(count) + ")");
  }
  return ds;
}

Split split(const Dataset& dataset, int n_train) {
  const int total = dataset.size();
  if (n_train < 1 || n_train >= total) {
    throw ConfigError("training count must satisfy 1 <= N_d < N");
  }
  Split out;
  for (int j = 0; j < total; ++j) {
    if (!dataset.samples[j].converged) {
      ++out.dropped;
      continue;
    }
    if (j < n_train) {
      out.train.push_back(j);
    } else {
      out.validation.push_back(j);
    }
  }
  return out;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json solver_to_json(const SolverConfig& s) {
  return {{"tol", s.tol},
          {"max_iters", s.max_iters},
          {"memory", s.linesearch_memory},
          {"armijo_c", s.armijo_c},
          {"eta_shrink", s.eta_shrink},
          {"eta_min", s.eta_min},
          {"bb_min", s.bb_min},
          {"bb_max", s.bb_max}};
}

SolverConfig solver_from_json(const nlohmann::json& j) {
  SolverConfig s;
  s.tol = j.at("tol").get<double>();
  s.max_iters = j.at("max_iters").get<int>();
  s.linesearch_memory = j.at("memory").get<int>();
  s.armijo_c = j.at("armijo_c").get<double>();
  s.eta_shrink = j.at("eta_shrink").get<double>();
  s.eta_min = j.at("eta_min").get<double>();
  s.bb_min = j.at("bb_min").get<double>();
  s.bb_max = j.at("bb_max").get<double>();
  return s;
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");

  nlohmann::json header = {
      {"format", "polyctrl-dataset"},
      {"version", 1},
      {"code_version", kVersion},
      {"problem", dataset.problem_id},
      {"n", dataset.state_dim},
      {"m", dataset.control_dim},
      {"beta", dataset.beta},
      {"T", dataset.grid.T},
      {"steps", dataset.grid.steps},
      {"scheme", to_string(dataset.scheme)},
      {"domain_lo", std::vector<double>(dataset.domain_lo.begin(), dataset.domain_lo.end())},
      {"domain_hi", std::vector<double>(dataset.domain_hi.begin(), dataset.domain_hi.end())},
      {"solver", solver_to_json(dataset.solver)},
      {"skip", dataset.skip},
      {"count", dataset.size()},
      {"config_hash", dataset.config_hash},
  };
  out << header.dump() << "\n";

  const int n = dataset.state_dim;
  for (int j = 0; j < dataset.size(); ++j) {
    const Sample& s = dataset.samples[j];
    out << (j + 1);
    for (int i = 0; i < n; ++i) out << ',' << fmt17(s.x[i]);
    out << ',' << fmt17(s.value);
    for (int i = 0; i < n; ++i) out << ',' << fmt17(s.value_gradient[i]);
    out << ',' << (s.converged ? 1 : 0) << ',' << s.solver_iterations << "\n";
  }
  if (!out) throw DataError("write to '" + path + "' failed");
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty dataset file '" + path + "'");

  nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("format", "") != "polyctrl-dataset") {
    throw DataError("'" + path + "' is not a dataset file");
  }

  Dataset ds;
  ds.problem_id = header.at("problem").get<std::string>();
  ds.state_dim = header.at("n").get<int>();
  ds.control_dim = header.at("m").get<int>();
  ds.beta = header.at("beta").get<double>();
  ds.grid = TimeGrid(header.at("T").get<double>(), header.at("steps").get<int>());
  ds.scheme = scheme_from_string(header.at("scheme").get<std::string>());
  auto lo = header.at("domain_lo").get<std::vector<double>>();
  auto hi = header.at("domain_hi").get<std::vector<double>>();
  ds.domain_lo = Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  ds.domain_hi = Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  ds.solver = solver_from_json(header.at("solver"));
  ds.skip = header.at("skip").get<long>();
  ds.config_hash = header.value("config_hash", "");

  const int n = ds.state_dim;
  const int count = header.at("count").get<int>();
  ds.samples.reserve(count);
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    std::stringstream ss(line);
    std::string tok;
    auto next = [&]() -> std::string {
      if (!std::getline(ss, tok, ',')) {
        throw DataError("truncated row " + std::to_string(row) + " in '" + path + "'");
      }
      return tok;
    };
    Sample s;
    next();  // index column, redundant
    s.x.resize(n);
    for (int i = 0; i < n; ++i) s.x[i] = std::stod(next());
    s.value = std::stod(next());
    s.value_gradient.resize(n);
    for (int i = 0; i < n; ++i) s.value_gradient[i] = std::stod(next());
    s.converged = std::stoi(next()) != 0;
    s.solver_iterations = std::stoi(next());
    ds.samples.push_back(std::move(s));
  }
  if (static_cast<int>(ds.samples.size()) != count) {
    throw DataError("dataset '" + path + "' declares " + std::to_string(count) + " rows but has " +
                    std::to_string(ds.samples.size()));
  }
  return ds;
}

}  // namespace polyctrl
