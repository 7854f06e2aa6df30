#include "polyctrl/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "polyctrl/config.hpp"
#include "polyctrl/feedback.hpp"
#include "polyctrl/regression.hpp"

namespace polyctrl::cli {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out = true) {
  cmd->add_option("--config", args.config_file, "key = value configuration file");
  cmd->add_option("--set", args.overrides, "override a config key (key=value, repeatable)");
  if (with_out) {
    cmd->add_option("--out", args.out_dir, "output directory (one run, one directory)");
    cmd->add_flag("--force", args.force, "reuse a non-empty output directory");
  }
}

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = args.config_file.empty() ? RunConfig() : RunConfig::from_file(args.config_file);
  cfg.apply_overrides(args.overrides);
  int threads = cfg.get_int("threads");
  if (threads > 0) omp_set_num_threads(threads);
  return cfg;
}

ExecPolicy exec_policy(const RunConfig& cfg) {
  const std::string mode = cfg.get_str("exec");
  if (mode == "omp") return ExecPolicy::OpenMP;
  if (mode == "serial") return ExecPolicy::Serial;
  throw ConfigError("config key 'exec' expects omp|serial");
}

std::shared_ptr<const ControlAffineProblem> problem_from_config(const RunConfig& cfg) {
  ProblemOverrides ov;
  ov.num_agents = cfg.get_int("problem.na");
  ov.phys_dim = cfg.get_int("problem.d");
  ov.n_colloc = cfg.get_int("problem.n_colloc");
  if (cfg.has_explicit("problem.beta")) ov.beta = cfg.get_double("problem.beta");
  if (cfg.has_explicit("problem.T")) ov.T = cfg.get_double("problem.T");
  return make_problem(cfg.get_str("problem"), ov);
}

struct IntegrationChoice {
  Scheme scheme;
  double dt;
};

// Per-problem defaults, overridable through `integrator` and `dt`.
IntegrationChoice integration_choice(const RunConfig& cfg, const std::string& problem_id) {
  IntegrationChoice choice{Scheme::RK4, 1e-3};
  if (problem_id == "vanderpol") {
    choice = {Scheme::CrankNicolson, 1e-3};
  } else if (problem_id == "allencahn") {
    choice = {Scheme::CrankNicolson, 5e-3};
  } else if (problem_id == "cuckersmale") {
    choice = {Scheme::RK4, 1e-2};
  } else if (problem_id == "lqr2d") {
    choice = {Scheme::RK4, 1e-3};
  }
  if (cfg.has_explicit("integrator")) choice.scheme = scheme_from_string(cfg.get_str("integrator"));
  if (cfg.has_explicit("dt")) choice.dt = cfg.get_double("dt");
  return choice;
}

SolverConfig solver_from_config(const RunConfig& cfg) {
  SolverConfig solver;
  solver.tol = cfg.get_double("ol.tol");
  solver.max_iters = cfg.get_int("ol.max_iters");
  solver.linesearch_memory = cfg.get_int("ol.memory");
  solver.armijo_c = cfg.get_double("ol.armijo_c");
  solver.eta_shrink = cfg.get_double("ol.eta_shrink");
  solver.eta_min = cfg.get_double("ol.eta_min");
  solver.bb_min = cfg.get_double("ol.bb_min");
  solver.bb_max = cfg.get_double("ol.bb_max");
  solver.validate();
  return solver;
}

void ensure_outdir(const std::string& dir, bool force) {
  if (dir.empty()) throw ConfigError("--out is required");
  fs::path path(dir);
  if (fs::exists(path)) {
    if (!fs::is_directory(path)) throw ConfigError("'" + dir + "' exists and is not a directory");
    if (!force && !fs::is_empty(path)) {
      throw ConfigError("output directory '" + dir + "' is not empty (use --force to reuse)");
    }
  } else {
    fs::create_directories(path);
  }
}

void write_config_echo(const RunConfig& cfg, const std::string& dir) {
  std::ofstream out(fs::path(dir) / "config.txt");
  out << "# hash = " << cfg.hash() << "\n" << cfg.canonical();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

Vector parse_vector(const std::string& text) {
  std::vector<double> entries;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      entries.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("cannot parse vector component '" + tok + "'");
    }
  }
  if (entries.empty()) throw ConfigError("empty vector literal");
  return Eigen::Map<const Vector>(entries.data(), static_cast<Eigen::Index>(entries.size()));
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

// ---------------------------------------------------------------------------
// datagen
// ---------------------------------------------------------------------------

int cmd_datagen(const CommonArgs& common) {
  RunConfig cfg = load_config(common);
  ensure_outdir(common.out_dir, common.force);
  write_config_echo(cfg, common.out_dir);

  auto problem = problem_from_config(cfg);
  const IntegrationChoice integ = integration_choice(cfg, problem->id());

  GenerationConfig gen;
  gen.grid = TimeGrid::from_dt(problem->horizon(), integ.dt);
  gen.scheme = integ.scheme;
  gen.solver = solver_from_config(cfg);
  gen.skip = cfg.get_long("skip");
  gen.policy = exec_policy(cfg);
  const int count = cfg.get_int("N");

  const auto t0 = std::chrono::steady_clock::now();
  Dataset ds;
  try {
    ds = generate_dataset(*problem, count, gen);
  } catch (const DataError& e) {
    nlohmann::json report = {{"ok", false}, {"error", e.what()}, {"config_hash", cfg.hash()}};
    std::ofstream rep(fs::path(common.out_dir) / "datagen_report.json");
    rep << report.dump(2) << "\n";
    std::cerr << "datagen failed: " << e.what() << "\n";
    return 1;
  }
  const auto t1 = std::chrono::steady_clock::now();
  const double wall = std::chrono::duration<double>(t1 - t0).count();

  ds.config_hash = cfg.hash();
  const fs::path out(common.out_dir);
  save_dataset(ds, (out / "dataset.csv").string());

  // Per-sample diagnostics, one JSON object per line, in generation order.
  {
    std::ofstream log(out / "samples.jsonl");
    for (int j = 0; j < ds.size(); ++j) {
      const Sample& s = ds.samples[j];
      nlohmann::json rec = {{"index", j + 1},
                            {"converged", s.converged},
                            {"iterations", s.solver_iterations},
                            {"final_grad_norm", s.final_grad_norm}};
      log << rec.dump() << "\n";
    }
  }

  int converged = 0;
  long total_iters = 0;
  int max_iters = 0;
  for (const Sample& s : ds.samples) {
    if (s.converged) ++converged;
    total_iters += s.solver_iterations;
    max_iters = std::max(max_iters, s.solver_iterations);
  }
  nlohmann::json report = {
      {"ok", true},
      {"count", ds.size()},
      {"converged", converged},
      {"success_rate", static_cast<double>(converged) / ds.size()},
      {"wall_seconds", wall},
      {"mean_iterations", static_cast<double>(total_iters) / ds.size()},
      {"max_iterations", max_iters},
      {"config_hash", cfg.hash()},
  };
  std::ofstream rep(out / "datagen_report.json");
  rep << report.dump(2) << "\n";

  std::cout << "DATAGEN problem=" << ds.problem_id << " N=" << ds.size()
            << " converged=" << converged << " wall_s=" << fmt(wall)
            << " file=" << (out / "dataset.csv").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fit / validate
// ---------------------------------------------------------------------------

struct FitOutcome {
  FitResult fit;
  ErrorMetrics train;
  ErrorMetrics val;
  int q = 0;
  int dropped = 0;
};

void print_metrics_line(const std::string& cmd, const Dataset& ds, const RunConfig& cfg,
                        FitVariant variant, int nd, double lambda, double alpha,
                        const FitOutcome& outcome) {
  std::cout << "METRICS cmd=" << cmd << " problem=" << ds.problem_id
            << " variant=" << to_string(variant) << " basis=" << cfg.get_str("basis.kind")
            << " index=" << cfg.get_str("basis.index") << " s=" << cfg.get_int("basis.s")
            << " q=" << outcome.q << " n=" << ds.state_dim << " N=" << ds.size() << " nd=" << nd
            << " lambda=" << fmt(lambda) << " alpha=" << fmt(alpha)
            << " nonzero=" << outcome.fit.nonzero_count << " iters=" << outcome.fit.iterations
            << " dropped=" << outcome.dropped << " train_l2=" << fmt(outcome.train.l2)
            << " train_h1=" << fmt(outcome.train.h1) << " val_l2=" << fmt(outcome.val.l2)
            << " val_h1=" << fmt(outcome.val.h1) << " hash=" << cfg.hash() << "\n";
}

FitOutcome run_fit(const Dataset& ds, const RunConfig& cfg, FitVariant variant, int nd,
                   const MultiIndexSet& set, ExecPolicy policy) {
  Split parts = split(ds, nd);
  if (parts.train.empty()) throw DataError("no converged training samples in the prefix");
  DomainMap map(ds.domain_lo, ds.domain_hi);
  const BasisKind kind = basis_kind_from_string(cfg.get_str("basis.kind"));

  DesignSystem system = assemble(ds, parts.train, set, kind, map, variant_is_augmented(variant),
                                 policy);

  double alpha = cfg.get_alpha("weights.alpha");
  double lambda = cfg.get_double("fit.lambda");

  FitOutcome outcome;
  outcome.q = set.size();
  outcome.dropped = parts.dropped;
  if (variant_is_l1(variant)) {
    if (std::isinf(alpha) && alpha < 0) lambda = 0.0;  // no-regularization setting
    Vector w = (lambda > 0.0) ? hyperbolic_cross_weights(set, alpha)
                              : Vector::Ones(set.size());
    AdmmConfig admm;
    admm.rho = cfg.get_double("fit.rho");
    admm.tol = cfg.get_double("fit.tol");
    admm.max_iter = cfg.get_int("fit.max_iter");
    outcome.fit = solve_lasso_admm(system, lambda, w, admm);
  } else {
    outcome.fit = solve_ls_cg(system, cfg.get_double("cg.tol"), cfg.get_int("cg.max_iter"));
  }
  outcome.fit.alpha = alpha;

  ValueModel model = make_value_model(set, kind, outcome.fit.theta, map, ds.beta, ds.problem_id);
  outcome.train = validation_errors(model, ds, parts.train, policy);
  if (!parts.validation.empty()) {
    outcome.val = validation_errors(model, ds, parts.validation, policy);
  }
  return outcome;
}

int cmd_fit(const CommonArgs& common, const std::string& data_path, const std::string& sweep) {
  RunConfig cfg = load_config(common);
  ensure_outdir(common.out_dir, common.force);
  write_config_echo(cfg, common.out_dir);

  Dataset ds = load_dataset(data_path);
  const FitVariant variant = fit_variant_from_string(cfg.get_str("fit.variant"));
  const ExecPolicy policy = exec_policy(cfg);

  MultiIndexSet set =
      MultiIndexSet::build(ds.state_dim, cfg.get_int("basis.s"),
                           index_kind_from_string(cfg.get_str("basis.index")),
                           cfg.get_long("basis.cap"));

  std::vector<int> nds = sweep.empty() ? std::vector<int>{cfg.get_int("nd")}
                                       : parse_int_list(sweep);

  std::cout << "variant  nd    lambda    alpha  nonzero/q    train_L2    train_H1      val_L2      val_H1\n";
  for (int nd : nds) {
    FitOutcome outcome = run_fit(ds, cfg, variant, nd, set, policy);

    double alpha = outcome.fit.alpha;
    std::printf("%7s %4d %9.4g %8.3g %6d/%-4d %11.4e %11.4e %11.4e %11.4e\n",
                to_string(variant).c_str(), nd, outcome.fit.lambda, alpha,
                outcome.fit.nonzero_count, outcome.q, outcome.train.l2, outcome.train.h1,
                outcome.val.l2, outcome.val.h1);
    print_metrics_line("fit", ds, cfg, variant, nd, outcome.fit.lambda, alpha, outcome);

    FitFile file;
    file.fit = outcome.fit;
    file.basis_kind = basis_kind_from_string(cfg.get_str("basis.kind"));
    file.index_kind = index_kind_from_string(cfg.get_str("basis.index"));
    file.order = cfg.get_int("basis.s");
    file.problem_id = ds.problem_id;
    file.beta = ds.beta;
    file.domain_lo = ds.domain_lo;
    file.domain_hi = ds.domain_hi;
    file.config_hash = cfg.hash();
    const std::string name = nds.size() == 1 ? "fit.csv" : "fit_nd" + std::to_string(nd) + ".csv";
    save_fit(file, set, (fs::path(common.out_dir) / name).string());
  }
  return 0;
}

int cmd_validate(const CommonArgs& common, const std::string& data_path,
                 const std::string& coeffs_path, int nd_flag) {
  RunConfig cfg = load_config(common);

  Dataset ds = load_dataset(data_path);
  MultiIndexSet set;
  FitFile file = load_fit(coeffs_path, set);
  if (set.dim() != ds.state_dim) {
    throw ConfigError("coefficient file dimension " + std::to_string(set.dim()) +
                      " does not match dataset dimension " + std::to_string(ds.state_dim));
  }

  const int nd = nd_flag > 0 ? nd_flag : cfg.get_int("nd");
  Split parts = split(ds, nd);
  ValueModel model = value_model_from_fit(file, set);
  const ExecPolicy policy = exec_policy(cfg);

  FitOutcome outcome;
  outcome.fit = file.fit;
  outcome.q = set.size();
  outcome.dropped = parts.dropped;
  outcome.train = validation_errors(model, ds, parts.train, policy);
  if (!parts.validation.empty()) {
    outcome.val = validation_errors(model, ds, parts.validation, policy);
  }
  print_metrics_line("validate", ds, cfg, file.fit.variant, nd, file.fit.lambda, file.fit.alpha,
                     outcome);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const CommonArgs& common, const std::string& coeffs_path,
                 const std::string& x0_text, bool baselines) {
  RunConfig cfg = load_config(common);
  ensure_outdir(common.out_dir, common.force);
  write_config_echo(cfg, common.out_dir);

  MultiIndexSet set;
  FitFile file = load_fit(coeffs_path, set);

  if (cfg.has_explicit("problem") && cfg.get_str("problem") != file.problem_id) {
    throw ConfigError("config problem '" + cfg.get_str("problem") +
                      "' conflicts with coefficient file problem '" + file.problem_id + "'");
  }
  RunConfig effective = cfg;
  effective.set("problem", file.problem_id);
  auto problem = problem_from_config(effective);
  if (problem->state_dim() != set.dim()) {
    throw ConfigError("problem dimension does not match the coefficient file");
  }

  const Vector x0 = parse_vector(x0_text);
  if (x0.size() != problem->state_dim()) {
    throw ConfigError("--x0 has " + std::to_string(x0.size()) + " components, problem needs " +
                      std::to_string(problem->state_dim()));
  }

  const IntegrationChoice integ = integration_choice(effective, problem->id());
  TimeGrid grid = TimeGrid::from_dt(problem->horizon(), integ.dt);

  ExtraMetricFn metric;
  const auto* flock = dynamic_cast<const CuckerSmaleProblem*>(problem.get());
  if (flock) metric = [flock](const Vector& y) { return flock->consensus_variance(y); };

  ValueModel model = value_model_from_fit(file, set);
  ClosedLoopResult fitted =
      simulate_closed_loop(*problem, model, x0, grid, Scheme::RK4, metric);

  std::cout << "CLOSEDLOOP problem=" << problem->id() << " cost=" << fmt(fitted.cost)
            << " diverged=" << (fitted.diverged ? 1 : 0)
            << " t_trunc=" << fmt(fitted.truncation_time)
            << " extrapolations=" << fitted.extrapolations << " hash=" << cfg.hash() << "\n";

  // Optional baselines on the same grid.
  Trajectory unco;
  std::optional<OpenLoopSolution> optimal;
  if (baselines) {
    unco = integrate_forward(*problem, x0, ControlSignal::zero(grid, problem->control_dim()),
                             integ.scheme);
    optimal = solve_open_loop(*problem, x0, grid, integ.scheme, solver_from_config(cfg));
    std::cout << "BASELINES unco_cost="
              << fmt(quadrature_cost(*problem, unco, ControlSignal::zero(grid, problem->control_dim())))
              << " op_cost=" << fmt(optimal->cost) << " op_converged=" << optimal->converged
              << "\n";
  }

  std::ofstream csv(fs::path(common.out_dir) / "closedloop.csv");
  csv << "# config_hash=" << cfg.hash() << " problem=" << problem->id()
      << " diverged=" << fitted.diverged << " truncation_time=" << fmt(fitted.truncation_time)
      << "\n";
  csv << "t,fit_state_norm,fit_control_norm";
  if (metric) csv << ",fit_consensus_variance";
  if (baselines) {
    csv << ",unco_state_norm";
    if (metric) csv << ",unco_consensus_variance";
    csv << ",op_state_norm,op_control_norm";
    if (metric) csv << ",op_consensus_variance";
  }
  csv << "\n";
  for (int k = 0; k < grid.num_nodes(); ++k) {
    csv << fmt(grid.node(k));
    if (k < fitted.valid_nodes) {
      csv << ',' << fmt(fitted.state_norm[k]) << ',' << fmt(fitted.control_norm[k]);
      if (metric) csv << ',' << fmt(fitted.extra_metric[k]);
    } else {
      csv << ",nan,nan";
      if (metric) csv << ",nan";
    }
    if (baselines) {
      csv << ',' << fmt(unco.values.col(k).norm());
      if (metric) csv << ',' << fmt(flock->consensus_variance(unco.values.col(k)));
      csv << ',' << fmt(optimal->y_star.values.col(k).norm()) << ','
          << fmt(optimal->u_star.values.col(k).norm());
      if (metric) csv << ',' << fmt(flock->consensus_variance(optimal->y_star.values.col(k)));
    }
    csv << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// indexset / gradcheck
// ---------------------------------------------------------------------------

int cmd_indexset(int n, int s, const std::string& kind_text, bool list, long cap) {
  const IndexKind kind = index_kind_from_string(kind_text);
  const double q = index_set_cardinality(n, s, kind);
  std::cout << "INDEXSET n=" << n << " s=" << s << " kind=" << kind_text << " q=" << fmt(q);
  if (kind == IndexKind::HyperbolicCross && s >= 1) {
    std::cout << " bound=" << fmt(hc_cardinality_bound(n, s));
  }
  std::cout << "\n";
  if (list) {
    if (q > static_cast<double>(cap)) {
      std::cerr << "warning: cardinality " << fmt(q) << " exceeds the cap " << cap
                << "; not listing\n";
      return 0;
    }
    MultiIndexSet set = MultiIndexSet::build(n, s, kind, cap);
    for (int k = 0; k < set.size(); ++k) {
      for (int j = 0; j < n; ++j) std::cout << (j ? "," : "") << set.degree(k, j);
      std::cout << "\n";
    }
  }
  return 0;
}

int cmd_gradcheck(const CommonArgs& common, int num_checks) {
  RunConfig cfg = load_config(common);
  auto problem = problem_from_config(cfg);
  const IntegrationChoice integ = integration_choice(cfg, problem->id());
  const int n = problem->state_dim();
  const int m = problem->control_dim();
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  bool all_ok = true;

  // Jacobian-transpose action against central differences of the full rhs.
  {
    double worst = 0.0;
    for (int trial = 0; trial < num_checks; ++trial) {
      Vector y(n), u(m), p(n);
      for (int i = 0; i < n; ++i) {
        double t = 0.5 * (unit(rng) + 1.0);
        y[i] = problem->domain_lo()[i] + t * (problem->domain_hi()[i] - problem->domain_lo()[i]);
      }
      for (int i = 0; i < m; ++i) u[i] = unit(rng);
      for (int i = 0; i < n; ++i) p[i] = unit(rng);

      Vector analytic = problem->rhs_jac_transpose_apply(y, u, p);
      Vector fd(n);
      Vector yp = y, ym = y;
      for (int j = 0; j < n; ++j) {
        double h = 1e-5 * std::max(1.0, std::abs(y[j]));
        yp[j] = y[j] + h;
        ym[j] = y[j] - h;
        fd[j] = (eval_rhs(*problem, yp, u) - eval_rhs(*problem, ym, u)).dot(p) / (2.0 * h);
        yp[j] = y[j];
        ym[j] = y[j];
      }
      double rel = (analytic - fd).norm() / std::max(1.0, fd.norm());
      worst = std::max(worst, rel);
    }
    bool ok = worst < 1e-5;
    all_ok = all_ok && ok;
    std::cout << "GRADCHECK adjoint_jacobian worst_rel=" << fmt(worst)
              << (ok ? " PASS" : " FAIL") << "\n";
  }

  // Reduced gradient against the directional derivative of the cost.
  {
    TimeGrid grid = TimeGrid::from_dt(problem->horizon(), integ.dt);
    double worst = 0.0;
    const double eps = 1e-5;
    for (int trial = 0; trial < 3; ++trial) {
      ControlSignal u(grid, m), du(grid, m);
      for (int k = 0; k < grid.num_nodes(); ++k) {
        for (int i = 0; i < m; ++i) {
          u.values(i, k) = 0.3 * unit(rng);
          du.values(i, k) = unit(rng);
        }
      }
      Vector x0(n);
      for (int i = 0; i < n; ++i) {
        double t = 0.5 * (unit(rng) + 1.0);
        x0[i] = problem->domain_lo()[i] + t * (problem->domain_hi()[i] - problem->domain_lo()[i]);
      }
      ReducedGradient rg = reduced_gradient(*problem, x0, u, integ.scheme);
      ControlSignal up = u, um = u;
      up.values += eps * du.values;
      um.values -= eps * du.values;
      double jp = quadrature_cost(*problem, integrate_forward(*problem, x0, up, integ.scheme), up);
      double jm = quadrature_cost(*problem, integrate_forward(*problem, x0, um, integ.scheme), um);
      double fd = (jp - jm) / (2.0 * eps);
      double inner = l2_inner(rg.grad, du.values, grid);
      double rel = std::abs(fd - inner) / std::max(1e-12, std::abs(fd));
      worst = std::max(worst, rel);
    }
    bool ok = worst < 1e-4;
    all_ok = all_ok && ok;
    std::cout << "GRADCHECK reduced_gradient worst_rel=" << fmt(worst)
              << (ok ? " PASS" : " FAIL") << "\n";
  }

  // Basis derivative spot check.
  {
    double worst = 0.0;
    for (BasisKind kind : {BasisKind::Legendre, BasisKind::Chebyshev}) {
      for (int k = 0; k <= 20; ++k) {
        for (int pt = 0; pt < 25; ++pt) {
          double z = -0.95 + 1.9 * pt / 24.0;
          double h = 1e-6;
          auto [vp, dp_unused] = eval_univariate(kind, k, z + h);
          auto [vm, dm_unused] = eval_univariate(kind, k, z - h);
          auto [v, d] = eval_univariate(kind, k, z);
          (void)v;
          (void)dp_unused;
          (void)dm_unused;
          double fd = (vp - vm) / (2.0 * h);
          worst = std::max(worst, std::abs(fd - d) / std::max(1.0, std::abs(d)));
        }
      }
    }
    bool ok = worst < 1e-6;
    all_ok = all_ok && ok;
    std::cout << "GRADCHECK basis_derivative worst_rel=" << fmt(worst)
              << (ok ? " PASS" : " FAIL") << "\n";
  }

  std::cout << (all_ok ? "GRADCHECK PASS" : "GRADCHECK FAIL") << "\n";
  return all_ok ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"sparse polynomial synthesis of optimal feedback laws"};
  app.require_subcommand(1);

  CommonArgs datagen_args;
  auto* datagen = app.add_subcommand("datagen", "generate a value/gradient dataset");
  add_common(datagen, datagen_args);

  CommonArgs fit_args;
  std::string fit_data, fit_sweep;
  auto* fit = app.add_subcommand("fit", "fit a polynomial value model");
  add_common(fit, fit_args);
  fit->add_option("--data", fit_data, "dataset file")->required();
  fit->add_option("--nd-sweep", fit_sweep, "comma-separated list of training sizes");

  CommonArgs val_args;
  std::string val_data, val_coeffs;
  int val_nd = 0;
  auto* validate = app.add_subcommand("validate", "recompute metrics for a coefficient file");
  add_common(validate, val_args, /*with_out=*/false);
  validate->add_option("--data", val_data, "dataset file")->required();
  validate->add_option("--coeffs", val_coeffs, "coefficient file")->required();
  validate->add_option("--nd", val_nd, "training prefix used for the split");

  CommonArgs sim_args;
  std::string sim_coeffs, sim_x0;
  bool sim_baselines = false;
  auto* simulate = app.add_subcommand("simulate", "closed-loop simulation of a fitted law");
  add_common(simulate, sim_args);
  simulate->add_option("--coeffs", sim_coeffs, "coefficient file")->required();
  simulate->add_option("--x0", sim_x0, "initial state, comma separated")->required();
  simulate->add_flag("--baselines", sim_baselines,
                     "also run the uncontrolled and open-loop-optimal baselines");

  int is_n = 0, is_s = 0;
  long is_cap = 10'000'000;
  std::string is_kind = "hc";
  bool is_list = false;
  auto* indexset = app.add_subcommand("indexset", "multi-index set cardinality");
  indexset->add_option("--n", is_n, "dimension")->required();
  indexset->add_option("--s", is_s, "order")->required();
  indexset->add_option("--kind", is_kind, "tp|td|hc");
  indexset->add_flag("--list", is_list, "print the ordered indices");
  indexset->add_option("--cap", is_cap, "cardinality cap for listing");

  CommonArgs gc_args;
  int gc_checks = 100;
  auto* gradcheck = app.add_subcommand("gradcheck", "run the derivative oracles");
  add_common(gradcheck, gc_args, /*with_out=*/false);
  gradcheck->add_option("--checks", gc_checks, "number of random probes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (datagen->parsed()) return cmd_datagen(datagen_args);
    if (fit->parsed()) return cmd_fit(fit_args, fit_data, fit_sweep);
    if (validate->parsed()) return cmd_validate(val_args, val_data, val_coeffs, val_nd);
    if (simulate->parsed()) return cmd_simulate(sim_args, sim_coeffs, sim_x0, sim_baselines);
    if (indexset->parsed()) return cmd_indexset(is_n, is_s, is_kind, is_list, is_cap);
    if (gradcheck->parsed()) return cmd_gradcheck(gc_args, gc_checks);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace polyctrl::cli
