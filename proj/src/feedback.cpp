#include "polyctrl/feedback.hpp"

#include <cmath>
#include <limits>

namespace polyctrl {

namespace {

constexpr double kUnitOvershoot = 1e-12;
constexpr double kDivergenceNorm = 1e6;

bool outside_unit(const Vector& z) {
  for (int i = 0; i < z.size(); ++i) {
    if (std::abs(z[i]) > 1.0 + kUnitOvershoot) return true;
  }
  return false;
}

void note_extrapolation(ExtrapolationLog* log, double t) {
  if (!log) return;
  if (log->count.fetch_add(1, std::memory_order_relaxed) == 0) {
    log->first_time.store(t, std::memory_order_relaxed);
  }
}

}  // namespace

ValueModel make_value_model(const MultiIndexSet& set, BasisKind kind, Vector theta,
                            DomainMap map, double beta, std::string problem_id) {
  if (theta.size() != set.size()) {
    throw ContractViolation("coefficient vector does not match the index set");
  }
  if (map.dim() != set.dim()) {
    throw ContractViolation("domain map does not match the index set dimension");
  }
  ValueModel model;
  model.set = set;
  model.kind = kind;
  model.theta = std::move(theta);
  model.map = std::move(map);
  model.beta = beta;
  model.problem_id = std::move(problem_id);
  return model;
}

ValueModel value_model_from_fit(const FitFile& file, const MultiIndexSet& set) {
  return make_value_model(set, file.basis_kind, file.fit.theta,
                          DomainMap(file.domain_lo, file.domain_hi), file.beta, file.problem_id);
}

double eval_value(const ValueModel& model, const Vector& x, ExtrapolationLog* log) {
  const Vector z = model.map.to_unit(x);
  if (outside_unit(z)) note_extrapolation(log, -1.0);
  BasisEvaluator evaluator(model.set, model.kind);
  Vector phi;
  evaluator.eval(z, phi);
  return phi.dot(model.theta);
}

Vector eval_value_gradient(const ValueModel& model, const Vector& x, ExtrapolationLog* log) {
  const Vector z = model.map.to_unit(x);
  if (outside_unit(z)) note_extrapolation(log, -1.0);
  BasisEvaluator evaluator(model.set, model.kind);
  Vector phi;
  Matrix grad;
  evaluator.eval_with_grad(z, phi, grad);
  return (grad * model.theta).cwiseProduct(model.map.jacobian_diag());
}

Vector eval_feedback(const ValueModel& model, const ControlAffineProblem& problem,
                     const Vector& x, ExtrapolationLog* log) {
  if (x.size() != problem.state_dim()) {
    throw ContractViolation("eval_feedback: state dimension mismatch");
  }
  const Vector grad = eval_value_gradient(model, x, log);
  return (-0.5 / model.beta) * problem.control_transpose_apply(x, grad);
}

ClosedLoopResult simulate_closed_loop(const ControlAffineProblem& problem,
                                      const ValueModel& model, const Vector& x0,
                                      const TimeGrid& grid, Scheme scheme,
                                      const ExtraMetricFn& extra_metric) {
  if (x0.size() != problem.state_dim()) {
    throw ContractViolation("simulate_closed_loop: initial state dimension mismatch");
  }
  if (!x0.allFinite()) throw ContractViolation("simulate_closed_loop: x0 not finite");

  const double dt = grid.dt();
  ClosedLoopResult result;
  result.trajectory = Trajectory(grid, problem.state_dim());
  result.control = ControlSignal(grid, problem.control_dim());
  result.trajectory.values.setConstant(std::numeric_limits<double>::quiet_NaN());
  result.control.values.setConstant(std::numeric_limits<double>::quiet_NaN());

  ExtrapolationLog log;
  // An evaluator shared across stages so the basis tables are not reallocated
  // per call.
  BasisEvaluator evaluator(model.set, model.kind);
  Vector phi;
  Matrix basis_grad;
  auto feedback = [&](const Vector& y) {
    const Vector z = model.map.to_unit(y);
    if (outside_unit(z)) note_extrapolation(&log, -1.0);
    evaluator.eval_with_grad(z, phi, basis_grad);
    Vector grad = (basis_grad * model.theta).cwiseProduct(model.map.jacobian_diag());
    return Vector((-0.5 / model.beta) * problem.control_transpose_apply(y, grad));
  };
  auto closed_rhs = [&](const Vector& y) {
    Vector u = feedback(y);
    return Vector(problem.drift(y) + problem.apply_control(y, u));
  };

  auto record = [&](int k, const Vector& y) {
    result.trajectory.values.col(k) = y;
    Vector u = feedback(y);
    result.control.values.col(k) = u;
    result.state_norm.push_back(y.norm());
    result.control_norm.push_back(u.norm());
    if (extra_metric) result.extra_metric.push_back(extra_metric(y));
  };

  Vector y = x0;
  record(0, y);
  result.valid_nodes = 1;

  for (int k = 0; k < grid.steps; ++k) {
    Vector y_next;
    bool failed = false;
    if (scheme == Scheme::RK4) {
      Vector s1 = closed_rhs(y);
      Vector s2 = closed_rhs(y + 0.5 * dt * s1);
      Vector s3 = closed_rhs(y + 0.5 * dt * s2);
      Vector s4 = closed_rhs(y + dt * s3);
      y_next = y + (dt / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
      failed = !y_next.allFinite();
    } else {
      // Trapezoidal step on the closed-loop field with a finite-difference
      // Newton Jacobian; the feedback is re-evaluated inside every residual.
      const Vector f0 = closed_rhs(y);
      Vector z = y + dt * f0;
      failed = true;
      for (int it = 0; it < 50; ++it) {
        Vector residual = z - y - 0.5 * dt * (f0 + closed_rhs(z));
        if (!residual.allFinite()) break;
        if (residual.norm() <= 1e-10) {
          failed = false;
          break;
        }
        const int n = problem.state_dim();
        Matrix jac(n, n);
        Vector zp = z, zm = z;
        for (int j = 0; j < n; ++j) {
          double step = 1e-6 * std::max(1.0, std::abs(z[j]));
          zp[j] = z[j] + step;
          zm[j] = z[j] - step;
          jac.col(j) = (closed_rhs(zp) - closed_rhs(zm)) / (2.0 * step);
          zp[j] = z[j];
          zm[j] = z[j];
        }
        Matrix newton = Matrix::Identity(n, n) - 0.5 * dt * jac;
        z -= newton.partialPivLu().solve(residual);
      }
      y_next = z;
    }

    if (failed || !y_next.allFinite() || y_next.norm() > kDivergenceNorm) {
      result.diverged = true;
      result.truncation_time = grid.node(k);
      break;
    }
    y = y_next;
    record(k + 1, y);
    ++result.valid_nodes;
  }

  // Cost over the recorded prefix, trapezoidal as everywhere else.
  const int last = result.valid_nodes - 1;
  if (last >= 1) {
    auto node_cost = [&](int k) {
      return problem.running_cost(result.trajectory.values.col(k)) +
             problem.control_penalty() * result.control.values.col(k).squaredNorm();
    };
    double total = 0.5 * (node_cost(0) + node_cost(last));
    for (int k = 1; k < last; ++k) total += node_cost(k);
    result.cost = total * dt;
  }
  result.extrapolations = log.count.load();
  return result;
}

ErrorMetrics validation_errors(const ValueModel& model, const Dataset& dataset,
                               const std::vector<int>& indices, ExecPolicy policy) {
  if (indices.empty()) throw ContractViolation("validation_errors: empty index set");

  const auto count = static_cast<std::int64_t>(indices.size());
  // Per-sample terms are accumulated into slots and reduced serially so the
  // result does not depend on thread scheduling.
  std::vector<double> num_val(count), den_val(count), num_grad(count), den_grad(count);

  parallel_for(count, policy, [&](std::int64_t i) {
    const Sample& sample = dataset.samples[indices[static_cast<std::size_t>(i)]];
    BasisEvaluator evaluator(model.set, model.kind);
    Vector phi;
    Matrix basis_grad;
    const Vector z = model.map.to_unit(sample.x);
    evaluator.eval_with_grad(z, phi, basis_grad);
    const double v_model = phi.dot(model.theta);
    const Vector g_model = (basis_grad * model.theta).cwiseProduct(model.map.jacobian_diag());

    num_val[i] = (v_model - sample.value) * (v_model - sample.value);
    den_val[i] = sample.value * sample.value;
    num_grad[i] = (g_model - sample.value_gradient).squaredNorm();
    den_grad[i] = sample.value_gradient.squaredNorm();
  });

  double nv = 0, dv = 0, ng = 0, dg = 0;
  for (std::int64_t i = 0; i < count; ++i) {
    nv += num_val[i];
    dv += den_val[i];
    ng += num_grad[i];
    dg += den_grad[i];
  }
  if (dv <= 0.0) {
    throw DataError("validation_errors: all reference values vanish, metric undefined");
  }
  ErrorMetrics metrics;
  metrics.l2 = std::sqrt(nv / dv);
  metrics.h1 = std::sqrt((nv + ng) / (dv + dg));
  return metrics;
}

}  // namespace polyctrl
