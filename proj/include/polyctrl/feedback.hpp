#pragma once

#include <atomic>
#include <functional>
#include <memory>

#include "polyctrl/integrate.hpp"
#include "polyctrl/regression.hpp"

namespace polyctrl {

// A fitted polynomial surrogate for the value map, together with the domain
// map that connects model coordinates to problem coordinates.
struct ValueModel {
  MultiIndexSet set;
  BasisKind kind = BasisKind::Legendre;
  Vector theta;
  DomainMap map;
  double beta = 0.0;
  std::string problem_id;
};

ValueModel make_value_model(const MultiIndexSet& set, BasisKind kind, Vector theta,
                            DomainMap map, double beta, std::string problem_id);
ValueModel value_model_from_fit(const FitFile& file, const MultiIndexSet& set);

// Counts evaluations that landed outside the scaled unit cube (polynomial
// extrapolation is used there).
struct ExtrapolationLog {
  std::atomic<long> count{0};
  std::atomic<double> first_time{-1.0};
};

double eval_value(const ValueModel& model, const Vector& x, ExtrapolationLog* log = nullptr);
// Gradient in original coordinates (includes the 2/(hi-lo) chain-rule factors).
Vector eval_value_gradient(const ValueModel& model, const Vector& x,
                           ExtrapolationLog* log = nullptr);
// u(x) = -(1/(2 beta)) g(x)^T grad V(x)
Vector eval_feedback(const ValueModel& model, const ControlAffineProblem& problem,
                     const Vector& x, ExtrapolationLog* log = nullptr);

struct ClosedLoopResult {
  Trajectory trajectory;
  ControlSignal control;       // feedback sampled at the grid nodes
  double cost = 0.0;           // quadrature cost of the recorded pair
  bool diverged = false;
  double truncation_time = -1.0;  // first node at which the state blew up
  int valid_nodes = 0;            // nodes actually filled (K+1 when healthy)
  std::vector<double> state_norm;
  std::vector<double> control_norm;
  std::vector<double> extra_metric;  // optional per-node diagnostic
  long extrapolations = 0;
};

using ExtraMetricFn = std::function<double(const Vector&)>;

// Integrates dy/dt = f(y) + g(y) u_model(y), re-evaluating the feedback at
// every stage point. Divergence (non-finite state or norm above 1e6) is
// recorded, not thrown.
ClosedLoopResult simulate_closed_loop(const ControlAffineProblem& problem,
                                      const ValueModel& model, const Vector& x0,
                                      const TimeGrid& grid, Scheme scheme = Scheme::RK4,
                                      const ExtraMetricFn& extra_metric = nullptr);

struct ErrorMetrics {
  double l2 = 0.0;
  double h1 = 0.0;
};

// Relative errors over the indexed samples:
//   Err_L2 = sqrt( sum |V_model - V|^2 / sum |V|^2 )
//   Err_H1 = sqrt( sum (|dV|^2 + |dgrad|^2) / sum (|V|^2 + |grad|^2) )
// with both gradients in original coordinates.
ErrorMetrics validation_errors(const ValueModel& model, const Dataset& dataset,
                               const std::vector<int>& indices,
                               ExecPolicy policy = ExecPolicy::OpenMP);

}  // namespace polyctrl
