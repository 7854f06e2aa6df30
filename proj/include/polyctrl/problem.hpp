#pragma once

#include <memory>
#include <optional>
#include <string>

#include "polyctrl/types.hpp"

namespace polyctrl {

// A control-affine optimal control instance:
//
//   minimize  integral_0^T  l(y(t)) + beta * |u(t)|^2  dt
//   subject to  dy/dt = f(y) + g(y) u,   y(0) = x.
//
// Instances are immutable after construction and safe to share across
// concurrent workers.
class ControlAffineProblem {
public:
  virtual ~ControlAffineProblem() = default;

  const std::string& id() const { return id_; }
  int state_dim() const { return n_; }
  int control_dim() const { return m_; }
  double control_penalty() const { return beta_; }
  double horizon() const { return T_; }
  const Vector& domain_lo() const { return lo_; }
  const Vector& domain_hi() const { return hi_; }

  // f(y)
  virtual Vector drift(const Vector& y) const = 0;
  // g(y), n x m
  virtual Matrix control_map(const Vector& y) const = 0;
  // (d/dy (f(y) + g(y) u))^T p
  virtual Vector rhs_jac_transpose_apply(const Vector& y, const Vector& u,
                                         const Vector& p) const = 0;
  virtual double running_cost(const Vector& y) const = 0;
  virtual Vector running_cost_grad(const Vector& y) const = 0;

  // g(y) u; overridden where g has exploitable structure.
  virtual Vector apply_control(const Vector& y, const Vector& u) const {
    return control_map(y) * u;
  }
  // g(y)^T p
  virtual Vector control_transpose_apply(const Vector& y, const Vector& p) const {
    return control_map(y).transpose() * p;
  }

  // Jacobian of f(y) + g(y) u with respect to y. The default is a central
  // finite difference; problems used with implicit stepping register an
  // analytic one.
  virtual bool has_rhs_jacobian() const { return false; }
  virtual Matrix rhs_jacobian(const Vector& y, const Vector& u) const;

protected:
  ControlAffineProblem(std::string id, int n, int m, double beta, double T,
                       Vector lo, Vector hi);

  std::string id_;
  int n_;
  int m_;
  double beta_;
  double T_;
  Vector lo_, hi_;
};

// f(y) + g(y) u with dimension checks.
Vector eval_rhs(const ControlAffineProblem& p, const Vector& y, const Vector& u);

// Right-hand side of -dp/dt: (d/dy (f + g u))^T p + grad l(y).
Vector eval_adjoint_rhs(const ControlAffineProblem& p, const Vector& y,
                        const Vector& u, const Vector& adj);

// ---------------------------------------------------------------------------
// Built-in instances
// ---------------------------------------------------------------------------

// Van der Pol oscillator with a single forcing channel on the velocity.
class VanDerPolProblem final : public ControlAffineProblem {
public:
  explicit VanDerPolProblem(double beta = 0.1, double T = 3.0);

  Vector drift(const Vector& y) const override;
  Matrix control_map(const Vector& y) const override;
  Vector rhs_jac_transpose_apply(const Vector& y, const Vector& u, const Vector& p) const override;
  double running_cost(const Vector& y) const override;
  Vector running_cost_grad(const Vector& y) const override;
  Vector apply_control(const Vector& y, const Vector& u) const override;
  Vector control_transpose_apply(const Vector& y, const Vector& p) const override;
  bool has_rhs_jacobian() const override { return true; }
  Matrix rhs_jacobian(const Vector& y, const Vector& u) const override;
};

// Reaction-diffusion control on (-1,1) with Neumann boundaries, reduced to an
// ODE system by Chebyshev collocation; three interval-supported actuators.
class AllenCahnProblem final : public ControlAffineProblem {
public:
  explicit AllenCahnProblem(int n_colloc = 18, double nu = 0.1, double beta = 0.01,
                            double T = 4.0);

  Vector drift(const Vector& y) const override;
  Matrix control_map(const Vector& y) const override;
  Vector rhs_jac_transpose_apply(const Vector& y, const Vector& u, const Vector& p) const override;
  double running_cost(const Vector& y) const override;
  Vector running_cost_grad(const Vector& y) const override;
  Vector apply_control(const Vector& y, const Vector& u) const override;
  Vector control_transpose_apply(const Vector& y, const Vector& p) const override;
  bool has_rhs_jacobian() const override { return true; }
  Matrix rhs_jacobian(const Vector& y, const Vector& u) const override;

  double diffusion() const { return nu_; }
  const Vector& nodes() const { return nodes_; }          // retained collocation nodes
  const Matrix& second_derivative() const { return d2_; } // Neumann-condensed
  const Matrix& actuator_masks() const { return g_; }     // n x 3, {0,1}-valued

private:
  double nu_;
  Vector nodes_;
  Matrix d2_;
  Matrix g_;
  Matrix quad_form_;  // l(y) = y^T Q y, Clenshaw-Curtis through the boundary extension
};

// Second-order alignment dynamics for N_a agents in d physical dimensions;
// state is (positions, velocities), controls act on the velocities.
class CuckerSmaleProblem final : public ControlAffineProblem {
public:
  explicit CuckerSmaleProblem(int num_agents = 20, int phys_dim = 2, double beta = 0.01,
                              double T = 10.0);

  Vector drift(const Vector& y) const override;
  Matrix control_map(const Vector& y) const override;
  Vector rhs_jac_transpose_apply(const Vector& y, const Vector& u, const Vector& p) const override;
  double running_cost(const Vector& y) const override;
  Vector running_cost_grad(const Vector& y) const override;
  Vector apply_control(const Vector& y, const Vector& u) const override;
  Vector control_transpose_apply(const Vector& y, const Vector& p) const override;

  int num_agents() const { return na_; }
  int phys_dim() const { return d_; }
  // (1/N_a) sum_i |v_i - vbar|^2 with the instantaneous mean velocity.
  double consensus_variance(const Vector& y) const { return running_cost(y); }

private:
  int na_, d_;
};

// Two decoupled linear modes with full actuation and quadratic cost; the
// value function is a diagonal quadratic form, so small polynomial bases can
// represent it exactly. Used as the analytically checkable instance.
class Lqr2dProblem final : public ControlAffineProblem {
public:
  explicit Lqr2dProblem(double beta = 0.1, double T = 3.0);

  Vector drift(const Vector& y) const override;
  Matrix control_map(const Vector& y) const override;
  Vector rhs_jac_transpose_apply(const Vector& y, const Vector& u, const Vector& p) const override;
  double running_cost(const Vector& y) const override;
  Vector running_cost_grad(const Vector& y) const override;
  bool has_rhs_jacobian() const override { return true; }
  Matrix rhs_jacobian(const Vector& y, const Vector& u) const override;

  const Matrix& system_matrix() const { return a_; }
  const Matrix& input_matrix() const { return b_; }
  const Matrix& state_cost() const { return q_; }

private:
  Matrix a_, b_, q_;
};

struct ProblemOverrides {
  std::optional<int> num_agents;
  std::optional<int> phys_dim;
  std::optional<int> n_colloc;
  std::optional<double> beta;
  std::optional<double> T;
};

// Factory for the instances addressable from configuration:
// "vanderpol", "allencahn", "cuckersmale", "lqr2d".
std::shared_ptr<const ControlAffineProblem> make_problem(const std::string& id,
                                                         const ProblemOverrides& ov = {});

}  // namespace polyctrl
