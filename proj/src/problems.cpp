#include "polyctrl/problem.hpp"

#include <cmath>

#include "polyctrl/chebyshev.hpp"

namespace polyctrl {

ControlAffineProblem::ControlAffineProblem(std::string id, int n, int m, double beta, double T,
                                           Vector lo, Vector hi)
    : id_(std::move(id)), n_(n), m_(m), beta_(beta), T_(T), lo_(std::move(lo)),
      hi_(std::move(hi)) {
  if (n_ < 1 || m_ < 1) throw ContractViolation("problem dimensions must be >= 1");
  if (!(beta_ > 0.0)) throw ContractViolation("control penalty must be positive");
  if (!(T_ > 0.0)) throw ContractViolation("horizon must be positive");
  if (lo_.size() != n_ || hi_.size() != n_) {
    throw ContractViolation("sampling domain dimension mismatch");
  }
  for (int i = 0; i < n_; ++i) {
    if (!(lo_[i] < hi_[i])) throw ContractViolation("sampling domain requires lo < hi");
  }
}

Matrix ControlAffineProblem::rhs_jacobian(const Vector& y, const Vector& u) const {
  // Central finite differences of f + g u, column by column.
  Matrix jac(n_, n_);
  Vector yp = y, ym = y;
  for (int j = 0; j < n_; ++j) {
    double h = 1e-6 * std::max(1.0, std::abs(y[j]));
    yp[j] = y[j] + h;
    ym[j] = y[j] - h;
    jac.col(j) = (eval_rhs(*this, yp, u) - eval_rhs(*this, ym, u)) / (2.0 * h);
    yp[j] = y[j];
    ym[j] = y[j];
  }
  return jac;
}

Vector eval_rhs(const ControlAffineProblem& p, const Vector& y, const Vector& u) {
  if (y.size() != p.state_dim() || u.size() != p.control_dim()) {
    throw ContractViolation("eval_rhs: dimension mismatch for problem '" + p.id() + "'");
  }
  return p.drift(y) + p.apply_control(y, u);
}

Vector eval_adjoint_rhs(const ControlAffineProblem& p, const Vector& y, const Vector& u,
                        const Vector& adj) {
  if (y.size() != p.state_dim() || u.size() != p.control_dim() || adj.size() != p.state_dim()) {
    throw ContractViolation("eval_adjoint_rhs: dimension mismatch for problem '" + p.id() + "'");
  }
  return p.rhs_jac_transpose_apply(y, u, adj) + p.running_cost_grad(y);
}

// ---------------------------------------------------------------------------
// Van der Pol
// ---------------------------------------------------------------------------

VanDerPolProblem::VanDerPolProblem(double beta, double T)
    : ControlAffineProblem("vanderpol", 2, 1, beta, T, Vector::Constant(2, -3.0),
                           Vector::Constant(2, 3.0)) {}

Vector VanDerPolProblem::drift(const Vector& y) const {
  Vector f(2);
  f[0] = y[1];
  f[1] = -y[0] + y[1] * (1.0 - y[0] * y[0]);
  return f;
}

Matrix VanDerPolProblem::control_map(const Vector&) const {
  Matrix g(2, 1);
  g << 0.0, 1.0;
  return g;
}

Vector VanDerPolProblem::apply_control(const Vector&, const Vector& u) const {
  Vector out = Vector::Zero(2);
  out[1] = u[0];
  return out;
}

Vector VanDerPolProblem::control_transpose_apply(const Vector&, const Vector& p) const {
  Vector out(1);
  out[0] = p[1];
  return out;
}

Vector VanDerPolProblem::rhs_jac_transpose_apply(const Vector& y, const Vector&,
                                                 const Vector& p) const {
  Vector out(2);
  out[0] = (-1.0 - 2.0 * y[0] * y[1]) * p[1];
  out[1] = p[0] + (1.0 - y[0] * y[0]) * p[1];
  return out;
}

double VanDerPolProblem::running_cost(const Vector& y) const { return y.squaredNorm(); }

Vector VanDerPolProblem::running_cost_grad(const Vector& y) const { return 2.0 * y; }

Matrix VanDerPolProblem::rhs_jacobian(const Vector& y, const Vector&) const {
  Matrix jac(2, 2);
  jac << 0.0, 1.0, -1.0 - 2.0 * y[0] * y[1], 1.0 - y[0] * y[0];
  return jac;
}

// ---------------------------------------------------------------------------
// Allen-Cahn collocation system
// ---------------------------------------------------------------------------

AllenCahnProblem::AllenCahnProblem(int n_colloc, double nu, double beta, double T)
    : ControlAffineProblem("allencahn", n_colloc, 3, beta, T,
                           Vector::Constant(n_colloc, -10.0), Vector::Constant(n_colloc, 10.0)),
      nu_(nu) {
  ChebNeumannOperator op = build_cheb_collocation(n_colloc);
  nodes_ = op.nodes;
  d2_ = op.d2;

  // l(y) = y_full^T W y_full with the boundary values slaved to the interior.
  Matrix w_ext = op.quad_weights.asDiagonal() * op.extension;
  quad_form_ = op.extension.transpose() * w_ext;
  quad_form_ = 0.5 * (quad_form_ + quad_form_.transpose());

  // Actuator supports; nodes on an endpoint count as inside.
  const double supports[3][2] = {{-0.7, -0.4}, {-0.2, 0.2}, {0.4, 0.7}};
  g_ = Matrix::Zero(n_colloc, 3);
  for (int c = 0; c < 3; ++c) {
    for (int j = 0; j < n_colloc; ++j) {
      if (nodes_[j] >= supports[c][0] && nodes_[j] <= supports[c][1]) g_(j, c) = 1.0;
    }
  }
}

Vector AllenCahnProblem::drift(const Vector& y) const {
  return nu_ * (d2_ * y) + (y.array() * (1.0 - y.array().square())).matrix();
}

Matrix AllenCahnProblem::control_map(const Vector&) const { return g_; }

Vector AllenCahnProblem::apply_control(const Vector&, const Vector& u) const { return g_ * u; }

Vector AllenCahnProblem::control_transpose_apply(const Vector&, const Vector& p) const {
  return g_.transpose() * p;
}

Vector AllenCahnProblem::rhs_jac_transpose_apply(const Vector& y, const Vector&,
                                                 const Vector& p) const {
  return nu_ * (d2_.transpose() * p) +
         ((1.0 - 3.0 * y.array().square()) * p.array()).matrix();
}

double AllenCahnProblem::running_cost(const Vector& y) const {
  return y.dot(quad_form_ * y);
}

Vector AllenCahnProblem::running_cost_grad(const Vector& y) const {
  return 2.0 * (quad_form_ * y);
}

Matrix AllenCahnProblem::rhs_jacobian(const Vector& y, const Vector&) const {
  Matrix jac = nu_ * d2_;
  jac.diagonal() += (1.0 - 3.0 * y.array().square()).matrix();
  return jac;
}

// ---------------------------------------------------------------------------
// Cucker-Smale alignment dynamics
// ---------------------------------------------------------------------------

CuckerSmaleProblem::CuckerSmaleProblem(int num_agents, int phys_dim, double beta, double T)
    : ControlAffineProblem("cuckersmale", 2 * num_agents * phys_dim, num_agents * phys_dim,
                           beta, T, Vector::Constant(2 * num_agents * phys_dim, -3.0),
                           Vector::Constant(2 * num_agents * phys_dim, 3.0)),
      na_(num_agents), d_(phys_dim) {
  if (num_agents < 2) throw ContractViolation("need at least two agents");
  if (phys_dim < 1) throw ContractViolation("physical dimension must be >= 1");
}

Vector CuckerSmaleProblem::drift(const Vector& y) const {
  const int nd = na_ * d_;
  Vector out(2 * nd);
  out.head(nd) = y.segment(nd, nd);  // dy_i/dt = v_i
  for (int i = 0; i < na_; ++i) {
    auto yi = y.segment(i * d_, d_);
    auto vi = y.segment(nd + i * d_, d_);
    Vector acc = Vector::Zero(d_);
    for (int j = 0; j < na_; ++j) {
      if (j == i) continue;
      auto yj = y.segment(j * d_, d_);
      auto vj = y.segment(nd + j * d_, d_);
      double kernel = 1.0 / (1.0 + (yi - yj).squaredNorm());
      acc += kernel * (vj - vi);
    }
    out.segment(nd + i * d_, d_) = acc / na_;
  }
  return out;
}

Matrix CuckerSmaleProblem::control_map(const Vector&) const {
  const int nd = na_ * d_;
  Matrix g = Matrix::Zero(2 * nd, nd);
  g.bottomRows(nd).setIdentity();
  return g;
}

Vector CuckerSmaleProblem::apply_control(const Vector&, const Vector& u) const {
  const int nd = na_ * d_;
  Vector out = Vector::Zero(2 * nd);
  out.tail(nd) = u;
  return out;
}

Vector CuckerSmaleProblem::control_transpose_apply(const Vector&, const Vector& p) const {
  const int nd = na_ * d_;
  return p.tail(nd);
}

Vector CuckerSmaleProblem::rhs_jac_transpose_apply(const Vector& y, const Vector&,
                                                   const Vector& p) const {
  const int nd = na_ * d_;
  Vector out(2 * nd);
  // Velocity-block couplings enter both output blocks; position derivatives
  // act through the interaction kernel only.
  for (int i = 0; i < na_; ++i) {
    auto yi = y.segment(i * d_, d_);
    auto vi = y.segment(nd + i * d_, d_);
    auto pvi = p.segment(nd + i * d_, d_);
    Vector acc_y = Vector::Zero(d_);
    Vector acc_v = Vector::Zero(d_);
    for (int j = 0; j < na_; ++j) {
      if (j == i) continue;
      auto yj = y.segment(j * d_, d_);
      auto vj = y.segment(nd + j * d_, d_);
      auto pvj = p.segment(nd + j * d_, d_);
      Vector r = yi - yj;
      double kernel = 1.0 / (1.0 + r.squaredNorm());
      acc_y += (2.0 * kernel * kernel * (vj - vi).dot(pvj - pvi)) * r;
      acc_v += kernel * (pvj - pvi);
    }
    out.segment(i * d_, d_) = acc_y / na_;
    out.segment(nd + i * d_, d_) = p.segment(i * d_, d_) + acc_v / na_;
  }
  return out;
}

double CuckerSmaleProblem::running_cost(const Vector& y) const {
  const int nd = na_ * d_;
  Vector vbar = Vector::Zero(d_);
  for (int i = 0; i < na_; ++i) vbar += y.segment(nd + i * d_, d_);
  vbar /= na_;
  double total = 0.0;
  for (int i = 0; i < na_; ++i) {
    total += (y.segment(nd + i * d_, d_) - vbar).squaredNorm();
  }
  return total / na_;
}

Vector CuckerSmaleProblem::running_cost_grad(const Vector& y) const {
  const int nd = na_ * d_;
  Vector vbar = Vector::Zero(d_);
  for (int i = 0; i < na_; ++i) vbar += y.segment(nd + i * d_, d_);
  vbar /= na_;
  Vector grad = Vector::Zero(2 * nd);
  for (int i = 0; i < na_; ++i) {
    grad.segment(nd + i * d_, d_) = (2.0 / na_) * (y.segment(nd + i * d_, d_) - vbar);
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Decoupled 2-D linear-quadratic instance
// ---------------------------------------------------------------------------

Lqr2dProblem::Lqr2dProblem(double beta, double T)
    : ControlAffineProblem("lqr2d", 2, 2, beta, T, Vector::Constant(2, -1.0),
                           Vector::Constant(2, 1.0)) {
  a_ = Matrix::Zero(2, 2);
  a_(0, 0) = 0.5;
  a_(1, 1) = -1.0;
  b_ = Matrix::Identity(2, 2);
  q_ = Matrix::Identity(2, 2);
}

Vector Lqr2dProblem::drift(const Vector& y) const { return a_ * y; }

Matrix Lqr2dProblem::control_map(const Vector&) const { return b_; }

Vector Lqr2dProblem::rhs_jac_transpose_apply(const Vector&, const Vector&,
                                             const Vector& p) const {
  return a_.transpose() * p;
}

double Lqr2dProblem::running_cost(const Vector& y) const { return y.dot(q_ * y); }

Vector Lqr2dProblem::running_cost_grad(const Vector& y) const { return 2.0 * (q_ * y); }

Matrix Lqr2dProblem::rhs_jacobian(const Vector&, const Vector&) const { return a_; }

// ---------------------------------------------------------------------------

std::shared_ptr<const ControlAffineProblem> make_problem(const std::string& id,
                                                         const ProblemOverrides& ov) {
  if (id == "vanderpol") {
    return std::make_shared<VanDerPolProblem>(ov.beta.value_or(0.1), ov.T.value_or(3.0));
  }
  if (id == "allencahn") {
    return std::make_shared<AllenCahnProblem>(ov.n_colloc.value_or(18), 0.1,
                                              ov.beta.value_or(0.01), ov.T.value_or(4.0));
  }
  if (id == "cuckersmale") {
    return std::make_shared<CuckerSmaleProblem>(ov.num_agents.value_or(20),
                                                ov.phys_dim.value_or(2),
                                                ov.beta.value_or(0.01), ov.T.value_or(10.0));
  }
  if (id == "lqr2d") {
    return std::make_shared<Lqr2dProblem>(ov.beta.value_or(0.1), ov.T.value_or(3.0));
  }
  throw ConfigError("unknown problem id '" + id +
                    "' (expected vanderpol|allencahn|cuckersmale|lqr2d)");
}

}  // namespace polyctrl
