#pragma once

#include <string>
#include <vector>

#include "polyctrl/basis.hpp"
#include "polyctrl/parallel.hpp"
#include "polyctrl/sampling.hpp"

namespace polyctrl {

enum class FitVariant { Pl2, APl2, Pl1, APl1 };

FitVariant fit_variant_from_string(const std::string& s);
std::string to_string(FitVariant v);
bool variant_is_augmented(FitVariant v);
bool variant_is_l1(FitVariant v);

// Row-scaled least-squares system. Plain systems carry one value row per
// training sample; gradient-augmented systems stack n further blocks, one per
// coordinate, holding d phi / d z_m against the chain-rule-scaled data
// gradients. Every block is scaled by 1/sqrt(N_d).
struct DesignSystem {
  Matrix A;          // R x q
  Vector b;          // R
  int n_train = 0;
  int n_dims = 0;
  bool augmented = false;

  int rows() const { return static_cast<int>(A.rows()); }
  int cols() const { return static_cast<int>(A.cols()); }
};

DesignSystem assemble(const Dataset& dataset, const std::vector<int>& train,
                      const MultiIndexSet& set, BasisKind kind, const DomainMap& map,
                      bool augmented, ExecPolicy policy = ExecPolicy::OpenMP);

struct FitResult {
  Vector theta;
  FitVariant variant = FitVariant::Pl2;
  double lambda = 0.0;
  double alpha = 0.0;
  int nonzero_count = 0;
  int iterations = 0;
  double residual = 0.0;  // final normal-equation residual (CG) or primal gap (ADMM)
  bool converged = false;
};

// Counts |theta_k| > 1e-20.
int count_nonzeros(const Vector& theta);

// Conjugate gradients on the normal equations with a Jacobi preconditioner,
// started from zero. The tolerance is relative to |A^T b|, which keeps the
// solution exactly homogeneous in b. Underdetermined systems return the
// iterate at the tolerance.
FitResult solve_ls_cg(const DesignSystem& system, double tol = 1e-8, int max_iter = 5000);

// Componentwise soft threshold at level threshold_scale * w_k.
Vector prox_weighted_l1(const Vector& v, double threshold_scale, const Vector& w);

struct AdmmConfig {
  double rho = 1.0;
  double tol = 1e-5;
  int max_iter = 10000;
  std::int64_t dense_cap = 20'000;  // refuse factorizations beyond this many columns
};

// Weighted-LASSO solver: minimizes |A theta - b|^2 + lambda * sum_k w_k
// |theta_k| by operator splitting. The quadratic update factors
// (2 A^T A + rho I) once; the returned coefficients are the post-threshold
// iterate, so reported zeros are exact. lambda = 0 delegates to the
// least-squares path (this is also how the alpha = -inf setting is realized).
FitResult solve_lasso_admm(const DesignSystem& system, double lambda, const Vector& w,
                           const AdmmConfig& config = {});

// Coefficient file: one JSON header line followed by q CSV rows
// "i_1,...,i_n,theta". Carries everything needed to rebuild the model.
struct FitFile {
  FitResult fit;
  BasisKind basis_kind = BasisKind::Legendre;
  IndexKind index_kind = IndexKind::HyperbolicCross;
  int order = 0;
  std::string problem_id;
  double beta = 0.0;
  Vector domain_lo, domain_hi;
  std::string config_hash;
};

void save_fit(const FitFile& file, const MultiIndexSet& set, const std::string& path);
// Returns the file plus the reconstructed index set (validated against the
// stored order/kind).
FitFile load_fit(const std::string& path, MultiIndexSet& set_out);

}  // namespace polyctrl
