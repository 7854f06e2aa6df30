// Wall-clock comparison of the serial reference kernels against their OpenMP
// counterparts: dataset generation, design matrix assembly, and batch
// validation. Results must agree bit-exactly; timings depend on the machine.

#include <chrono>
#include <cstdio>
#include <omp.h>

#include "polyctrl/feedback.hpp"
#include "polyctrl/regression.hpp"

using namespace polyctrl;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Fn>
double time_it(Fn&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return seconds_since(t0);
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", omp_get_max_threads());

  VanDerPolProblem problem;
  GenerationConfig gen;
  gen.grid = TimeGrid::from_dt(problem.horizon(), 1e-3);
  gen.scheme = Scheme::RK4;

  const int n_samples = 48;
  gen.policy = ExecPolicy::Serial;
  Dataset ds_serial;
  double t_serial = time_it([&] { ds_serial = generate_dataset(problem, n_samples, gen); });
  gen.policy = ExecPolicy::OpenMP;
  Dataset ds_omp;
  double t_omp = time_it([&] { ds_omp = generate_dataset(problem, n_samples, gen); });

  bool same = true;
  for (int j = 0; j < n_samples; ++j) {
    same = same && ds_serial.samples[j].value == ds_omp.samples[j].value &&
           ds_serial.samples[j].value_gradient == ds_omp.samples[j].value_gradient;
  }
  std::printf("generate_dataset (%d solves)   serial %.3fs   omp %.3fs   speedup %.2fx   %s\n",
              n_samples, t_serial, t_omp, t_serial / t_omp,
              same ? "bit-identical" : "MISMATCH");

  // Assembly on a larger synthetic dataset so the kernel dominates.
  Dataset big = ds_serial;
  big.samples.clear();
  const int n_big = 4096;
  for (int j = 0; j < n_big; ++j) {
    Sample s;
    s.x = Vector::Zero(2);
    s.x[0] = -3.0 + 6.0 * ((j * 2654435761u % 4096) / 4096.0);
    s.x[1] = -3.0 + 6.0 * ((j * 40503u % 4096) / 4096.0);
    s.value = s.x.squaredNorm();
    s.value_gradient = 2.0 * s.x;
    s.converged = true;
    big.samples.push_back(std::move(s));
  }
  std::vector<int> train(n_big);
  for (int j = 0; j < n_big; ++j) train[j] = j;

  MultiIndexSet set = MultiIndexSet::build(2, 16, IndexKind::HyperbolicCross);
  DomainMap map(big.domain_lo, big.domain_hi);

  DesignSystem sys_serial, sys_omp;
  double ta_serial = time_it([&] {
    sys_serial = assemble(big, train, set, BasisKind::Legendre, map, true, ExecPolicy::Serial);
  });
  double ta_omp = time_it([&] {
    sys_omp = assemble(big, train, set, BasisKind::Legendre, map, true, ExecPolicy::OpenMP);
  });
  std::printf("assemble (%d x %d augmented)  serial %.3fs   omp %.3fs   speedup %.2fx   %s\n",
              sys_serial.rows(), sys_serial.cols(), ta_serial, ta_omp, ta_serial / ta_omp,
              bitwise_equal(sys_serial.A, sys_omp.A) ? "bit-identical" : "MISMATCH");

  FitResult fit = solve_ls_cg(sys_serial);
  ValueModel model = make_value_model(set, BasisKind::Legendre, fit.theta, map, big.beta, big.problem_id);
  ErrorMetrics m_serial, m_omp;
  double tv_serial =
      time_it([&] { m_serial = validation_errors(model, big, train, ExecPolicy::Serial); });
  double tv_omp =
      time_it([&] { m_omp = validation_errors(model, big, train, ExecPolicy::OpenMP); });
  std::printf("validation_errors (%d samples) serial %.3fs   omp %.3fs   speedup %.2fx   %s\n",
              n_big, tv_serial, tv_omp, tv_serial / tv_omp,
              (m_serial.l2 == m_omp.l2 && m_serial.h1 == m_omp.h1) ? "bit-identical"
                                                                   : "MISMATCH");
  return 0;
}
