#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "polyctrl/openloop.hpp"
#include "polyctrl/parallel.hpp"

namespace polyctrl {

// Coordinate j of the index-th Halton point is the radical inverse of index
// in the j-th prime base. index is 1-based; dim is limited by the prime table
// (100 entries).
Vector halton_point(long index, int dim);
int halton_max_dim();

struct Sample {
  Vector x;
  double value = 0.0;
  Vector value_gradient;
  bool converged = false;
  int solver_iterations = 0;
  double final_grad_norm = 0.0;
};

struct Dataset {
  std::vector<Sample> samples;
  std::string problem_id;
  int state_dim = 0;
  int control_dim = 0;
  double beta = 0.0;
  Vector domain_lo, domain_hi;
  TimeGrid grid;
  Scheme scheme = Scheme::RK4;
  SolverConfig solver;
  long skip = 0;
  std::string config_hash;

  int size() const { return static_cast<int>(samples.size()); }
};

struct GenerationConfig {
  TimeGrid grid;
  Scheme scheme = Scheme::RK4;
  SolverConfig solver;
  long skip = 0;
  ExecPolicy policy = ExecPolicy::OpenMP;
};

// Maps Halton points skip+1 .. skip+N affinely into the problem's sampling
// domain and solves the open-loop problem at each of them. Samples whose
// solve throws are kept with converged = false and NaN payload; the batch
// aborts only if more than half of them fail hard.
Dataset generate_dataset(const ControlAffineProblem& problem, int count,
                         const GenerationConfig& config);

struct Split {
  std::vector<int> train;       // 0-based indices into dataset.samples
  std::vector<int> validation;
  int dropped = 0;              // non-converged samples excluded from both sides
};

// Deterministic prefix split in generation order: train covers samples
// 1..n_train, validation the rest, each filtered to converged samples.
Split split(const Dataset& dataset, int n_train);

// File format: one JSON header line, then one CSV row per sample with floats
// at 17 significant digits so files round-trip bit-exactly.
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace polyctrl
