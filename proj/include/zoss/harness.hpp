// Copyright 2026 The zoss-stability Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ZOSS_HARNESS_HPP_
#define ZOSS_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "zoss/bounds.hpp"
#include "zoss/dataset.hpp"
#include "zoss/optimizers.hpp"

namespace zoss {

struct ExecutionOptions {
  int threads = 1;
  // Replicas whose swapped example is drawn at some step t <= t0 are
  // discarded, approximating the conditional expectation given no early hit.
  int t0 = 0;
  // Refuse ZoSS runs whose mu exceeds the admissible cap for config.c.
  bool enforce_mu_cap = true;
};

// Runs body(i) for i in [0, count) on up to `threads` workers. Results must
// be written to per-index slots; the call returns after all finish and
// rethrows the first exception.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

// Inputs for the bound calculators matching a run of `config` on n examples.
BoundInputs bound_inputs_for(const LossModel& model, const RunConfig& config,
                             long long n, int t0 = 0);

struct NamedBound {
  std::string name;
  double value = 0.0;
};

// Bound on E[delta_T] for the configured algorithm, loss class and schedule.
NamedBound theoretical_stability_bound(const LossModel& model,
                                       const RunConfig& config, long long n,
                                       int t0 = 0);

// Bound on the generalization gap; PreconditionError when no result covers
// the combination of loss class, algorithm and schedule.
NamedBound theoretical_gen_bound(const LossModel& model,
                                 const RunConfig& config, long long n);

struct StabilityReport {
  RunConfig config;
  std::string dataset_id;
  long long n = 0;
  int swap_index = 0;
  int replicas = 0;
  int used_replicas = 0;    // after t0 rejection
  int failed_replicas = 0;  // diverged
  int t0 = 0;
  double mean_delta = 0.0;
  double std_error = 0.0;
  double theoretical_bound = 0.0;
  std::string bound_name;
  double mu_cap = 0.0;
  bool pass = false;
  std::vector<double> deltas;  // per used replica, in replica order
};

StabilityReport run_coupled_stability(const LossModel& model,
                                      const NeighborPair& pair,
                                      const RunConfig& config, int replicas,
                                      const ExecutionOptions& options = {});

// The stability report with the largest mean discrepancy over several swap
// positions of the same base dataset.
struct SwapSweep {
  std::vector<StabilityReport> reports;
  int worst = 0;
  bool pass = false;
};

SwapSweep run_swap_sweep(const LossModel& model, const Dataset& base,
                         const std::vector<int>& swap_indices,
                         const RunConfig& config, int replicas,
                         const ExecutionOptions& options = {});

struct GenReport {
  RunConfig config;
  DatasetSpec spec;
  long long n = 0;
  int replicas = 0;
  int failed_replicas = 0;
  long long test_size = 0;
  double mean_train = 0.0;
  double mean_test = 0.0;
  double mean_gap = 0.0;
  double std_error = 0.0;
  double theoretical_bound = 0.0;
  std::string bound_name;
  bool pass = false;
};

GenReport run_generalization(const LossModel& model, const RunConfig& config,
                             const DatasetSpec& spec, long long n,
                             int replicas, long long test_size,
                             const ExecutionOptions& options = {});

// One coupled stability experiment per batch size; all share the same
// (batch-size independent) bound.
std::vector<StabilityReport> run_batch_size_sweep(
    const LossModel& model, const NeighborPair& pair,
    const RunConfig& base_config, const std::vector<int>& m_values,
    int replicas, const ExecutionOptions& options = {});

struct SgdLimitPoint {
  long long K = 0;
  double mu = 0.0;
  double mean_error = 0.0;  // mean ||smoothed gradient - gradient||
  double std_error = 0.0;
  double envelope = 0.0;    // 1.2 (sqrt((3d-1)/K) ||grad|| + mu beta (3+d)^{3/2})
};

struct SgdLimitReport {
  std::string loss;
  int probes = 0;
  int replicas = 0;
  std::vector<SgdLimitPoint> points;
  bool non_increasing = false;
  bool final_within_envelope = false;
  bool pass = false;
};

// Evaluates the smoothed gradient against the analytic gradient at 20
// random (w, z) for each (K_i, mu_i) pair.
SgdLimitReport run_sgd_limit_check(const LossModel& model,
                                   const DatasetSpec& spec,
                                   const std::vector<long long>& K_values,
                                   const std::vector<double>& mu_values,
                                   int replicas, std::uint64_t seed,
                                   const ExecutionOptions& options = {});

}  // namespace zoss

#endif  // ZOSS_HARNESS_HPP_
