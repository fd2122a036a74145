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

#ifndef ZOSS_OPTIMIZERS_HPP_
#define ZOSS_OPTIMIZERS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zoss/estimator.hpp"
#include "zoss/losses.hpp"
#include "zoss/schedule.hpp"

namespace zoss {

enum class Algorithm { kZoss, kSgd, kGd };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

// Everything needed to reproduce one trajectory given the loss model and a
// dataset. The schedule is materialized against the model's beta and the
// query count (K for ZoSS, the K -> inf limit for SGD and GD).
struct RunConfig {
  std::string loss = "sigmoid01";
  std::string dataset_id;
  Algorithm algorithm = Algorithm::kZoss;
  int K = 4;
  double mu = 1e-4;
  double c = 0.5;  // mu-cap constant the bounds are stated for
  int batch_size = 1;
  int T = 50;
  ScheduleKind schedule_kind = ScheduleKind::kDecreasingOverGamma;
  double C = 0.5;
  std::uint64_t master_seed = 42;

  QueryCount queries() const;
  Schedule schedule(const LossModel& model) const;
  SmoothedGradientParams estimator_params() const { return {K, mu}; }
  // Throws InvalidArgument unless the config is runnable on n examples.
  void validate(long long n) const;
};

struct Trajectory {
  std::vector<Vector> iterates;           // w_0 .. w_T
  std::vector<std::vector<int>> batches;  // J_1 .. J_T (0-based indices)
  std::vector<double> alphas;             // alpha_1 .. alpha_T
  long long evaluations = 0;              // loss evaluations (ZoSS)
  long long gradient_calls = 0;           // analytic gradients (SGD, GD)

  const Vector& final_iterate() const { return iterates.back(); }
};

// Norm beyond which a trajectory is declared diverged.
inline constexpr double kDivergenceNorm = 1e12;

// Uniform index in [0, n) from the ("select", replica, t) substream.
int select_index(std::uint64_t seed, std::uint64_t replica, int t, int n);

// m distinct indices, uniformly without replacement (partial Fisher-Yates on
// the same substream). The first element equals select_index(...).
std::vector<int> select_batch(std::uint64_t seed, std::uint64_t replica, int t,
                              int n, int m);

// w - alpha * smoothed gradient; single example or mini-batch.
Vector zoss_step(const LossModel& model, const Vector& w, const Example& z,
                 double alpha, const SmoothedGradientParams& params,
                 const PerturbationStream& stream);
Vector zoss_step(const LossModel& model, const Vector& w,
                 std::span<const Example> batch, double alpha,
                 const SmoothedGradientParams& params,
                 const PerturbationStream& stream);

// w - alpha * (mean analytic gradient over the batch).
Vector sgd_step(const LossModel& model, const Vector& w,
                std::span<const Example> batch, double alpha);

// Runs T steps from w_0 = 0. `replica` keys both the index and the
// perturbation streams, so two runs on neighbouring datasets with the same
// replica id are coupled.
Trajectory run_trajectory(const LossModel& model, const RunConfig& config,
                          std::span<const Example> data,
                          std::uint64_t replica = 0);

// Samples pairs (w, w') and measures the SGD map G(w) = w - alpha grad f(w,z).
struct ExpansivityReport {
  double alpha = 0.0;
  long long n_probes = 0;
  double max_ratio = 0.0;     // max ||G(w) - G(w')|| / ||w - w'||
  double eta_bound = 0.0;     // 1 if convex and alpha <= 2/beta, else 1 + beta alpha
  double max_step = 0.0;      // max ||w - G(w)||
  double sigma_bound = 0.0;   // L alpha
  bool pass = false;
};

ExpansivityReport expansivity_probe(const LossModel& model, double alpha,
                                    long long n_probes, std::uint64_t seed,
                                    std::span<const Example> examples);

}  // namespace zoss

#endif  // ZOSS_OPTIMIZERS_HPP_
