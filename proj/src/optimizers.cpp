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

#include "zoss/optimizers.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace zoss {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kZoss:
      return "zoss";
    case Algorithm::kSgd:
      return "sgd";
    case Algorithm::kGd:
      return "gd";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "zoss") return Algorithm::kZoss;
  if (name == "sgd") return Algorithm::kSgd;
  if (name == "gd") return Algorithm::kGd;
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

QueryCount RunConfig::queries() const {
  if (algorithm == Algorithm::kZoss) return K;
  return std::nullopt;
}

Schedule RunConfig::schedule(const LossModel& model) const {
  return Schedule(schedule_kind, C, T, model.smoothness_beta(), model.dim(),
                  queries());
}

void RunConfig::validate(long long n) const {
  require(n >= 1, "RunConfig: empty dataset");
  require(T >= 0, "RunConfig: T must be >= 0");
  require(batch_size >= 1, "RunConfig: batch size must be >= 1");
  require(batch_size <= n, "RunConfig: batch size m exceeds n");
  if (algorithm == Algorithm::kZoss) estimator_params().validate();
  if (algorithm == Algorithm::kGd) {
    require(batch_size == n, "RunConfig: GD requires m = n");
  }
}

int select_index(std::uint64_t seed, std::uint64_t replica, int t, int n) {
  require(n >= 1, "select_index: n must be >= 1");
  CounterRng rng(stream_key(StreamPurpose::kSelect, seed, replica,
                            static_cast<std::uint64_t>(t)));
  std::uniform_int_distribution<int> pick(0, n - 1);
  return pick(rng);
}

std::vector<int> select_batch(std::uint64_t seed, std::uint64_t replica, int t,
                              int n, int m) {
  require(m >= 1 && m <= n, "select_batch: need 1 <= m <= n");
  CounterRng rng(stream_key(StreamPurpose::kSelect, seed, replica,
                            static_cast<std::uint64_t>(t)));
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < m; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(static_cast<std::size_t>(m));
  return pool;
}

Vector zoss_step(const LossModel& model, const Vector& w, const Example& z,
                 double alpha, const SmoothedGradientParams& params,
                 const PerturbationStream& stream) {
  require(alpha >= 0.0, "zoss_step: alpha must be >= 0");
  return w - alpha * smoothed_gradient(model, w, z, params, stream);
}

Vector zoss_step(const LossModel& model, const Vector& w,
                 std::span<const Example> batch, double alpha,
                 const SmoothedGradientParams& params,
                 const PerturbationStream& stream) {
  require(alpha >= 0.0, "zoss_step: alpha must be >= 0");
  return w - alpha * smoothed_gradient_batch(model, w, batch, params, stream);
}

Vector sgd_step(const LossModel& model, const Vector& w,
                std::span<const Example> batch, double alpha) {
  require(!batch.empty(), "sgd_step: empty batch");
  Vector g = Vector::Zero(w.size());
  for (const Example& z : batch) g += model.gradient(w, z);
  return w - (alpha / static_cast<double>(batch.size())) * g;
}

Trajectory run_trajectory(const LossModel& model, const RunConfig& config,
                          std::span<const Example> data,
                          std::uint64_t replica) {
  const int n = static_cast<int>(data.size());
  config.validate(n);
  const Schedule schedule = config.schedule(model);
  const SmoothedGradientParams params = config.estimator_params();

  Trajectory traj;
  traj.iterates.reserve(static_cast<std::size_t>(config.T) + 1);
  traj.iterates.push_back(Vector::Zero(model.dim()));
  std::vector<Example> batch;

  for (int t = 1; t <= config.T; ++t) {
    const double alpha = schedule.alpha(t);
    std::vector<int> indices;
    if (config.algorithm == Algorithm::kGd) {
      indices.resize(static_cast<std::size_t>(n));
      std::iota(indices.begin(), indices.end(), 0);
    } else {
      indices = select_batch(config.master_seed, replica, t, n,
                             config.batch_size);
    }
    batch.clear();
    for (int i : indices) batch.push_back(data[static_cast<std::size_t>(i)]);

    const Vector& w = traj.iterates.back();
    Vector next;
    if (config.algorithm == Algorithm::kZoss) {
      const PerturbationStream stream{.master_seed = config.master_seed,
                                      .replica = replica,
                                      .step = static_cast<std::uint64_t>(t)};
      next = batch.size() == 1
                 ? zoss_step(model, w, batch.front(), alpha, params, stream)
                 : zoss_step(model, w, batch, alpha, params, stream);
      traj.evaluations +=
          static_cast<long long>(batch.size()) * (config.K + 1);
    } else {
      next = sgd_step(model, w, batch, alpha);
      traj.gradient_calls += static_cast<long long>(batch.size());
    }
    if (!next.allFinite() || next.norm() > kDivergenceNorm) {
      throw DivergedError("trajectory diverged at step " + std::to_string(t),
                          t);
    }
    traj.iterates.push_back(std::move(next));
    traj.batches.push_back(std::move(indices));
    traj.alphas.push_back(alpha);
  }
  return traj;
}

ExpansivityReport expansivity_probe(const LossModel& model, double alpha,
                                    long long n_probes, std::uint64_t seed,
                                    std::span<const Example> examples) {
  require(alpha >= 0.0, "expansivity_probe: alpha must be >= 0");
  require(n_probes >= 1, "expansivity_probe: n_probes must be >= 1");
  require(!examples.empty(), "expansivity_probe: no examples");
  const int d = model.dim();
  const double beta = model.smoothness_beta();

  ExpansivityReport r;
  r.alpha = alpha;
  r.n_probes = n_probes;
  const bool contractive = model.convex() && alpha <= 2.0 / beta;
  r.eta_bound = contractive ? 1.0 : 1.0 + beta * alpha;
  r.sigma_bound = model.lipschitz_L() * alpha;

  auto map = [&](const Vector& w, const Example& z) {
    return Vector(w - alpha * model.gradient(w, z));
  };
  std::uniform_int_distribution<std::size_t> pick(0, examples.size() - 1);
  std::uniform_real_distribution<double> log_gap(-4.0, 0.5);
  for (long long p = 0; p < n_probes; ++p) {
    CounterRng rng(stream_key(StreamPurpose::kProbe, seed,
                              static_cast<std::uint64_t>(p)));
    const Example& z = examples[pick(rng)];
    // Mix of scales: near the data and far into the tails of each loss.
    const double scale = std::pow(10.0, log_gap(rng) + 0.5);
    const Vector w = scale * sample_gaussian(rng, d);
    const Vector dir = sample_gaussian(rng, d).normalized();
    const Vector w2 = w + std::pow(10.0, log_gap(rng)) * dir;

    const Vector gw = map(w, z);
    const double gap = (w - w2).norm();
    if (gap > 0.0) {
      r.max_ratio = std::max(r.max_ratio, (gw - map(w2, z)).norm() / gap);
    }
    r.max_step = std::max(r.max_step, (w - gw).norm());
  }
  r.pass = r.max_ratio <= r.eta_bound + 1e-9 &&
           r.max_step <= r.sigma_bound * (1.0 + 1e-12);
  return r;
}

}  // namespace zoss
