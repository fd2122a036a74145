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

#include "zoss/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "zoss/stats.hpp"

namespace zoss {

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (count <= 0) return;
  const int workers = std::clamp(threads, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

BoundInputs bound_inputs_for(const LossModel& model, const RunConfig& config,
                             long long n, int t0) {
  BoundInputs in;
  in.L = model.lipschitz_L();
  in.beta = model.smoothness_beta();
  in.n = n;
  in.T = config.T;
  in.d = model.dim();
  in.K = config.queries();
  in.C = config.C;
  in.m = config.batch_size;
  in.t0 = t0;
  if (config.algorithm == Algorithm::kZoss) {
    in.c = config.c;
    in.mu = config.mu;
  } else {
    in.c = 0.0;
    in.mu = 0.0;
  }
  return in;
}

NamedBound theoretical_stability_bound(const LossModel& model,
                                       const RunConfig& config, long long n,
                                       int t0) {
  const BoundInputs in = bound_inputs_for(model, config, n, t0);
  const Schedule schedule = config.schedule(model);
  if (config.algorithm == Algorithm::kGd) {
    require(t0 == 0, "GD stability bound has no t0 conditioning");
    return {"gd_delta", gd_stability_and_gen_bound(in, schedule).delta_bound};
  }
  const std::vector<double> alphas = schedule.values();
  const bool nonexpansive =
      model.convex() &&
      std::all_of(alphas.begin(), alphas.end(),
                  [&](double a) { return a <= 2.0 / in.beta; });
  if (nonexpansive) {
    return {"stability_convex", stability_bound_convex(in, alphas)};
  }
  return {"stability_nonconvex", stability_bound_nonconvex(in, alphas)};
}

NamedBound theoretical_gen_bound(const LossModel& model,
                                 const RunConfig& config, long long n) {
  if (config.T == 0) return {"untrained", 0.0};
  const BoundInputs in = bound_inputs_for(model, config, n);
  const ScheduleKind kind = config.schedule_kind;
  if (config.algorithm == Algorithm::kGd) {
    const GdBound gd = gd_stability_and_gen_bound(in, config.schedule(model));
    if (!gd.gen_bound) {
      throw PreconditionError("GD generalization bound needs alpha_t = C/t");
    }
    return {"gd_gen", *gd.gen_bound};
  }
  const bool limit = !in.K;
  switch (kind) {
    case ScheduleKind::kDecreasingOverGamma:
      if (model.bounded01()) {
        return {"bounded_decreasing_short",
                gen_bound_bounded_decreasing(in, kind).short_form};
      }
      return {"unbounded_decreasing", gen_bound_unbounded_decreasing(in, kind)};
    case ScheduleKind::kDecreasingPlain:
      if (model.bounded01()) {
        return {"dimension_free", gen_bound_dimension_free(in, kind)};
      }
      if (limit) {
        return {"unbounded_decreasing",
                gen_bound_unbounded_decreasing(in, kind)};
      }
      break;
    case ScheduleKind::kLogConstantConvex:
      if (!model.convex()) break;
      [[fallthrough]];
    case ScheduleKind::kLogConstantNonconvex:
      return {"unbounded_log_constant",
              gen_bound_unbounded_constant(in, ConstantStepCase::kLogSchedule,
                                           kind)};
    case ScheduleKind::kConstantOverTGamma:
      return {"unbounded_constant",
              gen_bound_unbounded_constant(
                  in, ConstantStepCase::kPlainConstant, kind)};
    case ScheduleKind::kConstantPlain:
      if (limit) {
        return {"unbounded_constant",
                gen_bound_unbounded_constant(
                    in, ConstantStepCase::kPlainConstant, kind)};
      }
      break;
  }
  throw PreconditionError("no generalization bound for loss '" + model.name() +
                          "' with schedule '" + std::string(to_string(kind)) +
                          "'");
}

namespace {

double check_mu_cap(const LossModel& model, const RunConfig& config,
                    long long n, bool enforce) {
  if (config.algorithm != Algorithm::kZoss || config.c <= 0.0) return 0.0;
  const double cap =
      mu_cap(config.c, model.lipschitz_L(), gamma(model.dim(), config.K), n,
             model.smoothness_beta(), model.dim());
  if (enforce && config.mu > cap * (1.0 + 1e-12)) {
    throw PreconditionError("mu exceeds the admissible cap " +
                            std::to_string(cap));
  }
  return cap;
}

bool hits_before(const Trajectory& traj, int index, int t0) {
  for (int t = 0; t < t0 && t < static_cast<int>(traj.batches.size()); ++t) {
    const auto& b = traj.batches[static_cast<std::size_t>(t)];
    if (std::find(b.begin(), b.end(), index) != b.end()) return true;
  }
  return false;
}

}  // namespace

StabilityReport run_coupled_stability(const LossModel& model,
                                      const NeighborPair& pair,
                                      const RunConfig& config, int replicas,
                                      const ExecutionOptions& options) {
  require(replicas >= 1, "run_coupled_stability: replicas must be >= 1");
  require(pair.base.size() == pair.variant.size(),
          "run_coupled_stability: datasets differ in size");
  const long long n = static_cast<long long>(pair.base.size());
  config.validate(n);
  require(options.t0 >= 0 && options.t0 <= config.T,
          "run_coupled_stability: need 0 <= t0 <= T");

  StabilityReport report;
  report.config = config;
  if (report.config.dataset_id.empty()) report.config.dataset_id = pair.base.id;
  report.dataset_id = pair.base.id;
  report.n = n;
  report.swap_index = pair.swap_index;
  report.replicas = replicas;
  report.t0 = options.t0;
  report.mu_cap = check_mu_cap(model, config, n, options.enforce_mu_cap);

  enum class Outcome { kUsed, kRejected, kFailed };
  std::vector<Outcome> outcome(static_cast<std::size_t>(replicas));
  std::vector<double> delta(static_cast<std::size_t>(replicas), 0.0);
  parallel_for(replicas, options.threads, [&](int r) {
    const auto slot = static_cast<std::size_t>(r);
    try {
      const auto replica = static_cast<std::uint64_t>(r);
      const Trajectory a = run_trajectory(model, config, pair.base.view(), replica);
      if (options.t0 > 0 && hits_before(a, pair.swap_index, options.t0)) {
        outcome[slot] = Outcome::kRejected;
        return;
      }
      const Trajectory b =
          run_trajectory(model, config, pair.variant.view(), replica);
      delta[slot] = (a.final_iterate() - b.final_iterate()).norm();
      outcome[slot] = Outcome::kUsed;
    } catch (const DivergedError&) {
      outcome[slot] = Outcome::kFailed;
    } catch (const NumericError&) {
      outcome[slot] = Outcome::kFailed;
    }
  });

  RunningStats stats;
  for (int r = 0; r < replicas; ++r) {
    const auto slot = static_cast<std::size_t>(r);
    if (outcome[slot] == Outcome::kFailed) ++report.failed_replicas;
    if (outcome[slot] != Outcome::kUsed) continue;
    stats.add(delta[slot]);
    report.deltas.push_back(delta[slot]);
  }
  report.used_replicas = static_cast<int>(stats.count());
  report.mean_delta = stats.mean();
  report.std_error = stats.std_error();

  const NamedBound bound =
      theoretical_stability_bound(model, config, n, options.t0);
  report.bound_name = bound.name;
  report.theoretical_bound = bound.value;
  const bool few_failures = report.failed_replicas * 100 <= replicas;
  report.pass = few_failures && report.used_replicas > 0 &&
                report.mean_delta - 3.0 * report.std_error <=
                    report.theoretical_bound;
  return report;
}

SwapSweep run_swap_sweep(const LossModel& model, const Dataset& base,
                         const std::vector<int>& swap_indices,
                         const RunConfig& config, int replicas,
                         const ExecutionOptions& options) {
  require(!swap_indices.empty(), "run_swap_sweep: no swap positions");
  SwapSweep sweep;
  sweep.pass = true;
  for (int index : swap_indices) {
    const NeighborPair pair = make_neighbor(base, index, config.master_seed);
    sweep.reports.push_back(
        run_coupled_stability(model, pair, config, replicas, options));
    const auto& r = sweep.reports.back();
    sweep.pass = sweep.pass && r.pass;
    if (r.mean_delta >
        sweep.reports[static_cast<std::size_t>(sweep.worst)].mean_delta) {
      sweep.worst = static_cast<int>(sweep.reports.size()) - 1;
    }
  }
  return sweep;
}

GenReport run_generalization(const LossModel& model, const RunConfig& config,
                             const DatasetSpec& spec, long long n,
                             int replicas, long long test_size,
                             const ExecutionOptions& options) {
  require(replicas >= 2, "run_generalization: replicas must be >= 2");
  require(test_size >= 1000, "run_generalization: test_size must be >= 1000");
  spec.validate();
  require(spec.dim == model.dim(), "run_generalization: dimension mismatch");
  config.validate(n);

  GenReport report;
  report.config = config;
  report.spec = spec;
  report.n = n;
  report.replicas = replicas;
  report.test_size = test_size;
  check_mu_cap(model, config, n, options.enforce_mu_cap);

  struct Sample {
    bool ok = false;
    double train = 0.0;
    double test = 0.0;
  };
  std::vector<Sample> samples(static_cast<std::size_t>(replicas));
  parallel_for(replicas, options.threads, [&](int r) {
    DatasetSpec replica_spec = spec;
    replica_spec.seed = derive_key(spec.seed, static_cast<std::uint64_t>(r));
    const Dataset data = generate_dataset(replica_spec, n);
    Sample& s = samples[static_cast<std::size_t>(r)];
    try {
      const Trajectory traj = run_trajectory(model, config, data.view(),
                                             static_cast<std::uint64_t>(r));
      const Vector& w = traj.final_iterate();
      double train = 0.0;
      for (const Example& z : data.examples) train += model.evaluate(w, z);
      double test = 0.0;
      for (const Example& z : generate_test_set(replica_spec, 0, test_size)) {
        test += model.evaluate(w, z);
      }
      s.train = train / static_cast<double>(n);
      s.test = test / static_cast<double>(test_size);
      s.ok = std::isfinite(s.train) && std::isfinite(s.test);
    } catch (const DivergedError&) {
    } catch (const NumericError&) {
    }
  });

  RunningStats gap;
  RunningStats train;
  RunningStats test;
  for (const Sample& s : samples) {
    if (!s.ok) {
      ++report.failed_replicas;
      continue;
    }
    gap.add(s.test - s.train);
    train.add(s.train);
    test.add(s.test);
  }
  report.mean_gap = gap.mean();
  report.std_error = gap.std_error();
  report.mean_train = train.mean();
  report.mean_test = test.mean();

  const NamedBound bound = theoretical_gen_bound(model, config, n);
  report.bound_name = bound.name;
  report.theoretical_bound = bound.value;
  report.pass = report.failed_replicas * 100 <= replicas && gap.count() > 1 &&
                std::abs(report.mean_gap) - 3.0 * report.std_error <=
                    report.theoretical_bound;
  return report;
}

std::vector<StabilityReport> run_batch_size_sweep(
    const LossModel& model, const NeighborPair& pair,
    const RunConfig& base_config, const std::vector<int>& m_values,
    int replicas, const ExecutionOptions& options) {
  require(!m_values.empty(), "run_batch_size_sweep: no batch sizes");
  std::vector<StabilityReport> reports;
  std::optional<double> shared_bound;
  for (int m : m_values) {
    require(m >= 1 && static_cast<std::size_t>(m) <= pair.base.size(),
            "run_batch_size_sweep: batch size out of range");
    RunConfig config = base_config;
    config.batch_size = m;
    reports.push_back(
        run_coupled_stability(model, pair, config, replicas, options));
    if (!shared_bound) shared_bound = reports.back().theoretical_bound;
    if (reports.back().theoretical_bound != *shared_bound) {
      throw PreconditionError("batch-size sweep: bound changed with m");
    }
  }
  return reports;
}

SgdLimitReport run_sgd_limit_check(const LossModel& model,
                                   const DatasetSpec& spec,
                                   const std::vector<long long>& K_values,
                                   const std::vector<double>& mu_values,
                                   int replicas, std::uint64_t seed,
                                   const ExecutionOptions& options) {
  require(!K_values.empty() && K_values.size() == mu_values.size(),
          "run_sgd_limit_check: need matching, non-empty K and mu lists");
  require(replicas >= 2, "run_sgd_limit_check: replicas must be >= 2");
  require(spec.dim == model.dim(), "run_sgd_limit_check: dimension mismatch");
  for (std::size_t i = 1; i < K_values.size(); ++i) {
    require(K_values[i] >= K_values[i - 1],
            "run_sgd_limit_check: K values must be non-decreasing");
    require(mu_values[i] <= mu_values[i - 1],
            "run_sgd_limit_check: mu values must be non-increasing");
  }
  constexpr int kProbes = 20;
  const int d = model.dim();
  const double bias_unit =
      model.smoothness_beta() * std::pow(3.0 + d, 1.5);

  std::vector<Example> probe_z = generate_test_set(spec, seed, kProbes);
  std::vector<Vector> probe_w;
  for (int p = 0; p < kProbes; ++p) {
    CounterRng rng(stream_key(StreamPurpose::kProbe, seed,
                              static_cast<std::uint64_t>(p), 0x51));
    probe_w.push_back(spec.radius * sample_gaussian(rng, d));
  }
  double mean_grad_norm = 0.0;
  for (int p = 0; p < kProbes; ++p) {
    mean_grad_norm += model.gradient(probe_w[p], probe_z[p]).norm();
  }
  mean_grad_norm /= kProbes;

  SgdLimitReport report;
  report.loss = model.name();
  report.probes = kProbes;
  report.replicas = replicas;
  for (std::size_t i = 0; i < K_values.size(); ++i) {
    const SmoothedGradientParams params{static_cast<int>(K_values[i]),
                                        mu_values[i]};
    params.validate();
    std::vector<double> errors(static_cast<std::size_t>(replicas) * kProbes);
    parallel_for(replicas, options.threads, [&](int r) {
      for (int p = 0; p < kProbes; ++p) {
        const PerturbationStream stream{.master_seed = seed,
                                        .replica = static_cast<std::uint64_t>(r),
                                        .step = static_cast<std::uint64_t>(p)};
        const Vector est =
            smoothed_gradient(model, probe_w[p], probe_z[p], params, stream);
        errors[static_cast<std::size_t>(r) * kProbes + p] =
            (est - model.gradient(probe_w[p], probe_z[p])).norm();
      }
    });
    RunningStats stats;
    for (double e : errors) stats.add(e);
    SgdLimitPoint point;
    point.K = K_values[i];
    point.mu = mu_values[i];
    point.mean_error = stats.mean();
    point.std_error = stats.std_error();
    point.envelope = 1.2 * (std::sqrt((3.0 * d - 1.0) / point.K) *
                                mean_grad_norm +
                            point.mu * bias_unit);
    report.points.push_back(point);
  }
  report.non_increasing = true;
  for (std::size_t i = 1; i < report.points.size(); ++i) {
    const auto& prev = report.points[i - 1];
    const auto& cur = report.points[i];
    // Equal-within-noise counts as non-increasing (e.g. an exact-gradient loss).
    const double slack = 3.0 * std::hypot(prev.std_error, cur.std_error);
    if (cur.mean_error > prev.mean_error + slack) report.non_increasing = false;
  }
  const SgdLimitPoint& last = report.points.back();
  report.final_within_envelope = last.mean_error <= last.envelope;
  report.pass = report.non_increasing && report.final_within_envelope;
  return report;
}

}  // namespace zoss
