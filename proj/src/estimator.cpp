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

#include "zoss/estimator.hpp"

#include <cmath>
#include <string>

#include "zoss/stats.hpp"

namespace zoss {
namespace {

double checked_evaluate(const LossModel& model, const Vector& w,
                        const Example& z, int direction) {
  const double value = model.evaluate(w, z);
  if (!std::isfinite(value)) {
    throw NumericError("non-finite loss evaluation at direction " +
                           std::to_string(direction),
                       direction);
  }
  return value;
}

// Sum over k of the difference quotients times U_k, without the 1/K.
void accumulate_directions(const LossModel& model, const Vector& w,
                           const Example& z, const SmoothedGradientParams& params,
                           const PerturbationStream& stream, Vector& sum) {
  const int d = model.dim();
  const double base = checked_evaluate(model, w, z, 0);
  Vector probe(d);
  for (int k = 1; k <= params.K; ++k) {
    const Vector u = sample_gaussian(stream.with_direction(k), d);
    probe = w + params.mu * u;
    const double shifted = checked_evaluate(model, probe, z, k);
    sum += ((shifted - base) / params.mu) * u;
  }
}

}  // namespace

void SmoothedGradientParams::validate() const {
  require(K >= 1, "smoothed gradient: K must be >= 1");
  require(mu > 0.0 && std::isfinite(mu),
          "smoothed gradient: mu must be finite and > 0");
}

Vector smoothed_gradient(const LossModel& model, const Vector& w,
                         const Example& z, const SmoothedGradientParams& params,
                         const PerturbationStream& stream) {
  params.validate();
  require(w.size() == model.dim(), "smoothed_gradient: dimension mismatch");
  Vector sum = Vector::Zero(model.dim());
  accumulate_directions(model, w, z, params, stream.with_slot(0), sum);
  return sum / static_cast<double>(params.K);
}

Vector smoothed_gradient_batch(const LossModel& model, const Vector& w,
                               std::span<const Example> batch,
                               const SmoothedGradientParams& params,
                               const PerturbationStream& stream) {
  params.validate();
  require(!batch.empty(), "smoothed_gradient_batch: empty batch");
  require(w.size() == model.dim(), "smoothed_gradient_batch: dimension mismatch");
  Vector sum = Vector::Zero(model.dim());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    accumulate_directions(model, w, batch[i], params, stream.with_slot(i), sum);
  }
  return sum / (static_cast<double>(params.K) *
                static_cast<double>(batch.size()));
}

VarianceReductionReport verify_variance_reduction(int d, int K,
                                                  const Vector& v,
                                                  long long n_mc,
                                                  std::uint64_t seed) {
  require(d >= 1, "verify_variance_reduction: d must be >= 1");
  require(K >= 1, "verify_variance_reduction: K must be >= 1");
  require(v.size() == d, "verify_variance_reduction: |V| != d");
  require(n_mc >= 1000, "verify_variance_reduction: n_mc must be >= 1000");

  RunningStats first;
  RunningStats second;
  Vector acc(d);
  for (long long j = 0; j < n_mc; ++j) {
    acc.setZero();
    for (int k = 0; k < K; ++k) {
      CounterRng rng(stream_key(StreamPurpose::kMonteCarlo, seed,
                                static_cast<std::uint64_t>(j),
                                static_cast<std::uint64_t>(k)));
      const Vector u = sample_gaussian(rng, d);
      acc += v.dot(u) * u;
    }
    const double sq = (acc / static_cast<double>(K) - v).squaredNorm();
    first.add(std::sqrt(sq));
    second.add(sq);
  }

  VarianceReductionReport r;
  r.d = d;
  r.K = K;
  r.n_mc = n_mc;
  r.v_norm = v.norm();
  r.lhs_mean = first.mean();
  r.lhs_mean_stderr = first.std_error();
  r.lhs_second_moment = second.mean();
  r.second_moment_stderr = second.std_error();
  const double v2 = v.squaredNorm();
  r.exact_second_moment = (d + 1.0) * v2 / K;
  r.bound_first = std::sqrt((3.0 * d - 1.0) / K) * r.v_norm;
  r.bound_second = (3.0 * d - 1.0) * v2 / K;
  r.pass = r.lhs_mean <= r.bound_first + 3.0 * r.lhs_mean_stderr &&
           std::abs(r.lhs_second_moment - r.exact_second_moment) <=
               5.0 * r.second_moment_stderr;
  return r;
}

double gaussian_norm_third_moment(int d) {
  require(d >= 1, "gaussian_norm_third_moment: d must be >= 1");
  return std::pow(2.0, 1.5) *
         std::exp(std::lgamma((d + 3.0) / 2.0) - std::lgamma(d / 2.0));
}

ThirdMomentReport verify_third_moment(int d, long long n_mc,
                                      std::uint64_t seed) {
  require(d >= 1, "verify_third_moment: d must be >= 1");
  require(n_mc >= 2, "verify_third_moment: n_mc must be >= 2");
  RunningStats stats;
  for (long long j = 0; j < n_mc; ++j) {
    CounterRng rng(stream_key(StreamPurpose::kMonteCarlo, seed,
                              static_cast<std::uint64_t>(j), 0x3));
    const double norm = sample_gaussian(rng, d).norm();
    stats.add(norm * norm * norm);
  }
  ThirdMomentReport r;
  r.d = d;
  r.n_mc = n_mc;
  r.mc_estimate = stats.mean();
  r.std_error = stats.std_error();
  r.exact = gaussian_norm_third_moment(d);
  r.bound = std::pow(3.0 + d, 1.5);
  r.pass = std::abs(r.mc_estimate - r.exact) <= 5.0 * r.std_error &&
           r.exact <= r.bound;
  return r;
}

nlohmann::json to_json(const VarianceReductionReport& r) {
  return {
      {"lemma", "variance_reduction"},
      {"params", {{"d", r.d}, {"K", r.K}, {"n_mc", r.n_mc}, {"v_norm", r.v_norm}}},
      {"estimate", r.lhs_mean},
      {"stderr", r.lhs_mean_stderr},
      {"bound", r.bound_first},
      {"second_moment", r.lhs_second_moment},
      {"second_moment_stderr", r.second_moment_stderr},
      {"exact_second_moment", r.exact_second_moment},
      {"bound_second", r.bound_second},
      {"pass", r.pass},
  };
}

nlohmann::json to_json(const ThirdMomentReport& r) {
  return {
      {"lemma", "gaussian_third_moment"},
      {"params", {{"d", r.d}, {"n_mc", r.n_mc}}},
      {"estimate", r.mc_estimate},
      {"stderr", r.std_error},
      {"exact", r.exact},
      {"bound", r.bound},
      {"pass", r.pass},
  };
}

}  // namespace zoss
