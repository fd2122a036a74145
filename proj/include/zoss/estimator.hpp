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

#ifndef ZOSS_ESTIMATOR_HPP_
#define ZOSS_ESTIMATOR_HPP_

#include <cstdint>
#include <span>
#include <string>

#include "json.hpp"

#include "zoss/losses.hpp"
#include "zoss/random_stream.hpp"

namespace zoss {

struct SmoothedGradientParams {
  int K = 1;         // perturbation directions; K + 1 loss evaluations
  double mu = 1e-3;  // smoothing radius

  void validate() const;
};

// (1/K) sum_k [f(w + mu U_k, z) - f(w, z)] / mu * U_k with U_k drawn from
// stream.with_direction(k). f(w, z) is evaluated once; the gradient of the
// model is never consulted.
Vector smoothed_gradient(const LossModel& model, const Vector& w,
                         const Example& z, const SmoothedGradientParams& params,
                         const PerturbationStream& stream);

// Mini-batch version: slot i of the batch uses stream.with_slot(i), so a
// batch of size one reproduces smoothed_gradient exactly.
Vector smoothed_gradient_batch(const LossModel& model, const Vector& w,
                               std::span<const Example> batch,
                               const SmoothedGradientParams& params,
                               const PerturbationStream& stream);

// Monte Carlo check of E||(1/K) sum <V, U_k> U_k - V|| <= sqrt((3d-1)/K)||V||
// together with the exact second moment (d+1)||V||^2 / K.
struct VarianceReductionReport {
  int d = 0;
  int K = 0;
  long long n_mc = 0;
  double v_norm = 0.0;
  double lhs_mean = 0.0;
  double lhs_mean_stderr = 0.0;
  double lhs_second_moment = 0.0;
  double second_moment_stderr = 0.0;
  double exact_second_moment = 0.0;
  double bound_first = 0.0;
  double bound_second = 0.0;
  bool pass = false;
};

VarianceReductionReport verify_variance_reduction(int d, int K,
                                                  const Vector& v,
                                                  long long n_mc,
                                                  std::uint64_t seed);

// E||U||^3 for U ~ N(0, I_d): 2^{3/2} Gamma((d+3)/2) / Gamma(d/2).
double gaussian_norm_third_moment(int d);

struct ThirdMomentReport {
  int d = 0;
  long long n_mc = 0;
  double mc_estimate = 0.0;
  double std_error = 0.0;
  double exact = 0.0;
  double bound = 0.0;  // (3 + d)^{3/2}
  bool pass = false;
};

ThirdMomentReport verify_third_moment(int d, long long n_mc,
                                      std::uint64_t seed);

// Serialized as {lemma, params, estimate, stderr, bound, pass, ...}.
nlohmann::json to_json(const VarianceReductionReport& report);
nlohmann::json to_json(const ThirdMomentReport& report);

}  // namespace zoss

#endif  // ZOSS_ESTIMATOR_HPP_
