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

#ifndef ZOSS_BOUNDS_HPP_
#define ZOSS_BOUNDS_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "zoss/schedule.hpp"

namespace zoss {

// Symbols shared by the stability and generalization bounds. c = 0 and
// mu = 0 are accepted as analytic limits; K = nullopt is the K -> inf limit.
// The batch size m is carried for reporting only: none of the final-iterate
// bounds depend on it.
struct BoundInputs {
  double L = 1.0;
  double beta = 1.0;
  long long n = 100;
  int T = 100;
  int d = 1;
  QueryCount K = 1;
  double C = 1.0;
  double c = 0.0;
  double mu = 0.0;
  int m = 1;
  int t0 = 0;

  double gamma() const { return zoss::gamma(d, K); }
  double ratio() const { return query_ratio(d, K); }
  // (3 + d)^{3/2}
  double third_moment_bound() const;
  void validate() const;

  // Same inputs with Gamma = 1, c = 0, mu = 0.
  BoundInputs sgd_limit() const;
};

nlohmann::json to_json(const BoundInputs& inputs);

// exp(x), or +inf once x exceeds 700.
double saturating_exp(double x);

// (2L Gamma / n + mu beta (3+d)^{3/2}) sum_{t=t0+1}^T alpha_t
//     prod_{j=t+1}^T (1 + beta alpha_j Gamma (1 - 1/n)).
// `alphas` holds alpha_1 .. alpha_T.
double stability_bound_nonconvex(const BoundInputs& in,
                                 std::span<const double> alphas);
double stability_bound_nonconvex(const BoundInputs& in,
                                 const Schedule& schedule);

// Convex variant: expansion factor 1 + beta alpha_j sqrt((3d-1)/K).
double stability_bound_convex(const BoundInputs& in,
                              std::span<const double> alphas);
double stability_bound_convex(const BoundInputs& in, const Schedule& schedule);

// Bounded loss in [0, 1], alpha_t = C / (t Gamma).
struct BoundedDecreasingBound {
  double tight = 0.0;        // max{...} form
  double short_form = 0.0;   // (1 + 1/(C beta)) ((2+c) C L^2)^{1/(Cb+1)} (eT)^{Cb/(Cb+1)} / n
  bool first_branch = false; // the max is attained by the constant branch
};
BoundedDecreasingBound gen_bound_bounded_decreasing(const BoundInputs& in,
                                                    ScheduleKind kind);

// Bounded loss, alpha_t = C / t; free of d and K.
double gen_bound_dimension_free(const BoundInputs& in, ScheduleKind kind);

enum class ConstantStepCase { kLogSchedule, kPlainConstant };

// Unbounded loss with constant steps. kLogSchedule: (2+c) C L^2 / n for the
// log-constant schedules. kPlainConstant: L^2 (2+c)(e^{C beta} - 1)/(n beta)
// for alpha = C / (T Gamma).
double gen_bound_unbounded_constant(const BoundInputs& in,
                                    ConstantStepCase which, ScheduleKind kind);

// Unbounded loss, alpha_t = C / (t Gamma):
// (2+c) L^2 (eT)^{C beta} min{C + 1/beta, C log(eT)} / n.
double gen_bound_unbounded_decreasing(const BoundInputs& in,
                                      ScheduleKind kind);

// Full-batch GD. gen_bound is present only for alpha_t = C / t.
struct GdBound {
  double delta_bound = 0.0;
  std::optional<double> gen_bound;
};
GdBound gd_stability_and_gen_bound(const BoundInputs& in,
                                   const Schedule& schedule);
double gd_delta_bound(const BoundInputs& in, std::span<const double> alphas);

enum class GrowthCase { kSameRule, kDifferRule };

// One step of the single-query growth recursion with expansivity eta.
double growth_recursion_step(GrowthCase which, double delta, double alpha,
                             double eta, const BoundInputs& in);

// One step of the mini-batch growth recursion (batch size in.m, smoothing
// radius at the cap with constant in.c).
double growth_recursion_step_minibatch(GrowthCase which, double delta,
                                       double alpha, const BoundInputs& in);

// t0* = min{(q n L D)^{1/(q+1)} (eT)^{q/(q+1)}, T} with q = C beta and
// D = (2L Gamma / n + mu beta (3+d)^{3/2}) / (beta Gamma).
double optimal_t0(const BoundInputs& in);

struct BoundReport {
  std::string name;
  std::string schedule;
  double value = 0.0;
  double sgd_limit = 0.0;
  std::map<std::string, double> terms;
};

nlohmann::json to_json(const BoundReport& report);

// Every generalization row of the ZoSS-vs-SGD comparison plus the two
// stability solutions, each next to its K -> inf, c = 0, mu = 0 limit.
std::vector<BoundReport> table1(const BoundInputs& in);

}  // namespace zoss

#endif  // ZOSS_BOUNDS_HPP_
