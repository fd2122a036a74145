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

#ifndef ZOSS_SCHEDULE_HPP_
#define ZOSS_SCHEDULE_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zoss/types.hpp"

namespace zoss {

// Number of perturbation directions. std::nullopt stands for the K -> inf
// limit (exact gradients), where the dimension factor collapses to 1.
using QueryCount = std::optional<long long>;

// sqrt((3d - 1) / K); zero in the K -> inf limit.
double query_ratio(int d, QueryCount K);

// Gamma^d_K = sqrt((3d - 1) / K) + 1.
double gamma(int d, QueryCount K);

// Admissible smoothing radius c L Gamma / (n beta (3 + d)^{3/2}).
double mu_cap(double c, double L, double gamma, long long n, double beta,
              int d);

enum class ScheduleKind {
  kDecreasingOverGamma,   // C / (t Gamma)
  kDecreasingPlain,       // C / t
  kConstantOverTGamma,    // C / (T Gamma)
  kLogConstantNonconvex,  // log(1 + C beta) / (T beta Gamma)
  kLogConstantConvex,     // min{log(1 + C beta ratio / Gamma) / (T beta ratio), 2 / beta}
  kConstantPlain,         // C / T
};

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view name);

// Step-size rule alpha_t for t = 1..T. Every rule is the corresponding
// upper bound taken with equality.
class Schedule {
 public:
  Schedule(ScheduleKind kind, double C, int T, double beta, int d,
           QueryCount K);

  double alpha(int t) const;
  // alpha_1 .. alpha_T.
  std::vector<double> values() const;

  ScheduleKind kind() const { return kind_; }
  double C() const { return C_; }
  int T() const { return T_; }
  double beta() const { return beta_; }
  int d() const { return d_; }
  QueryCount K() const { return K_; }
  double gamma() const { return gamma_; }
  double ratio() const { return ratio_; }

 private:
  ScheduleKind kind_;
  double C_;
  int T_;
  double beta_;
  int d_;
  QueryCount K_;
  double gamma_;
  double ratio_;
};

}  // namespace zoss

#endif  // ZOSS_SCHEDULE_HPP_
