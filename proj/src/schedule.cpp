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

#include "zoss/schedule.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace zoss {
namespace {

constexpr std::array<std::pair<ScheduleKind, std::string_view>, 6> kNames{{
    {ScheduleKind::kDecreasingOverGamma, "decreasing-over-gamma"},
    {ScheduleKind::kDecreasingPlain, "decreasing-plain"},
    {ScheduleKind::kConstantOverTGamma, "constant-over-t-gamma"},
    {ScheduleKind::kLogConstantNonconvex, "log-constant-nonconvex"},
    {ScheduleKind::kLogConstantConvex, "log-constant-convex"},
    {ScheduleKind::kConstantPlain, "constant-plain"},
}};

void check_queries(int d, QueryCount K) {
  require(d >= 1, "dimension d must be >= 1");
  require(!K || *K >= 1, "query count K must be >= 1");
}

}  // namespace

double query_ratio(int d, QueryCount K) {
  check_queries(d, K);
  if (!K) return 0.0;
  return std::sqrt((3.0 * d - 1.0) / static_cast<double>(*K));
}

double gamma(int d, QueryCount K) { return query_ratio(d, K) + 1.0; }

double mu_cap(double c, double L, double gamma, long long n, double beta,
              int d) {
  require(c > 0.0 && L > 0.0 && gamma > 0.0 && n > 0 && beta > 0.0 && d > 0,
          "mu_cap: all arguments must be positive");
  return c * L * gamma /
         (static_cast<double>(n) * beta * std::pow(3.0 + d, 1.5));
}

std::string_view to_string(ScheduleKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw InvalidArgument("unknown schedule kind '" + std::string(name) + "'");
}

Schedule::Schedule(ScheduleKind kind, double C, int T, double beta, int d,
                   QueryCount K)
    : kind_(kind), C_(C), T_(T), beta_(beta), d_(d), K_(K) {
  require(C > 0.0 && std::isfinite(C), "Schedule: C must be finite and > 0");
  require(T >= 0, "Schedule: T must be >= 0");
  check_queries(d, K);
  gamma_ = zoss::gamma(d, K);
  ratio_ = query_ratio(d, K);
  const bool needs_beta = kind == ScheduleKind::kLogConstantNonconvex ||
                          kind == ScheduleKind::kLogConstantConvex;
  require(!needs_beta || beta > 0.0, "Schedule: beta must be > 0");
}

double Schedule::alpha(int t) const {
  require(t >= 1 && t <= std::max(T_, 1), "Schedule: t out of range");
  const double T = static_cast<double>(T_);
  switch (kind_) {
    case ScheduleKind::kDecreasingOverGamma:
      return C_ / (t * gamma_);
    case ScheduleKind::kDecreasingPlain:
      return C_ / t;
    case ScheduleKind::kConstantOverTGamma:
      return C_ / (T * gamma_);
    case ScheduleKind::kLogConstantNonconvex:
      return std::log1p(C_ * beta_) / (T * beta_ * gamma_);
    case ScheduleKind::kLogConstantConvex: {
      const double cap = 2.0 / beta_;
      // K -> inf: log(1 + C beta r / Gamma) / (T beta r) -> C / T.
      if (ratio_ == 0.0) return std::min(C_ / T, cap);
      const double rate =
          std::log1p(C_ * beta_ * ratio_ / gamma_) / (T * beta_ * ratio_);
      return std::min(rate, cap);
    }
    case ScheduleKind::kConstantPlain:
      return C_ / T;
  }
  return 0.0;
}

std::vector<double> Schedule::values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(T_));
  for (int t = 1; t <= T_; ++t) out.push_back(alpha(t));
  return out;
}

}  // namespace zoss
