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

#include "zoss/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace zoss {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxExponent = 700.0;

// Calculators accept the schedule they were derived for. In the K -> inf
// limit Gamma = 1, so the "over Gamma" rules coincide with the plain ones.
void expect_kind(const BoundInputs& in, ScheduleKind kind,
                 std::initializer_list<ScheduleKind> accepted,
                 std::initializer_list<ScheduleKind> accepted_at_limit,
                 const char* who) {
  for (ScheduleKind k : accepted) {
    if (k == kind) return;
  }
  if (!in.K) {
    for (ScheduleKind k : accepted_at_limit) {
      if (k == kind) return;
    }
  }
  throw PreconditionError(std::string(who) + ": not defined for schedule '" +
                          std::string(to_string(kind)) + "'");
}

void expect_alphas(const BoundInputs& in, std::span<const double> alphas) {
  require(static_cast<long long>(alphas.size()) == in.T,
          "bound: schedule length does not match T");
  for (double a : alphas) {
    require(a >= 0.0 && std::isfinite(a), "bound: step sizes must be >= 0");
  }
}

// prefactor * sum_{t=t0+1}^T alpha_t prod_{j=t+1}^T (1 + growth * alpha_j),
// accumulated as log-sum-exp over log1p terms.
double recursion_solution(double prefactor, double growth, int t0,
                          std::span<const double> alphas) {
  const int T = static_cast<int>(alphas.size());
  if (prefactor == 0.0 || t0 >= T) return 0.0;
  std::vector<double> log_terms;
  log_terms.reserve(static_cast<std::size_t>(T - t0));
  double suffix = 0.0;  // sum_{j > t} log(1 + growth alpha_j)
  for (int t = T; t > t0; --t) {
    const double alpha = alphas[static_cast<std::size_t>(t - 1)];
    if (alpha > 0.0) log_terms.push_back(std::log(alpha) + suffix);
    suffix += std::log1p(growth * alpha);
  }
  if (log_terms.empty()) return 0.0;
  const double top = *std::max_element(log_terms.begin(), log_terms.end());
  double acc = 0.0;
  for (double x : log_terms) acc += std::exp(x - top);
  return saturating_exp(std::log(prefactor) + top + std::log(acc));
}

double stability_prefactor(const BoundInputs& in) {
  return 2.0 * in.L * in.gamma() / static_cast<double>(in.n) +
         in.mu * in.beta * in.third_moment_bound();
}

}  // namespace

double BoundInputs::third_moment_bound() const {
  return std::pow(3.0 + d, 1.5);
}

void BoundInputs::validate() const {
  require(L > 0.0 && beta > 0.0, "BoundInputs: L and beta must be > 0");
  require(n >= 1 && T >= 0 && d >= 1, "BoundInputs: need n >= 1, T >= 0, d >= 1");
  require(!K || *K >= 1, "BoundInputs: K must be >= 1");
  require(C > 0.0, "BoundInputs: C must be > 0");
  require(c >= 0.0 && mu >= 0.0, "BoundInputs: c and mu must be >= 0");
  require(m >= 1 && m <= n, "BoundInputs: need 1 <= m <= n");
  require(t0 >= 0 && t0 <= T, "BoundInputs: need 0 <= t0 <= T");
}

BoundInputs BoundInputs::sgd_limit() const {
  BoundInputs out = *this;
  out.K = std::nullopt;
  out.c = 0.0;
  out.mu = 0.0;
  return out;
}

nlohmann::json to_json(const BoundInputs& in) {
  nlohmann::json j = {{"L", in.L},   {"beta", in.beta}, {"n", in.n},
                      {"T", in.T},   {"d", in.d},       {"C", in.C},
                      {"c", in.c},   {"mu", in.mu},     {"m", in.m},
                      {"t0", in.t0}, {"gamma", in.gamma()}};
  j["K"] = in.K ? nlohmann::json(*in.K) : nlohmann::json("inf");
  return j;
}

double saturating_exp(double x) {
  if (x > kMaxExponent) return kInf;
  return std::exp(x);
}

double stability_bound_nonconvex(const BoundInputs& in,
                                 std::span<const double> alphas) {
  in.validate();
  expect_alphas(in, alphas);
  const double growth =
      in.beta * in.gamma() * (1.0 - 1.0 / static_cast<double>(in.n));
  return recursion_solution(stability_prefactor(in), growth, in.t0, alphas);
}

double stability_bound_nonconvex(const BoundInputs& in,
                                 const Schedule& schedule) {
  const std::vector<double> alphas = schedule.values();
  return stability_bound_nonconvex(in, alphas);
}

double stability_bound_convex(const BoundInputs& in,
                              std::span<const double> alphas) {
  in.validate();
  expect_alphas(in, alphas);
  return recursion_solution(stability_prefactor(in), in.beta * in.ratio(),
                            in.t0, alphas);
}

double stability_bound_convex(const BoundInputs& in, const Schedule& schedule) {
  const std::vector<double> alphas = schedule.values();
  return stability_bound_convex(in, alphas);
}

BoundedDecreasingBound gen_bound_bounded_decreasing(const BoundInputs& in,
                                                    ScheduleKind kind) {
  in.validate();
  expect_kind(in, kind, {ScheduleKind::kDecreasingOverGamma},
              {ScheduleKind::kDecreasingPlain}, "gen_bound_bounded_decreasing");
  require(in.T >= 1, "gen_bound_bounded_decreasing: T must be >= 1");
  const double q = in.C * in.beta;
  const double a = (2.0 + in.c) * in.C * in.L * in.L;
  const double log_eT = 1.0 + std::log(static_cast<double>(in.T));
  const double n = static_cast<double>(in.n);

  // ((2+c) C L^2)^{1/(q+1)} (eT)^{q/(q+1)} / n
  const double base =
      saturating_exp((std::log(a) + q * log_eT) / (q + 1.0)) / n;
  // 1 + 1/q - e^q / (beta C^{1/(q+1)}) ((2+c) L^2 / (eT))^{q/(q+1)}
  //   = 1 - expm1(y) / q,  y = q + q/(q+1) log(a / (eT)).
  const double y = q + q / (q + 1.0) * (std::log(a) - log_eT);
  const double second = 1.0 - std::expm1(y) / q;

  BoundedDecreasingBound out;
  out.first_branch = second <= 1.0;
  out.tight = base * std::max(1.0, second);
  out.short_form = (1.0 + 1.0 / q) * base;
  return out;
}

double gen_bound_dimension_free(const BoundInputs& in, ScheduleKind kind) {
  in.validate();
  expect_kind(in, kind, {ScheduleKind::kDecreasingPlain},
              {ScheduleKind::kDecreasingOverGamma}, "gen_bound_dimension_free");
  const double q = in.C * in.beta;
  const double lead = (1.0 + 1.0 / q) * (1.0 + 1.0 / q);
  return lead * (1.0 + (2.0 + in.c) * in.C * in.L * in.L) * 3.0 * in.T *
         std::exp(1.0) / (2.0 * static_cast<double>(in.n));
}

double gen_bound_unbounded_constant(const BoundInputs& in,
                                    ConstantStepCase which, ScheduleKind kind) {
  in.validate();
  const double n = static_cast<double>(in.n);
  if (which == ConstantStepCase::kLogSchedule) {
    expect_kind(in, kind,
                {ScheduleKind::kLogConstantNonconvex,
                 ScheduleKind::kLogConstantConvex},
                {ScheduleKind::kConstantPlain}, "gen_bound_unbounded_constant");
    return (2.0 + in.c) * in.C * in.L * in.L / n;
  }
  expect_kind(in, kind, {ScheduleKind::kConstantOverTGamma},
              {ScheduleKind::kConstantPlain}, "gen_bound_unbounded_constant");
  const double q = in.C * in.beta;
  const double growth = q > kMaxExponent ? kInf : std::expm1(q);
  return in.L * in.L * (2.0 + in.c) * growth / (n * in.beta);
}

namespace {

// L^2 (eT)^{C beta} min{C + 1/beta, C log(eT)} / n without the (2+c) factor.
double decreasing_core(const BoundInputs& in) {
  const double log_eT = 1.0 + std::log(static_cast<double>(in.T));
  const double q = in.C * in.beta;
  const double branch = std::min(in.C + 1.0 / in.beta, in.C * log_eT);
  return in.L * in.L * saturating_exp(q * log_eT) * branch /
         static_cast<double>(in.n);
}

}  // namespace

double gen_bound_unbounded_decreasing(const BoundInputs& in,
                                      ScheduleKind kind) {
  in.validate();
  expect_kind(in, kind, {ScheduleKind::kDecreasingOverGamma},
              {ScheduleKind::kDecreasingPlain},
              "gen_bound_unbounded_decreasing");
  require(in.T >= 1, "gen_bound_unbounded_decreasing: T must be >= 1");
  return (2.0 + in.c) * decreasing_core(in);
}

double gd_delta_bound(const BoundInputs& in, std::span<const double> alphas) {
  in.validate();
  expect_alphas(in, alphas);
  const double n = static_cast<double>(in.n);
  return recursion_solution(2.0 * in.L / n, (n - 1.0) / n * in.beta, 0,
                            alphas);
}

GdBound gd_stability_and_gen_bound(const BoundInputs& in,
                                   const Schedule& schedule) {
  const std::vector<double> alphas = schedule.values();
  GdBound out;
  out.delta_bound = gd_delta_bound(in, alphas);
  const bool plain_decreasing =
      schedule.kind() == ScheduleKind::kDecreasingPlain ||
      (schedule.kind() == ScheduleKind::kDecreasingOverGamma &&
       schedule.gamma() == 1.0);
  if (plain_decreasing && in.T >= 1) out.gen_bound = 2.0 * decreasing_core(in);
  return out;
}

double growth_recursion_step(GrowthCase which, double delta, double alpha,
                             double eta, const BoundInputs& in) {
  require(delta >= 0.0, "growth_recursion_step: delta must be >= 0");
  const double bias = in.mu * in.beta * alpha * in.third_moment_bound();
  if (which == GrowthCase::kSameRule) {
    return (eta + alpha * in.beta * in.ratio()) * delta + bias;
  }
  return delta + 2.0 * alpha * in.L * in.gamma() + bias;
}

double growth_recursion_step_minibatch(GrowthCase which, double delta,
                                       double alpha, const BoundInputs& in) {
  require(delta >= 0.0, "growth_recursion_step_minibatch: delta must be >= 0");
  const double g = in.gamma();
  const double m = static_cast<double>(in.m);
  const double bias = in.c * in.L * alpha * g / static_cast<double>(in.n);
  if (which == GrowthCase::kSameRule) {
    return (1.0 + in.beta * alpha * g) * delta + bias;
  }
  return (1.0 + (m - 1.0) / m * in.beta * alpha * g) * delta +
         2.0 * in.L * alpha * g / m + bias;
}

double optimal_t0(const BoundInputs& in) {
  in.validate();
  const double q = in.C * in.beta;
  const double D = stability_prefactor(in) / (in.beta * in.gamma());
  const double log_eT = 1.0 + std::log(static_cast<double>(std::max(in.T, 1)));
  const double candidate = saturating_exp(
      (std::log(q * static_cast<double>(in.n) * in.L * D) + q * log_eT) /
      (q + 1.0));
  return std::min(candidate, static_cast<double>(in.T));
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json terms = nlohmann::json::object();
  for (const auto& [k, v] : r.terms) terms[k] = v;
  return {{"name", r.name},
          {"schedule", r.schedule},
          {"value", r.value},
          {"sgd_limit", r.sgd_limit},
          {"terms", terms}};
}

std::vector<BoundReport> table1(const BoundInputs& in) {
  in.validate();
  const BoundInputs sgd = in.sgd_limit();
  std::vector<BoundReport> rows;
  auto add = [&](std::string name, ScheduleKind kind, auto&& eval) {
    BoundReport r;
    r.name = std::move(name);
    r.schedule = std::string(to_string(kind));
    r.value = eval(in, kind);
    // The K -> inf counterpart runs the SGD rule (alpha = C/t or C/T).
    ScheduleKind sgd_kind = kind;
    if (kind == ScheduleKind::kDecreasingOverGamma) {
      sgd_kind = ScheduleKind::kDecreasingPlain;
    } else if (kind == ScheduleKind::kConstantOverTGamma) {
      sgd_kind = ScheduleKind::kConstantPlain;
    }
    r.sgd_limit = eval(sgd, sgd_kind);
    r.terms["gamma"] = in.gamma();
    r.terms["ratio"] = in.ratio();
    r.terms["q"] = in.C * in.beta;
    rows.push_back(std::move(r));
  };

  add("zoss_bounded_decreasing_short", ScheduleKind::kDecreasingOverGamma,
      [](const BoundInputs& b, ScheduleKind k) {
        return gen_bound_bounded_decreasing(b, k).short_form;
      });
  add("zoss_bounded_decreasing_tight", ScheduleKind::kDecreasingOverGamma,
      [](const BoundInputs& b, ScheduleKind k) {
        return gen_bound_bounded_decreasing(b, k).tight;
      });
  rows.back().terms["first_branch"] =
      gen_bound_bounded_decreasing(in, ScheduleKind::kDecreasingOverGamma)
              .first_branch
          ? 1.0
          : 0.0;
  rows.back().terms["optimal_t0"] = optimal_t0(in);
  add("zoss_dimension_free", ScheduleKind::kDecreasingPlain,
      [](const BoundInputs& b, ScheduleKind k) {
        return gen_bound_dimension_free(b, k);
      });
  add("zoss_unbounded_log_convex", ScheduleKind::kLogConstantConvex,
      [](const BoundInputs& b, ScheduleKind k) {
        return gen_bound_unbounded_constant(b, ConstantStepCase::kLogSchedule,
                                            k);
      });
  add("zoss_unbounded_constant", ScheduleKind::kConstantOverTGamma,
      [](const BoundInputs& b, ScheduleKind k) {
        return gen_bound_unbounded_constant(
            b, ConstantStepCase::kPlainConstant, k);
      });
  add("zoss_unbounded_log_nonconvex", ScheduleKind::kLogConstantNonconvex,
      [](const BoundInputs& b, ScheduleKind k) {
        return gen_bound_unbounded_constant(b, ConstantStepCase::kLogSchedule,
                                            k);
      });
  add("zoss_unbounded_decreasing", ScheduleKind::kDecreasingOverGamma,
      [](const BoundInputs& b, ScheduleKind k) {
        return gen_bound_unbounded_decreasing(b, k);
      });

  auto stability_row = [&](std::string name, bool convex) {
    add(std::move(name), ScheduleKind::kDecreasingOverGamma,
        [convex](const BoundInputs& b, ScheduleKind k) {
          const Schedule s(k, b.C, b.T, b.beta, b.d, b.K);
          return convex ? stability_bound_convex(b, s)
                        : stability_bound_nonconvex(b, s);
        });
  };
  stability_row("stability_nonconvex", false);
  stability_row("stability_convex", true);
  return rows;
}

}  // namespace zoss
