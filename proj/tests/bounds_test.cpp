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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "zoss/bounds.hpp"

namespace zoss {
namespace {

using testing::relative_error;

const double kE = std::exp(1.0);

BoundInputs hand_inputs() {
  BoundInputs in;
  in.L = 1.0;
  in.n = 10;
  in.d = 1;
  in.K = 2;
  in.mu = 0.0;
  in.beta = 1.0;
  in.T = 2;
  in.C = 1.0;
  return in;
}

// Direct product evaluation, no logs.
double product_oracle(double prefactor, double growth, int t0,
                      const std::vector<double>& alphas) {
  double sum = 0.0;
  for (std::size_t t = static_cast<std::size_t>(t0); t < alphas.size(); ++t) {
    double prod = 1.0;
    for (std::size_t j = t + 1; j < alphas.size(); ++j) prod *= 1.0 + growth * alphas[j];
    sum += alphas[t] * prod;
  }
  return prefactor * sum;
}

TEST(StabilityNonconvex, HandExample) {
  const BoundInputs in = hand_inputs();
  const std::vector<double> alphas = {0.1, 0.1};
  // prefactor 2 * 1 * 2 / 10 = 0.4, factor 1 + 0.1 * 2 * 0.9 = 1.18
  EXPECT_NEAR(stability_bound_nonconvex(in, alphas), 0.4 * (0.1 * 1.18 + 0.1), 1e-15);
  EXPECT_NEAR(stability_bound_nonconvex(in, alphas), 0.0872, 1e-15);
}

TEST(StabilityConvex, HandExample) {
  const BoundInputs in = hand_inputs();
  const std::vector<double> alphas = {0.1, 0.1};
  EXPECT_NEAR(stability_bound_convex(in, alphas), 0.084, 1e-15);
}

TEST(StabilityNonconvex, EmptySumWhenT0EqualsT) {
  BoundInputs in = hand_inputs();
  in.t0 = 2;
  EXPECT_EQ(stability_bound_nonconvex(in, std::vector<double>{0.1, 0.1}), 0.0);
}

TEST(StabilityBounds, MatchProductOracle) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    BoundInputs in;
    in.n = 2 + static_cast<long long>(u(rng) * 100);
    in.T = 1 + static_cast<int>(u(rng) * 60);
    in.d = 1 + static_cast<int>(u(rng) * 20);
    in.K = 1 + static_cast<long long>(u(rng) * 64);
    in.L = 0.1 + 3.0 * u(rng);
    in.beta = 0.1 + 3.0 * u(rng);
    in.mu = 1e-3 * u(rng);
    in.t0 = static_cast<int>(u(rng) * in.T);
    std::vector<double> alphas(static_cast<std::size_t>(in.T));
    for (double& a : alphas) a = 0.3 * u(rng);
    const double g = std::sqrt((3.0 * in.d - 1.0) / static_cast<double>(*in.K)) + 1.0;
    const double pre = 2.0 * in.L * g / in.n + in.mu * in.beta * std::pow(3.0 + in.d, 1.5);
    const double nonconvex = product_oracle(pre, in.beta * g * (1.0 - 1.0 / in.n), in.t0, alphas);
    const double convex = product_oracle(pre, in.beta * (g - 1.0), in.t0, alphas);
    EXPECT_LE(relative_error(stability_bound_nonconvex(in, alphas), nonconvex), 1e-12);
    EXPECT_LE(relative_error(stability_bound_convex(in, alphas), convex), 1e-12);
    if (g - 1.0 <= g * (1.0 - 1.0 / in.n)) {
      EXPECT_LE(stability_bound_convex(in, alphas), stability_bound_nonconvex(in, alphas) * (1 + 1e-12));
    }
  }
}

TEST(StabilityBounds, MonotoneInT) {
  BoundInputs in;
  in.n = 20;
  in.d = 5;
  in.K = 4;
  in.beta = 0.5;
  double prev = 0.0;
  for (int T = 1; T <= 60; ++T) {
    in.T = T;
    const Schedule s(ScheduleKind::kDecreasingOverGamma, 0.5, T, in.beta, in.d, in.K);
    const double v = stability_bound_nonconvex(in, s);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(StabilityBounds, ConvexSgdLimitIsPrefactorTimesSum) {
  BoundInputs in = hand_inputs();
  in.K = std::nullopt;
  const std::vector<double> alphas = {0.1, 0.2};
  EXPECT_NEAR(stability_bound_convex(in, alphas), 2.0 / 10.0 * 0.3, 1e-15);
}

TEST(StabilityBounds, SaturatesInsteadOfOverflowing) {
  BoundInputs in;
  in.T = 2000;
  in.beta = 10.0;
  const std::vector<double> alphas(2000, 10.0);
  EXPECT_TRUE(std::isinf(stability_bound_nonconvex(in, alphas)));
  EXPECT_TRUE(std::isinf(saturating_exp(701.0)));
  EXPECT_EQ(saturating_exp(0.0), 1.0);
}

TEST(StabilityBounds, RejectsMismatchedSchedule) {
  BoundInputs in = hand_inputs();
  EXPECT_THROW(stability_bound_nonconvex(in, std::vector<double>{0.1}), InvalidArgument);
  EXPECT_THROW(stability_bound_nonconvex(in, std::vector<double>{0.1, -0.1}), InvalidArgument);
}

BoundInputs unit_inputs() {
  BoundInputs in;
  in.C = 1.0;
  in.beta = 1.0;
  in.c = 0.0;
  in.L = 1.0;
  in.T = 1;
  in.n = 1;
  return in;
}

TEST(BoundedDecreasing, HandExample) {
  const auto b = gen_bound_bounded_decreasing(unit_inputs(), ScheduleKind::kDecreasingOverGamma);
  EXPECT_NEAR(b.short_form, 2.0 * std::sqrt(2.0) * std::sqrt(kE), 1e-13);
  EXPECT_NEAR(b.short_form, 4.6630, 5e-4);
  EXPECT_LE(b.tight, b.short_form);
}

TEST(BoundedDecreasing, TightBranchesFollowTheMax) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    BoundInputs in;
    in.C = 0.05 + 3.0 * u(rng);
    in.beta = 0.05 + 3.0 * u(rng);
    in.L = 0.1 + 2.0 * u(rng);
    in.c = u(rng);
    in.n = 10 + static_cast<long long>(1000 * u(rng));
    in.T = 1 + static_cast<int>(1000 * u(rng));
    const double q = in.C * in.beta;
    const double a = (2.0 + in.c) * in.C * in.L * in.L;
    const double eT = kE * in.T;
    const double base = std::pow(a, 1.0 / (q + 1)) * std::pow(eT, q / (q + 1)) / in.n;
    // 1 + 1/q - e^q / (beta C^{1/(q+1)}) ((2 + c) L^2 / (eT))^{q/(q+1)}
    const double second = 1.0 + 1.0 / q -
        std::exp(q) / (in.beta * std::pow(in.C, 1.0 / (q + 1))) *
            std::pow((2.0 + in.c) * in.L * in.L / eT, q / (q + 1));
    const auto b = gen_bound_bounded_decreasing(in, ScheduleKind::kDecreasingOverGamma);
    EXPECT_LE(relative_error(b.tight, base * std::max(1.0, second)), 1e-10);
    EXPECT_LE(relative_error(b.short_form, (1 + 1 / q) * base), 1e-12);
    EXPECT_EQ(b.first_branch, second <= 1.0);
    EXPECT_LE(b.tight, b.short_form * (1 + 1e-12));
  }
}

TEST(BoundedDecreasing, FreeOfGamma) {
  BoundInputs a = unit_inputs();
  a.T = 50;
  a.n = 20;
  BoundInputs b = a;
  a.d = 1;
  a.K = 1;
  b.d = 100;
  b.K = 1;
  const auto k = ScheduleKind::kDecreasingOverGamma;
  EXPECT_EQ(gen_bound_bounded_decreasing(a, k).short_form,
            gen_bound_bounded_decreasing(b, k).short_form);
}

TEST(BoundedDecreasing, SgdRowAtZeroC) {
  BoundInputs in = unit_inputs();
  in.C = 0.4;
  in.beta = 2.0;
  in.L = 0.7;
  in.T = 30;
  in.n = 50;
  const double q = in.C * in.beta;
  const double want = (1 + 1 / q) * std::pow(2 * in.C * in.L * in.L, 1 / (q + 1)) *
                      std::pow(kE * in.T, q / (q + 1)) / in.n;
  EXPECT_LE(relative_error(gen_bound_bounded_decreasing(in, ScheduleKind::kDecreasingOverGamma).short_form, want), 1e-13);
}

TEST(DimensionFree, HandExample) {
  BoundInputs in = unit_inputs();
  in.c = 1.0;
  in.T = 10;
  in.n = 100;
  const double v = gen_bound_dimension_free(in, ScheduleKind::kDecreasingPlain);
  EXPECT_NEAR(v, 4.0 * 4.0 * (30.0 * kE / 200.0), 1e-12);
  EXPECT_NEAR(v, 6.5239, 1e-4);
}

TEST(DimensionFree, LinearInTAndFreeOfDK) {
  BoundInputs in = unit_inputs();
  in.n = 100;
  in.T = 7;
  const auto k = ScheduleKind::kDecreasingPlain;
  const double v7 = gen_bound_dimension_free(in, k);
  in.T = 21;
  EXPECT_NEAR(gen_bound_dimension_free(in, k), 3.0 * v7, 1e-12 * v7);
  BoundInputs wide = in;
  wide.d = 1000000;
  EXPECT_EQ(gen_bound_dimension_free(in, k), gen_bound_dimension_free(wide, k));
}

TEST(UnboundedConstant, HandExamples) {
  BoundInputs in = unit_inputs();
  in.n = 100;
  EXPECT_DOUBLE_EQ(gen_bound_unbounded_constant(in, ConstantStepCase::kLogSchedule,
                                                ScheduleKind::kLogConstantNonconvex),
                   0.02);
  const double plain = gen_bound_unbounded_constant(in, ConstantStepCase::kPlainConstant,
                                                    ScheduleKind::kConstantOverTGamma);
  EXPECT_NEAR(plain, 2.0 * (kE - 1.0) / 100.0, 1e-15);
  EXPECT_NEAR(plain, 0.034366, 1e-6);
}

TEST(UnboundedConstant, ProperChoiceOfC) {
  for (double C : {0.1, 1.0, 3.0}) {
    for (double beta : {0.2, 1.0, 4.0}) {
      BoundInputs log_in = unit_inputs();
      log_in.C = C;
      log_in.beta = beta;
      log_in.c = 0.5;
      log_in.n = 40;
      BoundInputs plain_in = log_in;
      plain_in.C = std::log1p(C * beta) / beta;
      const double a = gen_bound_unbounded_constant(log_in, ConstantStepCase::kLogSchedule,
                                                    ScheduleKind::kLogConstantNonconvex);
      const double b = gen_bound_unbounded_constant(plain_in, ConstantStepCase::kPlainConstant,
                                                    ScheduleKind::kConstantOverTGamma);
      EXPECT_LE(relative_error(b, a), 1e-12) << C << " " << beta;
    }
  }
}

TEST(UnboundedDecreasing, HandExample) {
  const double v = gen_bound_unbounded_decreasing(unit_inputs(), ScheduleKind::kDecreasingOverGamma);
  EXPECT_NEAR(v, 2.0 * kE, 1e-14);
  EXPECT_NEAR(v, 5.4366, 1e-4);
}

TEST(UnboundedDecreasing, MinBranchAndMonotone) {
  BoundInputs in = unit_inputs();
  in.C = 0.5;
  in.beta = 0.4;
  in.n = 30;
  double prev = 0.0;
  for (int T = 1; T <= 500; T += 7) {
    in.T = T;
    const double log_eT = 1.0 + std::log(static_cast<double>(T));
    const double branch = log_eT < 1.0 + 1.0 / (in.C * in.beta)
                              ? in.C * log_eT
                              : in.C + 1.0 / in.beta;
    const double want = 2.0 * std::pow(kE * T, in.C * in.beta) * branch / in.n;
    const double v = gen_bound_unbounded_decreasing(in, ScheduleKind::kDecreasingOverGamma);
    EXPECT_LE(relative_error(v, want), 1e-12) << T;
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(GradientDescent, SingleStep) {
  BoundInputs in = unit_inputs();
  in.L = 0.7;
  in.n = 10;
  in.C = 0.2;
  const Schedule s(ScheduleKind::kDecreasingPlain, 0.2, 1, 1.0, 1, std::nullopt);
  EXPECT_NEAR(gd_stability_and_gen_bound(in, s).delta_bound, 2 * 0.7 * 0.2 / 10, 1e-16);
}

TEST(GradientDescent, GenMatchesDecreasingAtSgdLimit) {
  BoundInputs in = unit_inputs();
  in.C = 0.3;
  in.beta = 0.8;
  in.T = 40;
  in.n = 25;
  in.K = std::nullopt;
  const Schedule s(ScheduleKind::kDecreasingPlain, in.C, in.T, in.beta, 1, std::nullopt);
  const GdBound gd = gd_stability_and_gen_bound(in, s);
  ASSERT_TRUE(gd.gen_bound.has_value());
  EXPECT_LE(relative_error(*gd.gen_bound,
                           gen_bound_unbounded_decreasing(in, ScheduleKind::kDecreasingPlain)),
            1e-14);
  const double want = product_oracle(2 * in.L / in.n, (in.n - 1.0) / in.n * in.beta, 0, s.values());
  EXPECT_LE(relative_error(gd.delta_bound, want), 1e-12);
}

TEST(GradientDescent, DeltaVanishesWithN) {
  BoundInputs in = unit_inputs();
  in.T = 10;
  const Schedule s(ScheduleKind::kDecreasingPlain, 0.5, 10, 1.0, 1, std::nullopt);
  double prev = std::numeric_limits<double>::infinity();
  for (long long n : {10LL, 100LL, 10000LL, 1000000LL}) {
    in.n = n;
    const double v = gd_stability_and_gen_bound(in, s).delta_bound;
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(GrowthRecursion, ZeroStaysZero) {
  BoundInputs in = hand_inputs();
  EXPECT_EQ(growth_recursion_step(GrowthCase::kSameRule, 0.0, 0.1, 1.1, in), 0.0);
}

TEST(GrowthRecursion, UnrollReproducesNonconvexBound) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    BoundInputs in;
    in.n = 2 + static_cast<long long>(u(rng) * 50);
    in.T = 1 + static_cast<int>(u(rng) * 49);
    in.d = 1 + static_cast<int>(u(rng) * 10);
    in.K = 1 + static_cast<long long>(u(rng) * 16);
    in.beta = 0.1 + u(rng);
    in.L = 0.1 + u(rng);
    in.mu = 1e-3 * u(rng);
    std::vector<double> alphas(static_cast<std::size_t>(in.T));
    for (double& a : alphas) a = 0.5 * u(rng);
    const double p = 1.0 / static_cast<double>(in.n);
    double delta = 0.0;
    for (double a : alphas) {
      const double eta = 1.0 + in.beta * a;
      delta = (1.0 - p) * growth_recursion_step(GrowthCase::kSameRule, delta, a, eta, in) +
              p * growth_recursion_step(GrowthCase::kDifferRule, delta, a, eta, in);
    }
    EXPECT_LE(relative_error(delta, stability_bound_nonconvex(in, alphas)), 1e-10);
  }
}

TEST(GrowthRecursion, MiniBatchBoundIsFreeOfM) {
  BoundInputs in;
  in.n = 20;
  in.T = 50;
  in.d = 5;
  in.K = 4;
  in.beta = 0.2;
  in.mu = 1e-3;
  const Schedule s(ScheduleKind::kDecreasingOverGamma, 0.5, 50, in.beta, 5, 4);
  in.m = 1;
  const double one = stability_bound_nonconvex(in, s);
  for (int m : {5, 20}) {
    in.m = m;
    EXPECT_EQ(stability_bound_nonconvex(in, s), one);
  }
}

TEST(GrowthRecursion, MiniBatchSteps) {
  BoundInputs in;
  in.n = 10;
  in.d = 1;
  in.K = 2;  // Gamma = 2
  in.beta = 1.0;
  in.L = 1.0;
  in.c = 0.5;
  in.m = 4;
  // same: (1 + 0.1 * 2) * 1 + 0.5 * 0.1 * 2 / 10
  EXPECT_NEAR(growth_recursion_step_minibatch(GrowthCase::kSameRule, 1.0, 0.1, in),
              1.2 + 0.01, 1e-15);
  // differ: (1 + 3/4 * 0.2) * 1 + 2 * 0.1 * 2 / 4 + 0.01
  EXPECT_NEAR(growth_recursion_step_minibatch(GrowthCase::kDifferRule, 1.0, 0.1, in),
              1.15 + 0.1 + 0.01, 1e-15);
}

TEST(ScheduleKindChecks, MismatchIsAPreconditionError) {
  BoundInputs in = unit_inputs();
  in.K = 4;
  EXPECT_THROW(gen_bound_bounded_decreasing(in, ScheduleKind::kConstantPlain), PreconditionError);
  EXPECT_THROW(gen_bound_bounded_decreasing(in, ScheduleKind::kDecreasingPlain), PreconditionError);
  EXPECT_THROW(gen_bound_unbounded_constant(in, ConstantStepCase::kLogSchedule,
                                            ScheduleKind::kConstantPlain),
               PreconditionError);
  in.K = std::nullopt;
  EXPECT_NO_THROW(gen_bound_bounded_decreasing(in, ScheduleKind::kDecreasingPlain));
}

TEST(OptimalT0, WithinRange) {
  BoundInputs in;
  in.n = 100;
  in.T = 1000;
  in.d = 5;
  in.K = 4;
  in.C = 0.5;
  in.beta = 1.0;
  const double t0 = optimal_t0(in);
  EXPECT_GT(t0, 0.0);
  EXPECT_LE(t0, 1000.0);
}

TEST(Table1, RowsCarrySgdLimits) {
  BoundInputs in;
  in.C = 1;
  in.L = 1;
  in.beta = 1;
  in.n = 100;
  in.T = 100;
  in.d = 5;
  in.K = 4;
  in.c = 0.1;
  const auto rows = table1(in);
  EXPECT_EQ(rows.size(), 9u);
  for (const auto& r : rows) {
    EXPECT_GE(r.value, 0.0) << r.name;
    EXPECT_LE(r.sgd_limit, r.value * (1 + 1e-12)) << r.name;
  }
  EXPECT_EQ(to_json(rows.front())["name"], rows.front().name);
}

TEST(BoundInputs, Validation) {
  BoundInputs in;
  in.L = 0.0;
  EXPECT_THROW(in.validate(), InvalidArgument);
  in = BoundInputs{};
  in.t0 = in.T + 1;
  EXPECT_THROW(in.validate(), InvalidArgument);
  in = BoundInputs{};
  in.m = 0;
  EXPECT_THROW(in.validate(), InvalidArgument);
}

}  // namespace
}  // namespace zoss
