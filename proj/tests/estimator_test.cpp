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

#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "test_support.hpp"
#include "zoss/estimator.hpp"

namespace zoss {
namespace {

using testing::example;
using testing::gaussian;

// Wraps a model and counts evaluate() calls.
struct CountingModel {
  std::shared_ptr<std::atomic<long long>> calls =
      std::make_shared<std::atomic<long long>>(0);
  LossModel model;

  explicit CountingModel(const LossModel& inner)
      : model(inner.name(), inner.dim(),
              [inner, c = calls](const Vector& w, const Example& z) {
                ++*c;
                return inner.evaluate(w, z);
              },
              [inner](const Vector& w, const Example& z) {
                return inner.gradient(w, z);
              },
              inner.constants()) {}
};

Vector direction(const PerturbationStream& s, std::uint64_t slot, int k, int d) {
  return sample_gaussian(s.with_slot(slot).with_direction(k), d);
}

TEST(SmoothedGradient, LinearLossIsExactAverage) {
  const Vector a = (Vector(4) << 1.0, -2.0, 0.5, 3.0).finished();
  const LossModel m = make_linear_loss(a);
  const PerturbationStream s{7, 1, 3};
  const Example z{Vector::Zero(4), 0.0};
  for (double mu : {1e-6, 1e-3, 1.0}) {
    const SmoothedGradientParams p{5, mu};
    Vector want = Vector::Zero(4);
    for (int k = 1; k <= 5; ++k) {
      const Vector u = direction(s, 0, k, 4);
      want += a.dot(u) * u;
    }
    want /= 5.0;
    const Vector got = smoothed_gradient(m, Vector::Zero(4), z, p, s);
    EXPECT_LE((got - want).norm(), 1e-9 * want.norm()) << "mu " << mu;
  }
}

TEST(SmoothedGradient, UsesExactlyKPlusOneEvaluations) {
  CountingModel counted(make_quadratic_loss(3, 1.0));
  std::mt19937_64 rng(3);
  const Example z = example(rng, 3, 1.0);
  for (int K : {1, 4, 9}) {
    counted.calls->store(0);
    smoothed_gradient(counted.model, Vector::Ones(3), z, {K, 1e-3},
                      PerturbationStream{1});
    EXPECT_EQ(counted.calls->load(), K + 1);
  }
  const std::vector<Example> batch = {z, z, example(rng, 3, 1.0)};
  counted.calls->store(0);
  smoothed_gradient_batch(counted.model, Vector::Ones(3), batch, {4, 1e-3},
                          PerturbationStream{1});
  EXPECT_EQ(counted.calls->load(), 3 * 5);
}

TEST(SmoothedGradient, ConvergesToGradientForLargeK) {
  constexpr int d = 5;
  const LossModel m = make_quadratic_loss(d, 1.0);
  std::mt19937_64 rng(5);
  const Example z = example(rng, d, 0.5);
  const Vector w = z.features + 0.3 * gaussian(rng, d).normalized();
  const Vector g = m.gradient(w, z);
  const Vector est =
      smoothed_gradient(m, w, z, {10000, 1e-6}, PerturbationStream{11});
  // sqrt((3d - 1) / K) = 0.037 plus Monte Carlo slack.
  EXPECT_LE((est - g).norm(), 0.05 * g.norm());
}

TEST(SmoothedGradient, BiasAtMinimumScalesWithMu) {
  constexpr int d = 5;
  const LossModel m = make_quadratic_loss(d, 1.0);
  const Example z{Vector::Constant(d, 0.1), 1.0};
  for (int K : {1, 16, 256}) {
    for (double mu : {1e-2, 1e-4}) {
      const Vector est =
          smoothed_gradient(m, z.features, z, {K, mu}, PerturbationStream{2});
      const double cap = mu * m.smoothness_beta() * std::pow(3.0 + d, 1.5) *
                         (1.0 + 4.0 / std::sqrt(K));
      EXPECT_LE(est.norm(), cap) << "K " << K << " mu " << mu;
    }
  }
}

TEST(SmoothedGradientBatch, SingleSlotMatchesSingleQuery) {
  const LossModel m = make_sigmoid_nonconvex_loss(4);
  std::mt19937_64 rng(8);
  const Example z = example(rng, 4, 1.0);
  const Vector w = gaussian(rng, 4);
  const PerturbationStream s{3, 2, 9};
  const std::vector<Example> batch = {z};
  EXPECT_EQ(smoothed_gradient_batch(m, w, batch, {6, 1e-3}, s),
            smoothed_gradient(m, w, z, {6, 1e-3}, s));
}

TEST(SmoothedGradientBatch, SlotsDrawIndependentDirections) {
  const LossModel m = make_logistic_loss(3, 1.0);
  std::mt19937_64 rng(9);
  const Example z = example(rng, 3, 1.0);
  const Vector w = gaussian(rng, 3);
  const PerturbationStream s{3, 2, 9};
  constexpr int m_size = 4;
  constexpr double mu = 1e-3;
  const std::vector<Example> batch(m_size, z);
  Vector want = Vector::Zero(3);
  const double base = m.evaluate(w, z);
  for (int i = 0; i < m_size; ++i) {
    for (int k = 1; k <= 2; ++k) {
      const Vector u = direction(s, static_cast<std::uint64_t>(i), k, 3);
      want += (m.evaluate(w + mu * u, z) - base) / mu * u;
    }
  }
  want /= 2.0 * m_size;
  const Vector got = smoothed_gradient_batch(m, w, batch, {2, mu}, s);
  EXPECT_LE((got - want).norm(), 1e-12 * want.norm());
  EXPECT_NE(got, smoothed_gradient(m, w, z, {2, mu}, s));
}

TEST(SmoothedGradientBatch, LinearLossIsExactDoubleAverage) {
  const Vector a = (Vector(2) << -1.0, 2.0).finished();
  const LossModel m = make_linear_loss(a);
  const PerturbationStream s{4, 0, 1};
  const std::vector<Example> batch(3, Example{Vector::Zero(2), 0.0});
  Vector want = Vector::Zero(2);
  for (int i = 0; i < 3; ++i) {
    for (int k = 1; k <= 4; ++k) {
      const Vector u = direction(s, static_cast<std::uint64_t>(i), k, 2);
      want += a.dot(u) * u;
    }
  }
  want /= 12.0;
  const Vector got = smoothed_gradient_batch(m, Vector::Zero(2), batch, {4, 0.1}, s);
  EXPECT_LE((got - want).norm(), 1e-12 * want.norm());
}

TEST(SmoothedGradient, NonFiniteLossReportsDirection) {
  const LossModel nan_away_from_origin(
      "trap", 2,
      [](const Vector& w, const Example&) {
        return w.norm() > 0.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
      },
      [](const Vector& w, const Example&) { return Vector::Zero(w.size()); },
      LossConstants{1.0, 1.0, true, false});
  const Example z{Vector::Zero(2), 0.0};
  try {
    smoothed_gradient(nan_away_from_origin, Vector::Zero(2), z, {3, 1e-3},
                      PerturbationStream{});
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_EQ(e.direction(), 1);
  }
}

TEST(SmoothedGradient, RejectsBadParameters) {
  const LossModel m = make_quadratic_loss(2, 1.0);
  const Example z{Vector::Zero(2), 0.0};
  EXPECT_THROW(smoothed_gradient(m, Vector::Zero(2), z, {0, 1e-3}, {}),
               InvalidArgument);
  EXPECT_THROW(smoothed_gradient(m, Vector::Zero(2), z, {1, 0.0}, {}),
               InvalidArgument);
  EXPECT_THROW(smoothed_gradient(m, Vector::Zero(3), z, {1, 1e-3}, {}),
               InvalidArgument);
  EXPECT_THROW(smoothed_gradient_batch(m, Vector::Zero(2), {}, {1, 1e-3}, {}),
               InvalidArgument);
}

TEST(VarianceReduction, ZeroVectorIsExactlyZero) {
  const auto r = verify_variance_reduction(3, 4, Vector::Zero(3), 2000, 1);
  EXPECT_EQ(r.lhs_mean, 0.0);
  EXPECT_EQ(r.bound_first, 0.0);
  EXPECT_TRUE(r.pass);
}

// E||(1/K) sum <V,U_k> U_k - V||^2 = (d + 1) ||V||^2 / K follows from
// E[<V,U>^2 ||U||^2] = (d + 2) ||V||^2 and E[<V,U> U] = V.
double second_moment_oracle(int d, int K, double v2) {
  const double single = (d + 2.0) * v2 - v2;
  return single / K;
}

TEST(VarianceReduction, SecondMomentOracle) {
  EXPECT_DOUBLE_EQ(second_moment_oracle(1, 1, 1.0), 2.0);
  const auto r = verify_variance_reduction(1, 1, Vector::Ones(1), 100000, 2);
  EXPECT_DOUBLE_EQ(r.exact_second_moment, 2.0);
  EXPECT_NEAR(r.lhs_second_moment, 2.0, 5.0 * r.second_moment_stderr);
}

TEST(VarianceReduction, FirstMomentBelowBound) {
  std::mt19937_64 rng(21);
  const Vector v = gaussian(rng, 10).normalized();
  const auto r = verify_variance_reduction(10, 4, v, 100000, 3);
  EXPECT_NEAR(r.bound_first, std::sqrt(29.0 / 4.0), 1e-12);
  EXPECT_NEAR(r.bound_first, 2.693, 5e-4);
  EXPECT_LE(r.lhs_mean, r.bound_first);
  EXPECT_TRUE(r.pass);
  EXPECT_DOUBLE_EQ(r.exact_second_moment, second_moment_oracle(10, 4, 1.0));
}

TEST(VarianceReduction, SmallGrid) {
  std::mt19937_64 rng(22);
  for (int d : {1, 5}) {
    for (int K : {1, 16}) {
      const Vector v = gaussian(rng, d).normalized();
      const auto r = verify_variance_reduction(d, K, v, 20000, 4);
      EXPECT_TRUE(r.pass) << "d " << d << " K " << K;
      EXPECT_NEAR(r.exact_second_moment, second_moment_oracle(d, K, 1.0), 1e-12);
    }
  }
}

TEST(ThirdMoment, ClosedFormsForSmallDimensions) {
  const double pi = std::acos(-1.0);
  EXPECT_NEAR(gaussian_norm_third_moment(1), 2.0 * std::sqrt(2.0 / pi), 1e-13);
  EXPECT_NEAR(gaussian_norm_third_moment(1), 1.5958, 1e-4);
  // 2^{3/2} Gamma(3) / Gamma(3/2) = 2^{3/2} * 2 / (sqrt(pi) / 2)
  EXPECT_NEAR(gaussian_norm_third_moment(3),
              std::pow(2.0, 1.5) * 2.0 / (std::sqrt(pi) / 2.0), 1e-12);
  EXPECT_NEAR(gaussian_norm_third_moment(3), 6.383, 1e-3);
  // d = 2: Rayleigh, E R^3 = 3 sqrt(pi / 2).
  EXPECT_NEAR(gaussian_norm_third_moment(2), 3.0 * std::sqrt(pi / 2.0), 1e-12);
}

TEST(ThirdMoment, BoundHoldsUpToDimension200) {
  for (int d = 1; d <= 200; ++d) {
    EXPECT_LE(gaussian_norm_third_moment(d), std::pow(3.0 + d, 1.5)) << d;
  }
}

TEST(ThirdMoment, MonteCarloAgrees) {
  for (int d : {1, 3, 10}) {
    const auto r = verify_third_moment(d, 100000, 5);
    EXPECT_TRUE(r.pass) << d;
    EXPECT_NEAR(r.mc_estimate, r.exact, 5.0 * r.std_error);
  }
}

TEST(VerifierJson, CarriesCommonFields) {
  const auto j = to_json(verify_third_moment(2, 1000, 1));
  for (const char* key : {"lemma", "params", "estimate", "stderr", "bound", "pass"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

}  // namespace
}  // namespace zoss
