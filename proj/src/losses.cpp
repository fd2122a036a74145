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

#include "zoss/losses.hpp"

#include <cmath>
#include <utility>

namespace zoss {
namespace {

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

void check_dim(int dim, std::string_view who) {
  require(dim >= 1, std::string(who) + ": dim must be >= 1");
}

}  // namespace

LossModel::LossModel(std::string name, int dim, EvaluateFn evaluate,
                     GradientFn gradient, LossConstants constants)
    : name_(std::move(name)),
      dim_(dim),
      evaluate_(std::make_shared<const EvaluateFn>(std::move(evaluate))),
      gradient_(std::make_shared<const GradientFn>(std::move(gradient))),
      constants_(constants) {
  require(dim_ >= 1, "LossModel: dim must be >= 1");
  require(constants_.lipschitz >= 0.0 && constants_.smoothness >= 0.0,
          "LossModel: constants must be non-negative");
}

LossModel make_quadratic_loss(int dim, double radius, double scale) {
  check_dim(dim, "make_quadratic_loss");
  require(radius > 0.0, "make_quadratic_loss: radius must be > 0");
  require(scale > 0.0, "make_quadratic_loss: scale must be > 0");
  auto evaluate = [radius, scale](const Vector& w, const Example& z) {
    const double r = (w - z.features).norm();
    if (r <= radius) return 0.5 * scale * r * r;
    return scale * radius * (r - 0.5 * radius);
  };
  auto gradient = [radius, scale](const Vector& w, const Example& z) {
    Vector diff = w - z.features;
    const double r = diff.norm();
    if (r <= radius) return Vector(scale * diff);
    return Vector(scale * radius / r * diff);
  };
  return LossModel("quadratic", dim, evaluate, gradient,
                   {.lipschitz = scale * radius,
                    .smoothness = scale,
                    .convex = true,
                    .bounded01 = false});
}

LossModel make_sigmoid_nonconvex_loss(int dim, double feature_radius) {
  check_dim(dim, "make_sigmoid_nonconvex_loss");
  require(feature_radius > 0.0,
          "make_sigmoid_nonconvex_loss: feature_radius must be > 0");
  auto evaluate = [](const Vector& w, const Example& z) {
    return sigmoid(-z.label * w.dot(z.features));
  };
  auto gradient = [](const Vector& w, const Example& z) {
    const double s = z.label * w.dot(z.features);
    const double p = sigmoid(s);
    return Vector(-p * (1.0 - p) * z.label * z.features);
  };
  const double b = feature_radius;
  return LossModel("sigmoid01", dim, evaluate, gradient,
                   {.lipschitz = b / 4.0,
                    .smoothness = b * b / (6.0 * std::sqrt(3.0)),
                    .convex = false,
                    .bounded01 = true});
}

LossModel make_logistic_loss(int dim, double feature_radius) {
  check_dim(dim, "make_logistic_loss");
  require(feature_radius > 0.0, "make_logistic_loss: feature_radius must be > 0");
  auto evaluate = [](const Vector& w, const Example& z) {
    return softplus(-z.label * w.dot(z.features));
  };
  auto gradient = [](const Vector& w, const Example& z) {
    const double s = z.label * w.dot(z.features);
    return Vector(-z.label * sigmoid(-s) * z.features);
  };
  return LossModel("logistic", dim, evaluate, gradient,
                   {.lipschitz = feature_radius,
                    .smoothness = feature_radius * feature_radius / 4.0,
                    .convex = true,
                    .bounded01 = false});
}

LossModel make_linear_loss(const Vector& a) {
  require(a.size() >= 1, "make_linear_loss: empty coefficient vector");
  auto evaluate = [a](const Vector& w, const Example&) { return a.dot(w); };
  auto gradient = [a](const Vector&, const Example&) { return Vector(a); };
  return LossModel("linear", static_cast<int>(a.size()), evaluate, gradient,
                   {.lipschitz = a.norm(),
                    .smoothness = 0.0,
                    .convex = true,
                    .bounded01 = false});
}

LossModel make_loss(std::string_view name, int dim, double radius) {
  if (name == "quadratic") return make_quadratic_loss(dim, radius);
  if (name == "logistic") return make_logistic_loss(dim, radius);
  if (name == "sigmoid01") return make_sigmoid_nonconvex_loss(dim, radius);
  throw InvalidArgument("unknown loss model '" + std::string(name) + "'");
}

std::vector<std::string> registered_losses() {
  return {"quadratic", "logistic", "sigmoid01"};
}

}  // namespace zoss
