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

#ifndef ZOSS_LOSSES_HPP_
#define ZOSS_LOSSES_HPP_

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "zoss/types.hpp"

namespace zoss {

// One observation z = (x, y). Classification models use y in {-1, +1};
// the quadratic model ignores the label.
struct Example {
  Vector features;
  double label = 0.0;

  bool operator==(const Example& other) const {
    return label == other.label && features.size() == other.features.size() &&
           features == other.features;
  }
};

// Analytic certificates attached to a loss. The bound calculators consume
// these directly, so they must hold globally on the declared feature ball.
struct LossConstants {
  double lipschitz = 0.0;   // L
  double smoothness = 0.0;  // beta
  bool convex = false;
  bool bounded01 = false;   // f(w, z) in [0, 1] for every w, z
};

// Immutable per-example loss f(w, z) with its analytic gradient. Copies are
// cheap and share the underlying callables; safe to use from many threads.
class LossModel {
 public:
  using EvaluateFn = std::function<double(const Vector&, const Example&)>;
  using GradientFn = std::function<Vector(const Vector&, const Example&)>;

  LossModel(std::string name, int dim, EvaluateFn evaluate,
            GradientFn gradient, LossConstants constants);

  double evaluate(const Vector& w, const Example& z) const {
    return (*evaluate_)(w, z);
  }
  Vector gradient(const Vector& w, const Example& z) const {
    return (*gradient_)(w, z);
  }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double lipschitz_L() const { return constants_.lipschitz; }
  double smoothness_beta() const { return constants_.smoothness; }
  bool convex() const { return constants_.convex; }
  bool bounded01() const { return constants_.bounded01; }
  const LossConstants& constants() const { return constants_; }

 private:
  std::string name_;
  int dim_;
  std::shared_ptr<const EvaluateFn> evaluate_;
  std::shared_ptr<const GradientFn> gradient_;
  LossConstants constants_;
};

// Huber-type distance loss f(w, z) = h(||w - x||) with
//   h(r) = scale * r^2 / 2                        for r <= radius,
//   h(r) = scale * radius * (r - radius / 2)      for r >  radius.
// Convex with L = scale * radius and beta = scale.
LossModel make_quadratic_loss(int dim, double radius, double scale = 1.0);

// f(w, z) = 1 - sigmoid(y <w, x>) in [0, 1]; nonconvex. For ||x|| <= B:
// L = B / 4, beta = B^2 / (6 sqrt 3) (the maximum of |sigmoid''|).
LossModel make_sigmoid_nonconvex_loss(int dim, double feature_radius = 1.0);

// f(w, z) = log(1 + exp(-y <w, x>)); convex, unbounded.
// L = feature_radius, beta = feature_radius^2 / 4.
LossModel make_logistic_loss(int dim, double feature_radius);

// f(w, z) = <a, w> (ignores z). L = ||a||, beta = 0. Not in the registry;
// used where an exact-gradient loss is wanted.
LossModel make_linear_loss(const Vector& a);

// Registry lookup: "quadratic", "logistic", "sigmoid01". `radius` is the
// feature radius of the data distribution the model will be used with.
LossModel make_loss(std::string_view name, int dim, double radius);
std::vector<std::string> registered_losses();

}  // namespace zoss

#endif  // ZOSS_LOSSES_HPP_
