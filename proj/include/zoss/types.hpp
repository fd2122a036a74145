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

#ifndef ZOSS_TYPES_HPP_
#define ZOSS_TYPES_HPP_

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace zoss {

using Vector = Eigen::VectorXd;

// Bad argument values (non-positive dimension, empty batch, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A calculator or experiment was asked for a combination it is not defined
// for, e.g. a bound evaluated against the wrong schedule kind.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A loss evaluation returned NaN or infinity. `direction` is 0 for the
// unperturbed evaluation and k (1-based) for the k-th perturbed one.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, int direction)
      : std::runtime_error(what), direction_(direction) {}
  int direction() const { return direction_; }

 private:
  int direction_;
};

// An iterate left the ball of radius 1e12 (or became non-finite) at `step`.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, int step)
      : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace zoss

#endif  // ZOSS_TYPES_HPP_
