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

#ifndef ZOSS_DATASET_HPP_
#define ZOSS_DATASET_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "zoss/losses.hpp"

namespace zoss {

// Synthetic distribution: features uniform on the ball of `radius` in R^dim,
// label sign(<teacher, x>) flipped with probability `label_noise`. The
// teacher is the normalized all-ones vector.
struct DatasetSpec {
  std::string distribution = "ball";
  int dim = 5;
  double radius = 1.0;
  double label_noise = 0.1;
  std::uint64_t seed = 42;

  void validate() const;
};

nlohmann::json to_json(const DatasetSpec& spec);

struct Dataset {
  std::string id;
  DatasetSpec spec;
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
  std::span<const Example> view() const { return examples; }
};

// Example number `index` of the stream (purpose, spec.seed, stream_id).
Example draw_example(const DatasetSpec& spec, std::uint64_t purpose_key,
                     std::uint64_t index);

// n i.i.d. examples; example i depends only on (spec, i).
Dataset generate_dataset(const DatasetSpec& spec, long long n);

// `count` fresh examples from the test stream `stream_id`, disjoint from
// every training stream.
std::vector<Example> generate_test_set(const DatasetSpec& spec,
                                       std::uint64_t stream_id,
                                       long long count);

// S and S' = S with example `swap_index` (0-based) replaced by a fresh draw
// from the same distribution.
struct NeighborPair {
  Dataset base;
  Dataset variant;
  int swap_index = 0;
};

NeighborPair make_neighbor(const Dataset& base, int swap_index,
                           std::uint64_t seed);

// Copy of `data` with example `index` replaced.
Dataset with_example(const Dataset& data, int index, Example replacement);

}  // namespace zoss

#endif  // ZOSS_DATASET_HPP_
