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

#include "zoss/dataset.hpp"

#include <cmath>
#include <random>
#include <string>

#include "zoss/random_stream.hpp"

namespace zoss {

void DatasetSpec::validate() const {
  require(distribution == "ball",
          "DatasetSpec: unknown distribution '" + distribution + "'");
  require(dim >= 1, "DatasetSpec: dim must be >= 1");
  require(radius > 0.0, "DatasetSpec: radius must be > 0");
  require(label_noise >= 0.0 && label_noise <= 0.5,
          "DatasetSpec: label_noise must be in [0, 0.5]");
}

nlohmann::json to_json(const DatasetSpec& spec) {
  return {{"distribution", spec.distribution},
          {"dim", spec.dim},
          {"radius", spec.radius},
          {"label_noise", spec.label_noise},
          {"seed", spec.seed}};
}

Example draw_example(const DatasetSpec& spec, std::uint64_t purpose_key,
                     std::uint64_t index) {
  CounterRng rng(derive_key(purpose_key, index));
  Vector direction = sample_gaussian(rng, spec.dim);
  double norm = direction.norm();
  while (norm == 0.0) {
    direction = sample_gaussian(rng, spec.dim);
    norm = direction.norm();
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Uniform on the ball: radius * u^{1/dim}; never exceeds `radius`.
  const double r = spec.radius * std::pow(unit(rng), 1.0 / spec.dim);
  Example z;
  z.features = (r / norm) * direction;
  const double margin = z.features.sum();
  double label = margin >= 0.0 ? 1.0 : -1.0;
  if (unit(rng) < spec.label_noise) label = -label;
  z.label = label;
  return z;
}

Dataset generate_dataset(const DatasetSpec& spec, long long n) {
  spec.validate();
  require(n >= 2, "generate_dataset: n must be >= 2");
  Dataset data;
  data.spec = spec;
  data.id = spec.distribution + "-d" + std::to_string(spec.dim) + "-n" +
            std::to_string(n) + "-s" + std::to_string(spec.seed);
  const std::uint64_t key = stream_key(StreamPurpose::kData, spec.seed);
  data.examples.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    data.examples.push_back(
        draw_example(spec, key, static_cast<std::uint64_t>(i)));
  }
  return data;
}

std::vector<Example> generate_test_set(const DatasetSpec& spec,
                                       std::uint64_t stream_id,
                                       long long count) {
  spec.validate();
  require(count >= 1, "generate_test_set: count must be >= 1");
  const std::uint64_t key =
      stream_key(StreamPurpose::kTest, spec.seed, stream_id);
  std::vector<Example> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    out.push_back(draw_example(spec, key, static_cast<std::uint64_t>(i)));
  }
  return out;
}

Dataset with_example(const Dataset& data, int index, Example replacement) {
  require(index >= 0 && static_cast<std::size_t>(index) < data.size(),
          "with_example: index out of range");
  Dataset out = data;
  out.examples[static_cast<std::size_t>(index)] = std::move(replacement);
  return out;
}

NeighborPair make_neighbor(const Dataset& base, int swap_index,
                           std::uint64_t seed) {
  require(swap_index >= 0 && static_cast<std::size_t>(swap_index) < base.size(),
          "make_neighbor: swap index out of range");
  const std::uint64_t key = stream_key(StreamPurpose::kReplace, seed,
                                       base.spec.seed,
                                       static_cast<std::uint64_t>(swap_index));
  NeighborPair pair;
  pair.base = base;
  pair.variant = with_example(base, swap_index, draw_example(base.spec, key, 0));
  pair.variant.id = base.id + "-swap" + std::to_string(swap_index);
  pair.swap_index = swap_index;
  return pair;
}

}  // namespace zoss
