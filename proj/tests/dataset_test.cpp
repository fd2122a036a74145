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

#include "zoss/dataset.hpp"
#include "zoss/stats.hpp"

namespace zoss {
namespace {

DatasetSpec spec_with(int dim, double radius, std::uint64_t seed = 42) {
  DatasetSpec s;
  s.dim = dim;
  s.radius = radius;
  s.seed = seed;
  return s;
}

TEST(GenerateDataset, Reproducible) {
  const Dataset a = generate_dataset(spec_with(4, 1.0), 50);
  const Dataset b = generate_dataset(spec_with(4, 1.0), 50);
  EXPECT_EQ(a.examples, b.examples);
  EXPECT_EQ(a.id, b.id);
  const Dataset c = generate_dataset(spec_with(4, 1.0, 43), 50);
  EXPECT_NE(a.examples, c.examples);
}

TEST(GenerateDataset, PrefixStable) {
  const Dataset small = generate_dataset(spec_with(3, 1.0), 10);
  const Dataset large = generate_dataset(spec_with(3, 1.0), 30);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(small.examples[i], large.examples[i]);
}

TEST(GenerateDataset, FeaturesInsideBallWithBinaryLabels) {
  const Dataset data = generate_dataset(spec_with(5, 2.5), 5000);
  double largest = 0.0;
  for (const Example& z : data.examples) {
    largest = std::max(largest, z.features.norm());
    EXPECT_TRUE(z.label == 1.0 || z.label == -1.0);
  }
  EXPECT_LE(largest, 2.5);
  EXPECT_GT(largest, 2.4);
}

TEST(GenerateDataset, FeatureMeanNearZero) {
  constexpr int n = 10000;
  constexpr int p = 5;
  const double radius = 1.0;
  const Dataset data = generate_dataset(spec_with(p, radius), n);
  Vector mean = Vector::Zero(p);
  for (const Example& z : data.examples) mean += z.features;
  mean /= n;
  for (int i = 0; i < p; ++i) {
    EXPECT_LE(std::abs(mean(i)), 4.0 * radius / std::sqrt(n * p)) << i;
  }
}

TEST(GenerateDataset, LabelNoiseRate) {
  DatasetSpec s = spec_with(3, 1.0);
  s.label_noise = 0.2;
  const Dataset data = generate_dataset(s, 20000);
  RunningStats flipped;
  for (const Example& z : data.examples) {
    const double clean = z.features.sum() >= 0.0 ? 1.0 : -1.0;
    flipped.add(z.label != clean ? 1.0 : 0.0);
  }
  EXPECT_NEAR(flipped.mean(), 0.2, 4.0 * std::sqrt(0.2 * 0.8 / 20000));
}

TEST(GenerateDataset, RejectsBadSpecs) {
  EXPECT_THROW(generate_dataset(spec_with(3, 1.0), 1), InvalidArgument);
  EXPECT_THROW(generate_dataset(spec_with(0, 1.0), 10), InvalidArgument);
  DatasetSpec s = spec_with(3, 1.0);
  s.distribution = "cube";
  EXPECT_THROW(generate_dataset(s, 10), InvalidArgument);
}

TEST(TestSet, IndependentOfTrainingStream) {
  const DatasetSpec s = spec_with(3, 1.0);
  const Dataset train = generate_dataset(s, 20);
  const auto test = generate_test_set(s, 0, 20);
  EXPECT_NE(train.examples.front(), test.front());
  EXPECT_EQ(test, generate_test_set(s, 0, 20));
  EXPECT_NE(test.front(), generate_test_set(s, 1, 1).front());
}

TEST(MakeNeighbor, DiffersInExactlyOnePosition) {
  const Dataset base = generate_dataset(spec_with(4, 1.0), 20);
  for (int i : {0, 9, 19}) {
    const NeighborPair pair = make_neighbor(base, i, 7);
    int hamming = 0;
    for (std::size_t j = 0; j < base.size(); ++j) {
      hamming += pair.base.examples[j] == pair.variant.examples[j] ? 0 : 1;
    }
    EXPECT_EQ(hamming, 1);
    EXPECT_NE(pair.variant.examples[i], base.examples[i]);
    EXPECT_LE(pair.variant.examples[i].features.norm(), 1.0);
    EXPECT_EQ(pair.swap_index, i);
  }
}

TEST(MakeNeighbor, SwapBackRestoresOriginal) {
  const Dataset base = generate_dataset(spec_with(4, 1.0), 12);
  const NeighborPair pair = make_neighbor(base, 5, 7);
  EXPECT_EQ(make_neighbor(base, 5, 7).variant.examples, pair.variant.examples);
  const Dataset back = with_example(pair.variant, 5, base.examples[5]);
  EXPECT_EQ(back.examples, base.examples);
}

TEST(MakeNeighbor, RejectsOutOfRange) {
  const Dataset base = generate_dataset(spec_with(2, 1.0), 5);
  EXPECT_THROW(make_neighbor(base, 5, 1), InvalidArgument);
  EXPECT_THROW(make_neighbor(base, -1, 1), InvalidArgument);
}

}  // namespace
}  // namespace zoss
