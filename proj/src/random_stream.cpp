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

#include "zoss/random_stream.hpp"

#include <random>

namespace zoss {
namespace {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

CounterRng::result_type CounterRng::operator()() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

std::uint64_t derive_key(std::uint64_t key, std::uint64_t value) {
  return mix64(mix64(key + kGolden) ^ value);
}

std::uint64_t stream_key(StreamPurpose purpose, std::uint64_t seed,
                         std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t key = derive_key(static_cast<std::uint64_t>(purpose), seed);
  key = derive_key(key, a);
  key = derive_key(key, b);
  return derive_key(key, c);
}

std::uint64_t PerturbationStream::key(StreamPurpose purpose) const {
  std::uint64_t k = stream_key(purpose, master_seed, replica, step, slot);
  return derive_key(k, direction);
}

Vector sample_gaussian(CounterRng& rng, int d) {
  require(d >= 1, "sample_gaussian: dimension must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(d);
  for (int j = 0; j < d; ++j) u[j] = normal(rng);
  return u;
}

Vector sample_gaussian(const PerturbationStream& stream, int d) {
  require(d >= 1, "sample_gaussian: dimension must be >= 1");
  CounterRng rng(stream.key());
  return sample_gaussian(rng, d);
}

}  // namespace zoss
