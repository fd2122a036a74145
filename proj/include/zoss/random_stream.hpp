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

#ifndef ZOSS_RANDOM_STREAM_HPP_
#define ZOSS_RANDOM_STREAM_HPP_

#include <cstdint>
#include <limits>

#include "zoss/types.hpp"

namespace zoss {

// Counter-based generator: the whole output sequence is a pure function of
// a 64-bit key. Satisfies UniformRandomBitGenerator so it plugs into the
// <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Mixes `value` into `key`; used to derive independent substream keys.
std::uint64_t derive_key(std::uint64_t key, std::uint64_t value);

// Substream families. Distinct purposes never share keys.
enum class StreamPurpose : std::uint64_t {
  kPerturb = 0x7065727475726231ULL,
  kSelect = 0x73656c6563743031ULL,
  kData = 0x6461746173657431ULL,
  kReplace = 0x7265706c61636531ULL,
  kTest = 0x7465737473657431ULL,
  kProbe = 0x70726f6265733031ULL,
  kMonteCarlo = 0x6d6f6e7465633031ULL,
};

// Coordinates of one Gaussian perturbation vector U^t_{k,i}. The replica id
// is shared between coupled S / S' runs so that both see identical draws.
struct PerturbationStream {
  std::uint64_t master_seed = 0;
  std::uint64_t replica = 0;
  std::uint64_t step = 0;
  std::uint64_t slot = 0;
  std::uint64_t direction = 0;

  PerturbationStream with_slot(std::uint64_t i) const {
    PerturbationStream s = *this;
    s.slot = i;
    return s;
  }
  PerturbationStream with_direction(std::uint64_t k) const {
    PerturbationStream s = *this;
    s.direction = k;
    return s;
  }

  std::uint64_t key(StreamPurpose purpose = StreamPurpose::kPerturb) const;
};

// Key for a stream addressed by (purpose, seed, a, b, c).
std::uint64_t stream_key(StreamPurpose purpose, std::uint64_t seed,
                         std::uint64_t a = 0, std::uint64_t b = 0,
                         std::uint64_t c = 0);

// i.i.d. N(0, 1) coordinates, reproducible per stream coordinates.
Vector sample_gaussian(const PerturbationStream& stream, int d);
Vector sample_gaussian(CounterRng& rng, int d);

}  // namespace zoss

#endif  // ZOSS_RANDOM_STREAM_HPP_
