// Copyright 2026 The HDPMF Authors
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

#ifndef HDPMF_RANDOM_H_
#define HDPMF_RANDOM_H_

#include <cstdint>
#include <limits>

namespace hdpmf {

// Every random draw in the library comes from a stream identified by the
// master seed, a purpose tag and up to two entity indices. Streams never share
// state, so the order in which entities are visited (or the thread that visits
// them) cannot change any value.
enum class StreamPurpose : std::uint64_t {
  kInit = 1,
  kUserWeights = 2,
  kItemWeights = 3,
  kNoiseExponential = 4,
  kNoiseGaussian = 5,
  kSplit = 6,
  kFolds = 7,
  kSubsample = 8,
  kSampleMechanism = 9,
  kLaplace = 10,
  kSynthetic = 11,
};

// SplitMix64 in counter mode over a mixed key. Satisfies
// UniformRandomBitGenerator, so it plugs into <random> distributions.
class KeyedStream {
 public:
  using result_type = std::uint64_t;

  KeyedStream(std::uint64_t master_seed, StreamPurpose purpose,
              std::uint64_t a = 0, std::uint64_t b = 0)
      : state_(Mix(Mix(Mix(master_seed ^ 0x6a09e667f3bcc908ULL) ^
                           static_cast<std::uint64_t>(purpose)) ^
                       (a * 0x9e3779b97f4a7c15ULL)) ^
               (b * 0xc2b2ae3d27d4eb4fULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return Mix(state_);
  }

 private:
  static std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace hdpmf

#endif  // HDPMF_RANDOM_H_
