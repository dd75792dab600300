// Copyright 2026 The Contention Authors
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

#ifndef CONTENTION_RNG_HPP
#define CONTENTION_RNG_HPP

#include <cstdint>

namespace contention {

/// Counter-based generator built on the SplitMix64 finalizer.
///
/// Every draw is a pure function of (seed, stream, counter): a per-stream
/// seed is derived with one SplitMix64 step, and the counter indexes the
/// resulting SplitMix64 sequence. Simulations give each user its own
/// stream (stream id = user index) and use the slot number as the
/// counter, so slot ranges can be partitioned across workers without
/// changing the sampled values, and seeded runs are bit-reproducible.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
    const std::uint64_t stream_seed = mix(seed_ + (stream + 1) * kGamma);
    return mix(stream_seed + (counter + 1) * kGamma);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t seed_;
};

}  // namespace contention

#endif  // CONTENTION_RNG_HPP
