// Copyright 2026 The rcraf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RCRAF_RANDOM_HPP_
#define RCRAF_RANDOM_HPP_

// Counter-based random numbers.
//
// Every stochastic quantity in the project is drawn from Philox4x32-10
// (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3", SC 2011).
// A value is a pure function of (seed, stream, index): the seed is the
// 64-bit Philox key, the stream occupies the high half of the 128-bit
// counter and the index the low half. Results therefore do not depend on
// evaluation order or on how work is split between threads.

#include <array>
#include <cstdint>

namespace rcraf {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

// Stream identifiers used across the project. Child streams are derived
// with CounterRng::split.
enum class Stream : std::uint64_t {
  kInit = 1,
  kShuffle = 2,
  kAttack = 3,
  kData = 4,
  kMonteCarlo = 5,
  kSplit = 6,
};

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}
  CounterRng(std::uint64_t seed, Stream stream)
      : CounterRng(seed, static_cast<std::uint64_t>(stream)) {}

  // Raw 128-bit block at `index`.
  PhiloxCounter block(std::uint64_t index) const;
  std::uint64_t bits(std::uint64_t index) const;
  // Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t index) const;
  double uniform(std::uint64_t index, double lo, double hi) const {
    return lo + (hi - lo) * uniform(index);
  }
  // Standard normal (Box-Muller on one block).
  double normal(std::uint64_t index) const;

  // Independent child stream; deterministic in (stream, child).
  CounterRng split(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

// Sequential cursor over a CounterRng, for code that consumes draws one
// after another.
class SequentialRng {
 public:
  explicit SequentialRng(CounterRng rng) : rng_(rng) {}
  SequentialRng(std::uint64_t seed, Stream stream) : rng_(seed, stream) {}

  std::uint64_t next_bits() { return rng_.bits(position_++); }
  double next_uniform() { return rng_.uniform(position_++); }
  double next_normal() { return rng_.normal(position_++); }
  // Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t next_below(std::uint64_t bound);

  std::uint64_t position() const { return position_; }

 private:
  CounterRng rng_;
  std::uint64_t position_ = 0;
};

}  // namespace rcraf

#endif  // RCRAF_RANDOM_HPP_
