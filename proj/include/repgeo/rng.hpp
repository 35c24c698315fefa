// Copyright 2026 The repgeo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Counter-based, splittable random streams built on Philox4x32-10.
//
// A stream is addressed by (master seed, stream id). The master seed is the
// Philox key; the stream id occupies the high half of the 128-bit counter
// and the draw index the low half, so streams never overlap and any worker
// can reconstruct any stream without coordination.

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace repgeo::rng {

enum class Purpose : std::uint8_t {
  generic = 0,
  spec = 1,
  length = 2,
  matrix = 3,
  init = 4,
  tokens = 5,
  layer_mix = 6,
  shuffle = 7,
  subsample = 8,
};

constexpr std::uint64_t stream_id(std::uint64_t index, Purpose tag) noexcept {
  return (index << 8) | static_cast<std::uint64_t>(tag);
}

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

Counter philox4x32_10(Counter counter, Key key) noexcept;

class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t master_seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;
  // 53-bit resolution on [0, 1).
  double uniform01() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }
  // Marsaglia polar transform of paired uniforms; the second deviate of each
  // accepted pair is cached and returned by the next call.
  double normal() noexcept;
  // Unbiased integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) noexcept;

  template <class T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next_u64(); }

 private:
  void refill() noexcept;

  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline Stream seeded_generator(std::uint64_t master_seed, std::uint64_t stream) noexcept {
  return Stream(master_seed, stream);
}

}  // namespace repgeo::rng
