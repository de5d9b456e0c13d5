/*
 * Copyright 2026 The shapkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SHAPKIT_RNG_HPP
#define SHAPKIT_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "shapkit/errors.hpp"

namespace shapkit {

/// One step of the splitmix64 sequence; used to mix seeds into streams.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream. Draw routines are written out by hand
/// (rejection sampling, Fisher-Yates) so that results are identical across
/// standard library implementations.
class rng_stream {
 public:
  explicit rng_stream(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for item `index` under a master seed. Streams for
  /// different indices never depend on how work is split across workers.
  static rng_stream derive(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0xd1342543de82ef95ULL * (index + 1));
    const std::uint64_t mixed = splitmix64_next(s);
    return rng_stream(mixed);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw from [0, bound) without modulo bias.
  std::size_t uniform_index(std::size_t bound) {
    if (bound == 0) throw argument_error("uniform_index needs a positive bound");
    const std::uint64_t b = static_cast<std::uint64_t>(bound);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r < limit) return static_cast<std::size_t>(r % b);
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace shapkit

#endif  // SHAPKIT_RNG_HPP
