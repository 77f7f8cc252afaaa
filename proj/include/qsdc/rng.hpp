// Copyright 2026 The qsdc-ghz Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace qsdc {

// Seeded generator passed explicitly to everything that samples.
//
// The engine is std::mt19937_64 (fully specified by the standard). The
// derived draws below are implemented here rather than through
// std::uniform_*_distribution, whose algorithms are implementation defined,
// so a seed reproduces the same session on any conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    // Rejection sampling on the top of the range avoids modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % bound);
  }

  bool coin() { return (engine_() >> 63) != 0; }

  /// k distinct elements of `pool`, uniformly without replacement, in draw order.
  template <typename T>
  std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t k) {
    if (k > pool.size()) k = pool.size();
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + uniform_index(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Per-trial seed: splitmix64_mix(master + golden * (trial + 1)).
///
/// The golden-ratio increment is odd, so distinct trial indices give distinct
/// pre-images, and the finalizer is a bijection; the map is therefore
/// injective in `trial_index` for a fixed master seed.
constexpr std::uint64_t derive_trial_seed(std::uint64_t master_seed,
                                          std::uint64_t trial_index) {
  return splitmix64_mix(master_seed + 0x9E3779B97F4A7C15ULL * (trial_index + 1));
}

}  // namespace qsdc
