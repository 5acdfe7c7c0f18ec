// SPDX-License-Identifier: Apache-2.0
//
// satsched - user scheduling and power allocation for precoded multi-beam
// satellite downlinks
// Copyright (C) 2026 the satsched contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SATSCHED_RNG_HPP
#define SATSCHED_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

namespace satsched {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t &state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

// Deterministic random stream. The engine is std::mt19937_64 (bit-exact by
// the standard); all derived draws use fixed integer/mantissa paths instead
// of std:: distributions, whose output is implementation-defined. Named
// substreams keep user generation, QoS generation and scheduler draws
// independent of each other so that paired experiments share realizations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    Rng(std::uint64_t seed, std::string_view stream_tag)
        : engine_([&] {
              std::uint64_t s = seed ^ detail::fnv1a64(stream_tag);
              detail::splitmix64(s);
              return detail::splitmix64(s);
          }()) {}

    std::uint64_t bits() { return engine_(); }

    // uniform in [0, 1) with 53-bit resolution
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased integer in [0, bound), bound >= 1
    std::uint64_t integer(std::uint64_t bound) {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % bound;
        std::uint64_t v = engine_();
        while (v >= limit)
            v = engine_();
        return v % bound;
    }

    // inclusive range
    int integer_range(int lo, int hi) {
        return lo + static_cast<int>(integer(static_cast<std::uint64_t>(hi - lo) + 1u));
    }

    // first n elements of a partial Fisher-Yates shuffle of pool
    std::vector<int> sample_without_replacement(std::vector<int> pool, std::size_t n) {
        if (n > pool.size())
            n = pool.size();
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t j = i + static_cast<std::size_t>(integer(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(n);
        return pool;
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace satsched

#endif
