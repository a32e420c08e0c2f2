// Copyright 2026 The oscmix Authors
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

#include <cmath>
#include <cstdint>

#include "oscmix/numeric.hpp"

namespace oscmix {

// splitmix64 (Steele/Lea/Flood splittable-generator finalizer). Chosen over
// std::mt19937 so that streams derived from (seed, index) are well mixed and
// the draw sequence does not depend on the standard library implementation.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1]; safe as a log argument.
    double next_double_open() { return 1.0 - next_double(); }

    bool next_bernoulli(double p) { return next_double() < p; }

    /// Standard normal via Box-Muller (second value cached).
    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = next_double_open();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(kTwoPi * u2);
        have_cached_ = true;
        return r * std::cos(kTwoPi * u2);
    }

    /// Entries of a standard complex Gaussian: Re, Im ~ N(0, 1).
    cplx next_complex_gaussian() { return {next_gaussian(), next_gaussian()}; }

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

/// Counter-based stream splitting: the generator for (seed, index) depends
/// only on those two values, so trials can run in any order, or in parallel,
/// and reproduce identical draws.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer(seed ^ (0xD1342543DE82EF95ULL * (index + 1)));
    std::uint64_t derived = mixer.next_u64();
    derived ^= mixer.next_u64() << 1;
    return SplitMix64(derived);
}

} // namespace oscmix
