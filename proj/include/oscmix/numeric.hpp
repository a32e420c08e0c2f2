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
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace oscmix {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Construction-time tolerances. Checked once, never re-checked downstream.
inline constexpr double kHermTol = 1e-10;       // max |M - M^dagger| entry
inline constexpr double kPsdTol = 1e-12;        // eigenvalues >= -kPsdTol
inline constexpr double kTraceTol = 1e-12;      // |trace - 1|
inline constexpr double kNormTol = 1e-12;       // |squared norm - 1|
inline constexpr double kOverlapEps = 1e-8;     // minimum post-selection overlap
inline constexpr double kAmplitudeEps = 1e-10;  // minimum usable amplitude
inline constexpr double kFastFactorDefault = 100.0;

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

namespace detail {

// Deterministic left-to-right tree reduction. Order-stable and more accurate
// than a running sum for the long node lists the quadratures produce.
template <typename T>
T pairwise_sum(std::span<const T> v) {
    if (v.size() <= 8) {
        T acc{};
        for (const T &x : v) acc += x;
        return acc;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T> &v) {
    return pairwise_sum(std::span<const T>(v));
}

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

} // namespace detail

} // namespace oscmix
