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

// Superpositions whose relative phases advance linearly in time, the diagonal
// mixed state they average into when the phases wind through many cycles, and
// the window-averaging quadrature used to show it.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "oscmix/core.hpp"
#include "oscmix/errors.hpp"
#include "oscmix/numeric.hpp"

namespace oscmix {

/// Superposition sum_i A_i exp(i(w_i t + phi_i)) |i> over the computational
/// basis. Amplitudes are non-negative (signs live in the offsets) and their
/// squares sum to 1. Phases more general than linear are reachable through
/// the function-valued time_average below.
class OscillatingPureState {
  public:
    OscillatingPureState(std::vector<double> amplitudes, std::vector<double> frequencies,
                         std::vector<double> phase_offsets)
        : amps_(std::move(amplitudes)), freqs_(std::move(frequencies)),
          offsets_(std::move(phase_offsets)) {
        if (amps_.empty() || amps_.size() != freqs_.size() || amps_.size() != offsets_.size()) {
            throw DimensionMismatch("oscillating state needs equal-length parameter lists");
        }
        double norm2 = 0.0;
        for (double a : amps_) {
            if (!(a >= 0.0)) throw NotNormalized("oscillating-state amplitudes must be >= 0");
            norm2 += a * a;
        }
        if (std::abs(norm2 - 1.0) > kNormTol) {
            throw NotNormalized("oscillating-state amplitudes squared sum to " +
                                std::to_string(norm2));
        }
    }

    std::size_t dim() const { return amps_.size(); }
    const std::vector<double> &amplitudes() const { return amps_; }
    const std::vector<double> &frequencies() const { return freqs_; }
    const std::vector<double> &phase_offsets() const { return offsets_; }

    /// Smallest nonzero |w_i - w_j|; +inf when no two frequencies differ.
    double min_frequency_gap() const {
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < dim(); ++i) {
            for (std::size_t j = i + 1; j < dim(); ++j) {
                const double g = std::abs(freqs_[i] - freqs_[j]);
                if (g > 0.0) gap = std::min(gap, g);
            }
        }
        return gap;
    }

    bool has_degenerate_frequencies() const {
        for (std::size_t i = 0; i + 1 < dim(); ++i)
            for (std::size_t j = i + 1; j < dim(); ++j)
                if (freqs_[i] == freqs_[j]) return true;
        return false;
    }

    /// Same state with all offsets advanced as if time started at tau.
    OscillatingPureState shifted(double tau) const {
        std::vector<double> off = offsets_;
        for (std::size_t i = 0; i < off.size(); ++i) off[i] += freqs_[i] * tau;
        return OscillatingPureState(amps_, freqs_, std::move(off));
    }

  private:
    std::vector<double> amps_;
    std::vector<double> freqs_;
    std::vector<double> offsets_;
};

/// Time interval [start, start + duration) sampled at `nodes` points.
struct AveragingWindow {
    double start = 0.0;
    double duration = 0.0;
    std::size_t nodes = 0;

    AveragingWindow(double start, double duration, std::size_t nodes)
        : start(start), duration(duration), nodes(nodes) {
        if (!(duration > 0.0)) throw Error("averaging window needs positive duration");
        if (nodes < 2) throw Error("averaging window needs at least 2 nodes");
    }
};

/// How fast the state's coherences wind within a window, against a
/// configurable cycle-count threshold. The threshold quantifies "many
/// cycles"; 100 bounds residual coherence near the 1e-2/(2 pi) level.
struct FastnessReport {
    double min_gap = 0.0;          // smallest nonzero frequency gap
    double cycles_in_window = 0.0; // min_gap * duration / (2 pi)
    bool is_fast = false;
};

/// Snapshot at time t.
inline PureState state_at(const OscillatingPureState &s, double t) {
    std::vector<cplx> v(s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) {
        const double phase = s.frequencies()[i] * t + s.phase_offsets()[i];
        v[i] = s.amplitudes()[i] * cplx{std::cos(phase), std::sin(phase)};
    }
    return PureState(std::move(v));
}

/// Rank-1 projector of the snapshot at time t.
inline DensityOperator projector_at(const OscillatingPureState &s, double t) {
    return DensityOperator::from_pure(state_at(s, t));
}

/// Diagonal mixed state with entries A_i^2: the fixed point the projector
/// averages into once every coherence has wound through many cycles.
/// Coherences between equal frequencies would survive averaging, so any
/// exact frequency collision is an error; merge such terms first.
inline DensityOperator dephase(const OscillatingPureState &s) {
    if (s.has_degenerate_frequencies()) {
        throw DegenerateFrequencies("two components share a frequency; their coherence "
                                    "would not average away");
    }
    std::vector<double> probs(s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) probs[i] = s.amplitudes()[i] * s.amplitudes()[i];
    return DensityOperator::from_probabilities(probs);
}

/// Mean of f over the window by the N-node rectangle rule at midpoint nodes.
/// For a smooth periodic f sampled over an integer number of periods this is
/// spectrally accurate. f must be side-effect-free; nodes may in principle be
/// evaluated concurrently.
template <typename F>
cplx time_average(F &&f, const AveragingWindow &window) {
    const double h = window.duration / static_cast<double>(window.nodes);
    std::vector<cplx> samples(window.nodes);
    for (std::size_t j = 0; j < window.nodes; ++j) {
        const double t = window.start + (static_cast<double>(j) + 0.5) * h;
        const cplx val = f(t);
        if (!detail::is_finite(val)) {
            throw NonFiniteSample("integrand not finite at t = " + std::to_string(t));
        }
        samples[j] = val;
    }
    return detail::pairwise_sum(samples) / static_cast<double>(window.nodes);
}

struct TrapezoidEstimate {
    cplx value;
    double error_estimate; // Richardson: |T_N - T_{N/2}| / 3
};

/// Composite trapezoid mean with a Richardson error estimate, for integrands
/// without a known period.
template <typename F>
TrapezoidEstimate trapezoid_average(F &&f, const AveragingWindow &window) {
    const std::size_t n = window.nodes;
    const double h = window.duration / static_cast<double>(n - 1);
    std::vector<cplx> samples(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = window.start + static_cast<double>(j) * h;
        const cplx val = f(t);
        if (!detail::is_finite(val)) {
            throw NonFiniteSample("integrand not finite at t = " + std::to_string(t));
        }
        samples[j] = val;
    }
    auto trapezoid = [&](std::size_t stride) {
        std::vector<cplx> weighted;
        weighted.reserve(n / stride + 1);
        for (std::size_t j = 0; j < n; j += stride) weighted.push_back(samples[j]);
        cplx acc = detail::pairwise_sum(weighted);
        acc -= 0.5 * (weighted.front() + weighted.back());
        return acc / static_cast<double>(weighted.size() - 1);
    };
    const cplx fine = trapezoid(1);
    // The coarse grid reuses every other node; only valid when (n-1) is even,
    // otherwise fall back to a crude half-window comparison.
    cplx coarse;
    if ((n - 1) % 2 == 0) {
        coarse = trapezoid(2);
    } else {
        coarse = trapezoid(1);
    }
    return {fine, std::abs(fine - coarse) / 3.0};
}

/// Exact window mean of exp(i dw t): e^{i dw start} (e^{i dw T} - 1)/(i dw T).
/// Makes diagonal-vs-coherence bookkeeping exact where quadrature would only
/// approximate it.
inline cplx analytic_linear_phase_average(double delta_omega, const AveragingWindow &window) {
    const double x = delta_omega * window.duration;
    cplx core;
    if (std::abs(x) < 1e-4) {
        // series for (e^{ix} - 1)/(ix), stable against cancellation
        const cplx ix{0.0, x};
        core = 1.0 + ix / 2.0 + ix * ix / 6.0 + ix * ix * ix / 24.0;
    } else {
        const cplx eix{std::cos(x), std::sin(x)};
        core = (eix - 1.0) / cplx{0.0, x};
    }
    const double start_phase = delta_omega * window.start;
    return cplx{std::cos(start_phase), std::sin(start_phase)} * core;
}

/// Cycle count of the slowest coherence across the window.
inline FastnessReport fastness(const OscillatingPureState &s, const AveragingWindow &window,
                               double fast_factor = kFastFactorDefault) {
    FastnessReport report;
    report.min_gap = s.min_frequency_gap();
    report.cycles_in_window = report.min_gap * window.duration / kTwoPi;
    report.is_fast = report.cycles_in_window >= fast_factor;
    return report;
}

} // namespace oscmix
