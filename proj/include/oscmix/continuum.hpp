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

// Continuous-spectrum scenario on a finite uniform grid: the fast-winding
// validity condition against experimental x/t resolutions, the tailored
// post-selection B(x) = N C / A(x) that is piecewise constant across the two
// window halves, the windowed +/- observable, and the resulting sign law
// versus the mixed rational law. Also the countable-basis embedding that
// reduces to the two-level closed forms.
//
// Grid convention: points are bin centers with uniform spacing h, states are
// grid-normalized (sum A^2 h = 1). Every reported quantity is a ratio in
// which that convention cancels. Windows snap to bin edges and their
// half-width is an integer number of bins, which keeps the two halves
// exactly balanced.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "oscmix/core.hpp"
#include "oscmix/errors.hpp"
#include "oscmix/numeric.hpp"
#include "oscmix/oscillation.hpp"
#include "oscmix/weak_values.hpp"

namespace oscmix {

/// Sampled non-negative amplitude A(x_k) on a uniform grid of bin centers,
/// with the phase profile -Omega x t + Phi x and the experimental
/// resolutions the fast-winding check compares against.
class ContinuumProfile {
  public:
    ContinuumProfile(double x_first_center, double spacing, std::vector<double> amplitude,
                     double Omega, double Phi, double delta_x, double delta_t)
        : x0_(x_first_center), h_(spacing), amp_(std::move(amplitude)), omega_(Omega),
          phi_(Phi), delta_x_(delta_x), delta_t_(delta_t) {
        if (amp_.size() < 4) throw DimensionMismatch("profile needs at least 4 bins");
        if (!(h_ > 0.0)) throw Error("profile needs positive grid spacing");
        if (!(delta_x_ > 0.0) || !(delta_t_ > 0.0)) {
            throw Error("profile needs positive experimental resolutions");
        }
        double norm2 = 0.0;
        for (double a : amp_) {
            if (!(a >= 0.0)) throw NotNormalized("profile amplitudes must be >= 0");
            norm2 += a * a * h_;
        }
        if (std::abs(norm2 - 1.0) > 1e-10) {
            throw NotNormalized("profile grid norm is " + std::to_string(norm2));
        }
    }

    std::size_t bins() const { return amp_.size(); }
    double spacing() const { return h_; }
    double x_center(std::size_t k) const { return x0_ + static_cast<double>(k) * h_; }
    double left_edge() const { return x0_ - 0.5 * h_; }
    double right_edge() const { return x_center(bins() - 1) + 0.5 * h_; }
    double amplitude(std::size_t k) const { return amp_[k]; }
    const std::vector<double> &amplitudes() const { return amp_; }
    double Omega() const { return omega_; }
    double Phi() const { return phi_; }
    double delta_x() const { return delta_x_; }
    double delta_t() const { return delta_t_; }

  private:
    double x0_;
    double h_;
    std::vector<double> amp_;
    double omega_;
    double phi_;
    double delta_x_;
    double delta_t_;
};

/// Grid-normalized Gaussian amplitude profile.
inline ContinuumProfile make_gaussian_profile(std::size_t bins, double x_min, double x_max,
                                              double center, double width, double Omega,
                                              double Phi, double delta_x, double delta_t) {
    if (bins < 4) throw DimensionMismatch("profile needs at least 4 bins");
    const double h = (x_max - x_min) / static_cast<double>(bins);
    std::vector<double> amp(bins);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        const double x = x_min + (static_cast<double>(k) + 0.5) * h;
        amp[k] = std::exp(-(x - center) * (x - center) / (4.0 * width * width));
        norm2 += amp[k] * amp[k] * h;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double &a : amp) a *= inv;
    return ContinuumProfile(x_min + 0.5 * h, h, std::move(amp), Omega, Phi, delta_x, delta_t);
}

/// Measurement window [a - da, a + da], split at a. Both boundaries and the
/// split must land on bin edges, with at least two bins per half.
class Window {
  public:
    Window(const ContinuumProfile &p, double a, double delta_a) : a_(a), delta_a_(delta_a) {
        const double h = p.spacing();
        const double edge_pos = (a - p.left_edge()) / h;
        const double half_bins = delta_a / h;
        if (std::abs(edge_pos - std::round(edge_pos)) > 1e-9 ||
            std::abs(half_bins - std::round(half_bins)) > 1e-9) {
            throw Error("window must snap to bin edges (split and half-width on the edge "
                        "lattice)");
        }
        split_edge_ = static_cast<std::ptrdiff_t>(std::llround(edge_pos));
        bins_per_half_ = static_cast<std::size_t>(std::llround(half_bins));
        if (bins_per_half_ < 2) throw Error("window needs at least two bins per half");
        if (split_edge_ < static_cast<std::ptrdiff_t>(bins_per_half_) ||
            split_edge_ + static_cast<std::ptrdiff_t>(bins_per_half_) >
                static_cast<std::ptrdiff_t>(p.bins())) {
            throw Error("window extends outside the grid span");
        }
    }

    double center() const { return a_; }
    double half_width() const { return delta_a_; }
    std::size_t bins_per_half() const { return bins_per_half_; }
    /// First bin of the left half.
    std::size_t first_bin() const {
        return static_cast<std::size_t>(split_edge_) - bins_per_half_;
    }
    /// First bin of the right half.
    std::size_t split_bin() const { return static_cast<std::size_t>(split_edge_); }

  private:
    double a_;
    double delta_a_;
    std::ptrdiff_t split_edge_ = 0;
    std::size_t bins_per_half_ = 0;
};

/// Fast-winding check for the continuum phase profile: coherences across one
/// x-resolution cell must wind through `fast_factor` cycles within one
/// t-resolution cell, i.e. |Omega| >= fast_factor * 2 pi / (dx dt).
inline FastnessReport check_fast_condition(const ContinuumProfile &p,
                                           double fast_factor = kFastFactorDefault) {
    FastnessReport report;
    report.min_gap = std::abs(p.Omega()) * p.delta_x();
    report.cycles_in_window = report.min_gap * p.delta_t() / kTwoPi;
    report.is_fast = report.cycles_in_window >= fast_factor;
    return report;
}

/// Detects fixed-time mixing: when the static phase slope Phi winds through
/// many cycles across one x-resolution cell, averaging over x alone already
/// produces the effectively mixed state. Detected and reported, not modeled
/// further.
inline FastnessReport check_position_mixing(const ContinuumProfile &p,
                                            double fast_factor = kFastFactorDefault) {
    FastnessReport report;
    report.min_gap = std::abs(p.Phi());
    report.cycles_in_window = std::abs(p.Phi()) * p.delta_x() / kTwoPi;
    report.is_fast = report.cycles_in_window >= fast_factor;
    return report;
}

/// Post-selection amplitudes on the window: B = N C1 / A on the left half,
/// B = N C2 / A on the right half, grid-normalized over the window.
class TailoredPostselection {
  public:
    friend TailoredPostselection tailored_postselection(const ContinuumProfile &p,
                                                        const Window &w, double C1, double C2);

    const std::vector<double> &samples() const { return b_; }
    double sample(std::size_t window_index) const { return b_[window_index]; }
    double C1() const { return c1_; }
    double C2() const { return c2_; }
    double normalization() const { return n_; }

  private:
    TailoredPostselection(std::vector<double> b, double c1, double c2, double n)
        : b_(std::move(b)), c1_(c1), c2_(c2), n_(n) {}
    std::vector<double> b_; // indexed from w.first_bin()
    double c1_;
    double c2_;
    double n_;
};

inline TailoredPostselection tailored_postselection(const ContinuumProfile &p, const Window &w,
                                                    double C1, double C2) {
    if (!(C1 > 0.0) || !(C2 > 0.0)) throw Error("tailored post-selection needs C1, C2 > 0");
    const std::size_t m = w.bins_per_half();
    const std::size_t first = w.first_bin();
    std::vector<double> b(2 * m);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < 2 * m; ++k) {
        const double a = p.amplitude(first + k);
        if (a <= kAmplitudeEps) {
            throw VanishingAmplitude("amplitude vanishes at x = " +
                                     std::to_string(p.x_center(first + k)) +
                                     "; B = C/A is undefined there");
        }
        const double c = k < m ? C1 : C2;
        b[k] = c / a;
        norm2 += b[k] * b[k] * p.spacing();
    }
    const double n = 1.0 / std::sqrt(norm2);
    for (double &x : b) x *= n;
    return TailoredPostselection(std::move(b), C1, C2, n);
}

namespace detail {

struct WindowSums {
    cplx left;
    cplx right;
    double scale; // sum |A B| h, for relative pole detection
};

/// Midpoint-rule window sums of A(x) B(x) e^{i (Omega t - Phi) x}.
inline WindowSums window_phase_sums(const ContinuumProfile &p, const TailoredPostselection &post,
                                    const Window &w, double t) {
    const double k = p.Omega() * t - p.Phi();
    const std::size_t m = w.bins_per_half();
    const std::size_t first = w.first_bin();
    std::vector<cplx> left(m), right(m);
    double scale = 0.0;
    for (std::size_t j = 0; j < 2 * m; ++j) {
        const double x = p.x_center(first + j);
        const double ab = p.amplitude(first + j) * post.sample(j);
        const cplx term = ab * cplx{std::cos(k * x), std::sin(k * x)} * p.spacing();
        scale += std::abs(ab) * p.spacing();
        (j < m ? left[j] : right[j - m]) = term;
    }
    return {pairwise_sum(left), pairwise_sum(right), scale};
}

} // namespace detail

/// Weak value of the windowed +/- observable at time t, by grid quadrature:
/// (L - R) / (L + R) with L, R the two half-window sums of A B e^{i(...)x}.
inline WeakValue continuum_weak_value(const ContinuumProfile &p,
                                      const TailoredPostselection &post, const Window &w,
                                      double t) {
    const auto sums = detail::window_phase_sums(p, post, w, t);
    const cplx den = sums.left + sums.right;
    if (std::abs(den) <= 1e-12 * sums.scale) {
        throw PoleAtPhase("continuum weak value pole: C1 = C2 and winding phase = pi");
    }
    return (sums.left - sums.right) / den;
}

/// Simplified closed form (1 - r e^{i theta}) / (1 + r e^{i theta}) with
/// r = C2/C1 and theta = Omega da t - Phi da.
inline WeakValue continuum_closed_form(const ContinuumProfile &p, double C1, double C2,
                                       const Window &w, double t) {
    const double theta = p.Omega() * w.half_width() * t - p.Phi() * w.half_width();
    const cplx z = (C2 / C1) * cplx{std::cos(theta), std::sin(theta)};
    const cplx den = 1.0 + z;
    if (std::abs(den) <= 1e-12 * (1.0 + std::abs(z))) {
        throw PoleAtPhase("continuum closed form pole");
    }
    return (1.0 - z) / den;
}

/// Equivalent four-term closed form, kept as an independent algebraic route.
inline WeakValue continuum_four_term_form(const ContinuumProfile &p, double C1, double C2,
                                          const Window &w, double t) {
    const double theta = p.Omega() * w.half_width() * t - p.Phi() * w.half_width();
    const cplx em{std::cos(theta), -std::sin(theta)};
    const cplx ep{std::cos(theta), std::sin(theta)};
    const cplx num = C1 + C2 - C1 * em - C2 * ep;
    const cplx den = C1 - C2 - C1 * em + C2 * ep;
    if (std::abs(den) <= 1e-12 * (C1 + C2)) throw PoleAtPhase("continuum closed form pole");
    return num / den;
}

/// Window mean of the grid weak value over the caller's time window, with
/// the same symmetric pole exclusion as the two-level average when C1 = C2.
inline WeakValue continuum_time_average_quadrature(const ContinuumProfile &p,
                                                   const TailoredPostselection &post,
                                                   const Window &w,
                                                   const AveragingWindow &window) {
    const double rate = p.Omega() * w.half_width();
    const bool near_pole = std::abs(post.C2() / post.C1() - 1.0) <= 1e-9;
    const double exclusion = std::max(1e-3, 2.0 * kTwoPi / static_cast<double>(window.nodes));
    const double h = window.duration / static_cast<double>(window.nodes);

    std::vector<cplx> samples;
    samples.reserve(window.nodes);
    for (std::size_t j = 0; j < window.nodes; ++j) {
        const double t = window.start + (static_cast<double>(j) + 0.5) * h;
        if (near_pole) {
            const double theta = rate * t - p.Phi() * w.half_width();
            const double wrapped = std::fmod(std::fmod(theta, kTwoPi) + kTwoPi, kTwoPi);
            if (std::abs(wrapped - kPi) < exclusion) continue;
        }
        samples.push_back(continuum_weak_value(p, post, w, t));
    }
    if (samples.empty()) throw PoleAtPhase("all quadrature nodes excluded around the pole");
    return detail::pairwise_sum(samples) / static_cast<double>(samples.size());
}

/// Time-averaged continuum weak value: sgn(1 - (C2/C1)^2), 0 when C1 = C2.
/// The quadrature route over exactly one winding period is evaluated
/// alongside and must agree (skipped within |C2/C1 - 1| < 1e-4, where no
/// affordable node count resolves the near-pole peak). Callers should have
/// checked the fast-winding condition; the value is the fast-limit one.
inline WeakValue continuum_averaged_weak_value(const ContinuumProfile &p,
                                               const TailoredPostselection &post, const Window &w,
                                               const AveragingWindow &window) {
    const double r = post.C2() / post.C1();
    const double closed = std::abs(r - 1.0) <= 1e-12 ? 0.0 : sgn(1.0 - r * r);

    const double rate = std::abs(p.Omega()) * w.half_width();
    if (rate > 0.0 && std::abs(r - 1.0) >= 1e-4) {
        const double period = kTwoPi / rate;
        const AveragingWindow one_period(window.start, period,
                                         std::max<std::size_t>(window.nodes, 4096));
        const WeakValue quad = continuum_time_average_quadrature(p, post, w, one_period);
        if (std::abs(quad.real() - closed) > 1e-6 || std::abs(quad.imag()) > 1e-6) {
            throw Error("continuum average: quadrature route disagrees with closed form by " +
                        std::to_string(std::abs(quad - cplx{closed, 0.0})));
        }
    }
    return {closed, 0.0};
}

/// Weak value when the continuum state is fundamentally mixed: the ratio of
/// the half-window sums of A^2 B^2, which evaluates to
/// (1 - (C2/C1)^2) / (1 + (C2/C1)^2) for the tailored post-selection.
inline WeakValue continuum_mixed_weak_value(const ContinuumProfile &p,
                                            const TailoredPostselection &post, const Window &w) {
    const std::size_t m = w.bins_per_half();
    const std::size_t first = w.first_bin();
    std::vector<double> left(m), right(m);
    for (std::size_t j = 0; j < 2 * m; ++j) {
        const double a = p.amplitude(first + j);
        const double term = a * a * post.sample(j) * post.sample(j) * p.spacing();
        (j < m ? left[j] : right[j - m]) = term;
    }
    const double l = detail::pairwise_sum(left);
    const double rr = detail::pairwise_sum(right);
    return {(l - rr) / (l + rr), 0.0};
}

// ---------------------------------------------------------------------------
// Countable-basis embedding
// ---------------------------------------------------------------------------

struct CountableReduction {
    WeakValue averaged{};
    WeakValue mixed{};
    double effective_A = 0.0; // |amp_b| / |amp_a|
};

/// Embeds the two-level experiment in a larger countable basis: the full
/// state oscillates in every component, the observable is |a><a| - |b><b|,
/// and the post-selection is supported on {a, b} alone. Spectator components
/// drop out of both routes, so the results must coincide with the two-level
/// closed forms at A_eff = |amp_b| / |amp_a|. Both routes are computed in
/// the full dimension.
inline CountableReduction countable_reduction(const std::vector<cplx> &amps, std::size_t a_idx,
                                              std::size_t b_idx, double B, double chi) {
    const std::size_t n = amps.size();
    if (n < 3) throw DimensionMismatch("countable embedding needs dimension >= 3");
    if (a_idx >= n || b_idx >= n || a_idx == b_idx) {
        throw DimensionMismatch("countable embedding needs distinct in-range indices");
    }
    if (!(B > 0.0)) throw Error("countable embedding needs B > 0");
    if (std::abs(amps[a_idx]) <= kAmplitudeEps || std::abs(amps[b_idx]) <= kAmplitudeEps) {
        throw VanishingAmplitude("selected components must have nonzero amplitude");
    }

    // Normalize and split into magnitudes and phase offsets.
    double norm2 = 0.0;
    for (cplx a : amps) norm2 += std::norm(a);
    const double inv = 1.0 / std::sqrt(norm2);
    std::vector<double> mags(n), offsets(n), freqs(n);
    for (std::size_t j = 0; j < n; ++j) {
        mags[j] = std::abs(amps[j]) * inv;
        offsets[j] = std::atan2(amps[j].imag(), amps[j].real());
    }
    // Distinct rates; only the a-b gap enters the post-selected ratio,
    // spectators just need pairwise-distinct rates for a valid dephasing.
    freqs[a_idx] = 0.0;
    freqs[b_idx] = 1.0;
    double next = 2.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j != a_idx && j != b_idx) freqs[j] = next++;
    }
    const OscillatingPureState s(mags, freqs, offsets);

    ComplexMatrix obs_m(n);
    obs_m(a_idx, a_idx) = 1.0;
    obs_m(b_idx, b_idx) = -1.0;
    const Observable obs = make_observable(std::move(obs_m));

    std::vector<cplx> post_v(n, cplx{});
    const double n2 = 1.0 / std::sqrt(1.0 + B * B);
    post_v[a_idx] = n2;
    post_v[b_idx] = n2 * B * cplx{std::cos(chi), std::sin(chi)};
    const PureState post(std::move(post_v));

    CountableReduction out;
    out.effective_A = mags[b_idx] / mags[a_idx];

    // Instantaneous ratio is periodic in the a-b phase difference with rate
    // 1; average over exactly one cycle. At A_eff B = 1 the path crosses a
    // genuine pole, so center the window on it: midpoint nodes then straddle
    // the pole symmetrically and the odd part cancels in the mean.
    const std::size_t nodes = 8192;
    const double delta0 = chi - (offsets[b_idx] - offsets[a_idx]);
    if (std::abs(out.effective_A * B - 1.0) <= 1e-9) {
        const double t_pole = delta0 - kPi; // phase difference delta0 - t hits pi here
        out.averaged = averaged_weak_value(
            s, obs, post, AveragingWindow(t_pole - kPi, kTwoPi, nodes));
    } else {
        out.averaged = averaged_weak_value(s, obs, post, AveragingWindow(0.0, kTwoPi, nodes));
    }

    out.mixed = weak_value_mixed(dephase(s), obs, DensityOperator::from_pure(post));
    return out;
}

} // namespace oscmix
