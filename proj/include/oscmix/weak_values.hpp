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

// Weak values of pre/post-selected systems: the pure-state ratio, its
// projector (trace) form, mixed pre/post-selections, decomposition-weighted
// mixtures, time averaging of the ratio, and the naive route that averages
// numerator and denominator separately. Includes closed forms for the
// two-level configuration and the verdict logic that tells a quickly
// oscillating source from a fundamentally mixed one.
//
// Convention: the weak value is <pre| O |post> / <pre|post>, with the
// PRE-selected state on the bra side. This is the conjugate of the other
// common choice; only the sign of the imaginary part differs. It is kept
// as is, not "corrected", and the pointer simulation calibrates against it.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "oscmix/core.hpp"
#include "oscmix/errors.hpp"
#include "oscmix/numeric.hpp"
#include "oscmix/oscillation.hpp"
#include "oscmix/strong_equivalence.hpp"

namespace oscmix {

/// Complex weak value. The real part is what a pointer's position reads out,
/// the imaginary part what its momentum reads out.
using WeakValue = cplx;

/// Ratio <pre|O|post> / <pre|post> on raw vectors. Normalization factors of
/// either vector cancel, so the inputs need not be unit vectors; the overlap
/// guard is relative to the input norms.
inline WeakValue weak_value_from_vectors(const std::vector<cplx> &pre, const ComplexMatrix &obs,
                                         const std::vector<cplx> &post) {
    if (pre.size() != obs.dim() || post.size() != obs.dim()) {
        throw DimensionMismatch("weak value: dimensions differ");
    }
    const cplx den = inner(pre, post);
    const double pre_norm = std::sqrt(std::abs(inner(pre, pre).real()));
    const double post_norm = std::sqrt(std::abs(inner(post, post).real()));
    if (std::abs(den) <= kOverlapEps * pre_norm * post_norm) {
        throw OrthogonalPostselection("pre/post overlap " + std::to_string(std::abs(den)) +
                                      " below threshold");
    }
    return inner(pre, obs * post) / den;
}

/// Weak value for pure pre/post-selection.
inline WeakValue weak_value_pure(const PureState &pre, const Observable &obs,
                                 const PureState &post) {
    return weak_value_from_vectors(pre.amplitudes(), obs.matrix(), post.amplitudes());
}

/// Same quantity through the projector form Tr[P1 O P2] / Tr[P1 P2]. Kept as
/// an independent algebraic route; agrees with weak_value_pure to roundoff.
inline WeakValue weak_value_projector_form(const PureState &pre, const Observable &obs,
                                           const PureState &post) {
    if (pre.dim() != obs.dim() || post.dim() != obs.dim()) {
        throw DimensionMismatch("weak value: dimensions differ");
    }
    const ComplexMatrix p1 = outer(pre.amplitudes(), pre.amplitudes());
    const ComplexMatrix p2 = outer(post.amplitudes(), post.amplitudes());
    const ComplexMatrix num_m = p1 * obs.matrix() * p2;
    const ComplexMatrix den_m = p1 * p2;
    const cplx den = den_m.trace();
    if (std::abs(den) <= kOverlapEps * kOverlapEps) {
        throw OrthogonalPostselection("projector overlap below threshold");
    }
    return num_m.trace() / den;
}

/// Weak value with mixed pre- and post-selection: Tr[rho1 O rho2] / Tr[rho1 rho2].
inline WeakValue weak_value_mixed(const DensityOperator &pre, const Observable &obs,
                                  const DensityOperator &post) {
    if (pre.dim() != obs.dim() || post.dim() != obs.dim()) {
        throw DimensionMismatch("weak value: dimensions differ");
    }
    const ComplexMatrix num_m = pre.matrix() * obs.matrix() * post.matrix();
    const ComplexMatrix den_m = pre.matrix() * post.matrix();
    const cplx den = den_m.trace();
    if (den.real() <= kOverlapEps * kOverlapEps) {
        throw OrthogonalPostselection("mixed pre/post overlap " + std::to_string(den.real()) +
                                      " below threshold");
    }
    return num_m.trace() / den;
}

/// Weak value of mixed selections assembled pair by pair: each pure pair
/// (i, j) contributes its own weak value, weighted by how often that pair
/// occurs AND survives post-selection, normalized by the total survival
/// probability. Must reproduce the trace formula of weak_value_mixed.
inline WeakValue weak_value_by_decomposition(const MixtureDecomposition &pre,
                                             const Observable &obs,
                                             const MixtureDecomposition &post) {
    if (pre.dim() != obs.dim() || post.dim() != obs.dim()) {
        throw DimensionMismatch("weak value: dimensions differ");
    }
    cplx weighted_sum{};
    double total_weight = 0.0;
    for (std::size_t i = 0; i < pre.size(); ++i) {
        for (std::size_t j = 0; j < post.size(); ++j) {
            const cplx overlap = inner(pre.component(i).amplitudes(),
                                       post.component(j).amplitudes());
            const double survival = std::norm(overlap);
            const double weight = pre.weight(i) * post.weight(j) * survival;
            total_weight += weight;
            if (survival <= 1e-28) continue; // pair weak value undefined, weight vanishes
            const WeakValue w = weak_value_pure(pre.component(i), obs, post.component(j));
            weighted_sum += weight * w;
        }
    }
    if (total_weight <= kOverlapEps * kOverlapEps) {
        throw OrthogonalPostselection("total post-selection probability " +
                                      std::to_string(total_weight) + " below threshold");
    }
    return weighted_sum / total_weight;
}

/// Window average of the instantaneous weak value of the oscillating state.
/// Every node must keep a usable overlap with the post-selection; a node too
/// close to orthogonality is reported as PoleOnPath instead of being skipped
/// silently (callers may perturb the window, raise the node count, or use a
/// principal-value route where one exists).
inline WeakValue averaged_weak_value(const OscillatingPureState &s, const Observable &obs,
                                     const PureState &post, const AveragingWindow &window) {
    if (s.dim() != obs.dim() || s.dim() != post.dim()) {
        throw DimensionMismatch("averaged weak value: dimensions differ");
    }
    const double h = window.duration / static_cast<double>(window.nodes);
    std::vector<cplx> samples(window.nodes);
    for (std::size_t j = 0; j < window.nodes; ++j) {
        const double t = window.start + (static_cast<double>(j) + 0.5) * h;
        const PureState psi = state_at(s, t);
        const cplx den = inner(psi.amplitudes(), post.amplitudes());
        if (std::abs(den) <= kOverlapEps) {
            throw PoleOnPath("overlap vanishes at quadrature node t = " + std::to_string(t));
        }
        samples[j] = inner(psi.amplitudes(), obs.matrix() * post.amplitudes()) / den;
    }
    return detail::pairwise_sum(samples) / static_cast<double>(window.nodes);
}

/// The "substitute first, average never" route: numerator and denominator of
/// the weak value are window-averaged separately before dividing. Equals the
/// weak value of the dephased mixed state, not the averaged weak value.
inline WeakValue naive_substitution_weak_value(const OscillatingPureState &s,
                                               const Observable &obs, const PureState &post,
                                               const AveragingWindow &window) {
    if (s.dim() != obs.dim() || s.dim() != post.dim()) {
        throw DimensionMismatch("naive substitution: dimensions differ");
    }
    const ComplexMatrix projector = outer(post.amplitudes(), post.amplitudes());
    const cplx num = detail::averaged_quadratic_form(s, obs.matrix() * projector, window);
    const cplx den = detail::averaged_quadratic_form(s, projector, window);
    if (den.real() <= kOverlapEps * kOverlapEps) {
        throw OrthogonalPostselection("averaged overlap below threshold");
    }
    return num / den;
}

// ---------------------------------------------------------------------------
// Two-level closed forms
// ---------------------------------------------------------------------------

/// Two-level configuration: pre-selection (|0> + A e^{i phase(t)} |1>), post-
/// selection (|0> + B |1>) up to normalization, with the relative phase
/// difference advancing as omega * t + phi0. A and B are strictly positive;
/// signs are absorbed into the phases.
struct TwoStateConfig {
    double A = 1.0;
    double B = 1.0;
    double omega = 1.0; // phase-difference rate
    double phi0 = 0.0;  // phase difference at t = 0

    TwoStateConfig(double A, double B, double omega = 1.0, double phi0 = 0.0)
        : A(A), B(B), omega(omega), phi0(phi0) {
        if (!(A > 0.0) || !(B > 0.0)) throw Error("two-state coefficients must be > 0");
    }

    double phase_difference(double t) const { return omega * t + phi0; }
};

/// Oscillating pre-selection of the two-level configuration. The post phase
/// is fixed at zero, so the full phase difference lives in this state.
inline OscillatingPureState two_state_oscillating(const TwoStateConfig &cfg) {
    const double n1 = 1.0 / std::sqrt(1.0 + cfg.A * cfg.A);
    return OscillatingPureState({n1, n1 * cfg.A}, {0.0, -cfg.omega}, {0.0, -cfg.phi0});
}

inline PureState two_state_post(const TwoStateConfig &cfg) {
    const double n2 = 1.0 / std::sqrt(1.0 + cfg.B * cfg.B);
    return PureState({n2, n2 * cfg.B});
}

/// Dephased pre-selection: diag(1, A^2) / (1 + A^2).
inline DensityOperator two_state_pre_mixed(const TwoStateConfig &cfg) {
    const double n = 1.0 / (1.0 + cfg.A * cfg.A);
    return DensityOperator::from_probabilities({n, n * cfg.A * cfg.A});
}

/// Dephased post-selection: diag(1, B^2) / (1 + B^2).
inline DensityOperator two_state_post_mixed(const TwoStateConfig &cfg) {
    const double n = 1.0 / (1.0 + cfg.B * cfg.B);
    return DensityOperator::from_probabilities({n, n * cfg.B * cfg.B});
}

/// Closed-form weak value of the polarization observable at time t:
/// (1 - AB e^{i d}) / (1 + AB e^{i d}) with d = omega t + phi0.
inline WeakValue two_state_weak_value(const TwoStateConfig &cfg, double t) {
    const double d = cfg.phase_difference(t);
    const cplx z = cfg.A * cfg.B * cplx{std::cos(d), std::sin(d)};
    const cplx den = 1.0 + z;
    if (std::abs(den) <= 1e-12 * (1.0 + std::abs(z))) {
        throw PoleAtPhase("two-state weak value pole: AB = 1 and phase difference = pi");
    }
    return (1.0 - z) / den;
}

/// Real part through the explicit rational form; an independent algebraic
/// route used to cross-check the complex ratio.
inline double two_state_real_part(const TwoStateConfig &cfg, double t) {
    const double d = cfg.phase_difference(t);
    const double ab = cfg.A * cfg.B;
    return ((1.0 - ab * ab) / (2.0 * ab)) /
           ((1.0 + ab * ab) / (2.0 * ab) + std::cos(d));
}

inline double two_state_imag_part(const TwoStateConfig &cfg, double t) {
    const double d = cfg.phase_difference(t);
    const double ab = cfg.A * cfg.B;
    return -2.0 * ab * std::sin(d) / (1.0 + ab * ab + 2.0 * ab * std::cos(d));
}

/// One-period quadrature mean of the two-level weak value at midpoint nodes.
/// When AB = 1 the integrand has a genuine pole at phase pi; nodes inside a
/// symmetric neighborhood of the pole are excluded, which realizes the
/// principal-value reading of the average (the real part vanishes there
/// identically, the imaginary part is odd about the pole).
inline WeakValue two_state_averaged_quadrature(const TwoStateConfig &cfg, std::size_t nodes) {
    if (cfg.omega == 0.0) throw Error("two-state average needs a nonzero phase rate");
    const double period = kTwoPi / std::abs(cfg.omega);
    const double h = period / static_cast<double>(nodes);
    const bool near_pole = std::abs(cfg.A * cfg.B - 1.0) <= 1e-9;
    const double exclusion =
        std::max(1e-3, 2.0 * kTwoPi / static_cast<double>(nodes)); // radians around the pole

    std::vector<cplx> samples;
    samples.reserve(nodes);
    std::size_t kept = 0;
    for (std::size_t j = 0; j < nodes; ++j) {
        const double t = (static_cast<double>(j) + 0.5) * h;
        if (near_pole) {
            const double d = std::fmod(std::abs(cfg.phase_difference(t)), kTwoPi);
            if (std::abs(d - kPi) < exclusion) continue;
        }
        samples.push_back(two_state_weak_value(cfg, t));
        ++kept;
    }
    if (kept == 0) throw PoleAtPhase("all quadrature nodes excluded around the pole");
    return detail::pairwise_sum(samples) / static_cast<double>(kept);
}

/// Time-averaged two-level weak value over one oscillation period. The real
/// part collapses onto the sign of (1 - (AB)^2) -- only -1, 0 or +1 can ever
/// be observed -- and the imaginary part averages to zero. The quadrature
/// route is evaluated alongside and must agree with the closed form (skipped
/// within |AB - 1| < 1e-4, where no affordable node count resolves the
/// near-pole peak).
inline WeakValue two_state_averaged(const TwoStateConfig &cfg) {
    const double ab = cfg.A * cfg.B;
    const double closed = std::abs(ab - 1.0) <= 1e-12 ? 0.0 : sgn(1.0 - ab * ab);

    const double pole_distance = std::abs(std::log(ab));
    if (std::abs(ab - 1.0) >= 1e-4) {
        const auto nodes = static_cast<std::size_t>(
            std::clamp(60.0 / std::max(pole_distance, 6e-5), 4096.0, 1048576.0));
        const WeakValue quad = two_state_averaged_quadrature(cfg, nodes);
        if (std::abs(quad.real() - closed) > 1e-6 || std::abs(quad.imag()) > 1e-6) {
            throw Error("two-state average: quadrature route disagrees with closed form by " +
                        std::to_string(std::abs(quad - cplx{closed, 0.0})));
        }
    }
    return {closed, 0.0};
}

/// Weak value when the pre-selection is fundamentally mixed (dephased):
/// (1 - (AB)^2) / (1 + (AB)^2). Unlike the time average, this ranges over
/// all of [-1, 1]. Post-selecting on the dephased state gives the same value.
inline WeakValue two_state_mixed(const TwoStateConfig &cfg) {
    const double ab2 = cfg.A * cfg.A * cfg.B * cfg.B;
    return {(1.0 - ab2) / (1.0 + ab2), 0.0};
}

// ---------------------------------------------------------------------------
// Source discrimination
// ---------------------------------------------------------------------------

struct WeakValueSample {
    double A = 0.0;
    double B = 0.0;
    WeakValue measured{};
};

enum class VerdictKind { OscillatingPure, Mixed, Inconclusive };

inline const char *to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::OscillatingPure: return "oscillating_pure";
        case VerdictKind::Mixed: return "mixed";
        case VerdictKind::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct VerdictRow {
    double A = 0.0;
    double B = 0.0;
    WeakValue measured{};
    double sgn_prediction = 0.0;
    double mixed_prediction = 0.0;
};

struct Verdict {
    VerdictKind kind = VerdictKind::Inconclusive;
    std::vector<VerdictRow> evidence;
    double max_residual_sgn = 0.0;
    double max_residual_mixed = 0.0;
};

/// Decides which model generated the measured time-averaged weak values: the
/// three-valued sign law of an oscillating source, or the continuous rational
/// law of a mixed one. Samples with AB within `pole_margin` of 1 are excluded
/// up front (the two models coincide near 0 there); at least three distinct
/// AB products must remain. The verdict names the model whose worst residual
/// stays inside `verdict_tol`; if both or neither fit, it is Inconclusive.
inline Verdict discriminate(const std::vector<WeakValueSample> &samples,
                            double verdict_tol = 0.05, double pole_margin = 0.05) {
    std::vector<WeakValueSample> usable;
    for (const auto &s : samples) {
        if (std::abs(s.A * s.B - 1.0) > pole_margin) usable.push_back(s);
    }
    std::vector<double> distinct;
    for (const auto &s : usable) {
        const double ab = s.A * s.B;
        bool found = false;
        for (double d : distinct) {
            if (std::abs(d - ab) <= 1e-12) found = true;
        }
        if (!found) distinct.push_back(ab);
    }
    if (distinct.size() < 3) {
        throw InsufficientSamples("need >= 3 samples with distinct AB products away from "
                                  "AB = 1, got " +
                                  std::to_string(distinct.size()));
    }

    Verdict verdict;
    for (const auto &s : usable) {
        const double ab2 = s.A * s.A * s.B * s.B;
        VerdictRow row;
        row.A = s.A;
        row.B = s.B;
        row.measured = s.measured;
        row.sgn_prediction = sgn(1.0 - ab2);
        row.mixed_prediction = (1.0 - ab2) / (1.0 + ab2);
        verdict.max_residual_sgn = std::max(
            verdict.max_residual_sgn, std::abs(s.measured - cplx{row.sgn_prediction, 0.0}));
        verdict.max_residual_mixed = std::max(
            verdict.max_residual_mixed, std::abs(s.measured - cplx{row.mixed_prediction, 0.0}));
        verdict.evidence.push_back(row);
    }

    const bool sgn_fits = verdict.max_residual_sgn <= verdict_tol;
    const bool mixed_fits = verdict.max_residual_mixed <= verdict_tol;
    if (sgn_fits && !mixed_fits) {
        verdict.kind = VerdictKind::OscillatingPure;
    } else if (mixed_fits && !sgn_fits) {
        verdict.kind = VerdictKind::Mixed;
    } else {
        verdict.kind = VerdictKind::Inconclusive;
    }
    return verdict;
}

} // namespace oscmix
