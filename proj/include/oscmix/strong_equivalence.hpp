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

// Window-averaged strong-measurement statistics of an oscillating state, and
// their comparison against the dephased mixed state: expectation values,
// transition probabilities, operator-chain correlators and products of means.
// With linear phases every window average has a closed form, so the averages
// here are exact; quadrature appears only as an independent cross-check in
// the tests.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "oscmix/core.hpp"
#include "oscmix/errors.hpp"
#include "oscmix/numeric.hpp"
#include "oscmix/oscillation.hpp"
#include "oscmix/rng.hpp"

namespace oscmix {

namespace detail {

/// Exact window mean of <psi(t)|X|psi(t)> for linear phases: the diagonal of
/// X weighted by A_i^2 plus each coherence term scaled by the analytic mean
/// of its phase winding.
inline cplx averaged_quadratic_form(const OscillatingPureState &s, const ComplexMatrix &x,
                                    const AveragingWindow &window) {
    if (s.dim() != x.dim()) throw DimensionMismatch("averaged form: dimensions differ");
    std::vector<cplx> terms;
    terms.reserve(s.dim() * s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) {
        for (std::size_t j = 0; j < s.dim(); ++j) {
            const cplx xij = x(i, j);
            if (xij == cplx{}) continue;
            const double dw = s.frequencies()[j] - s.frequencies()[i];
            const double dphi = s.phase_offsets()[j] - s.phase_offsets()[i];
            const cplx phase{std::cos(dphi), std::sin(dphi)};
            terms.push_back(s.amplitudes()[i] * s.amplitudes()[j] * xij * phase *
                            analytic_linear_phase_average(dw, window));
        }
    }
    return pairwise_sum(terms);
}

/// Worst-case magnitude of everything the window average can leave behind:
/// each coherence pair contributes at most A_i A_j |X_ij| min(1, 2/(|dw| T)).
inline double coherence_bound(const OscillatingPureState &s, const ComplexMatrix &x,
                              const AveragingWindow &window) {
    double bound = 0.0;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        for (std::size_t j = 0; j < s.dim(); ++j) {
            if (i == j) continue;
            const double dw = std::abs(s.frequencies()[j] - s.frequencies()[i]);
            const double damping =
                dw > 0.0 ? std::min(1.0, 2.0 / (dw * window.duration)) : 1.0;
            bound += s.amplitudes()[i] * s.amplitudes()[j] * std::abs(x(i, j)) * damping;
        }
    }
    return bound;
}

} // namespace detail

/// Window mean of <psi(t)|O|psi(t)>. Exact for linear phases.
inline double averaged_expectation(const OscillatingPureState &s, const Observable &obs,
                                   const AveragingWindow &window) {
    const cplx val = detail::averaged_quadratic_form(s, obs.matrix(), window);
    if (std::abs(val.imag()) > 1e-10) {
        throw Error("averaged expectation has imaginary residue " + std::to_string(val.imag()));
    }
    return val.real();
}

/// Window mean of |<psi(t)|a>|^2, evaluated as the averaged expectation of
/// the projector onto the target.
inline double averaged_transition(const OscillatingPureState &s, const PureState &target,
                                  const AveragingWindow &window) {
    if (s.dim() != target.dim()) throw DimensionMismatch("averaged transition: dimensions differ");
    const ComplexMatrix projector = outer(target.amplitudes(), target.amplitudes());
    const cplx val = detail::averaged_quadratic_form(s, projector, window);
    return std::min(1.0, std::max(0.0, val.real()));
}

/// Window mean of Tr[projector(t) * product] for a caller-supplied operator
/// chain. The chain is opaque and time-independent; only the projector winds.
inline cplx correlator_C1(const OscillatingPureState &s, const ComplexMatrix &product,
                          const AveragingWindow &window) {
    return detail::averaged_quadratic_form(s, product, window);
}

/// Product over the offsets of the expectation at that offset, each factor
/// averaged independently over its own jitter window. Time enters each
/// factor only as a constant phase shift, so the factors multiply.
inline double product_of_means_C2(const OscillatingPureState &s, const Observable &obs,
                                  const std::vector<double> &offsets,
                                  const AveragingWindow &window) {
    double product = 1.0;
    for (double tau : offsets) {
        product *= averaged_expectation(s.shifted(tau), obs, window);
    }
    return product;
}

enum class EquivalenceQuantity { Expectation, Transition, CorrelatorC1, ProductOfMeansC2 };

inline const char *to_string(EquivalenceQuantity q) {
    switch (q) {
        case EquivalenceQuantity::Expectation: return "expectation";
        case EquivalenceQuantity::Transition: return "transition";
        case EquivalenceQuantity::CorrelatorC1: return "correlator_c1";
        case EquivalenceQuantity::ProductOfMeansC2: return "product_of_means_c2";
    }
    return "?";
}

/// One oscillating-vs-dephased comparison. `bound` is the predicted residual
/// coherence scale; a report passes only when the deviation sits inside the
/// bound AND the window actually winds the coherences through enough cycles
/// for the comparison to certify anything.
struct EquivalenceReport {
    EquivalenceQuantity quantity{};
    cplx oscillating_value{};
    cplx mixed_value{};
    double deviation = 0.0;
    double bound = 0.0;
    bool window_is_fast = false;
    bool pass = false;
};

namespace detail {

inline EquivalenceReport make_report(EquivalenceQuantity q, cplx oscillating, cplx mixed,
                                     double bound, bool fast) {
    EquivalenceReport r;
    r.quantity = q;
    r.oscillating_value = oscillating;
    r.mixed_value = mixed;
    r.deviation = std::abs(oscillating - mixed);
    r.bound = bound;
    r.window_is_fast = fast;
    r.pass = fast && r.deviation <= bound + 1e-12;
    return r;
}

inline ComplexMatrix random_hermitian(SplitMix64 &rng, std::size_t dim) {
    ComplexMatrix g(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) g(i, j) = rng.next_complex_gaussian();
    ComplexMatrix h(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
    return h;
}

inline PureState random_state(SplitMix64 &rng, std::size_t dim) {
    std::vector<cplx> v(dim);
    for (cplx &z : v) z = rng.next_complex_gaussian();
    return PureState::normalized(std::move(v));
}

} // namespace detail

/// Runs `trials` seeded random observables, targets and operator chains
/// through all four quantities. Reports are ordered by trial index, then
/// quantity, and are identical for identical seeds.
inline std::vector<EquivalenceReport> equivalence_suite(const OscillatingPureState &s,
                                                        std::size_t trials,
                                                        const AveragingWindow &window,
                                                        std::uint64_t seed) {
    if (trials < 1) throw InsufficientSamples("equivalence suite needs at least one trial");
    const DensityOperator rho = dephase(s);
    const bool fast = fastness(s, window).is_fast;

    std::vector<EquivalenceReport> reports;
    reports.reserve(trials * 4);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        SplitMix64 rng = substream(seed, trial);

        const Observable obs = make_observable(detail::random_hermitian(rng, s.dim()));
        reports.push_back(detail::make_report(
            EquivalenceQuantity::Expectation, averaged_expectation(s, obs, window),
            expectation(rho, obs), detail::coherence_bound(s, obs.matrix(), window), fast));

        const PureState target = detail::random_state(rng, s.dim());
        reports.push_back(detail::make_report(
            EquivalenceQuantity::Transition, averaged_transition(s, target, window),
            transition_probability(rho, target),
            detail::coherence_bound(s, outer(target.amplitudes(), target.amplitudes()), window),
            fast));

        const ComplexMatrix chain =
            detail::random_hermitian(rng, s.dim()) * detail::random_hermitian(rng, s.dim());
        cplx mixed_c1{};
        for (std::size_t i = 0; i < s.dim(); ++i)
            for (std::size_t j = 0; j < s.dim(); ++j)
                mixed_c1 += rho.matrix()(i, j) * chain(j, i);
        reports.push_back(detail::make_report(EquivalenceQuantity::CorrelatorC1,
                                              correlator_C1(s, chain, window), mixed_c1,
                                              detail::coherence_bound(s, chain, window), fast));

        const std::vector<double> offsets = {0.0, rng.next_double() * window.duration};
        const double factor_mixed = expectation(rho, obs);
        const double factor_bound = detail::coherence_bound(s, obs.matrix(), window);
        double product_bound = 1.0;
        for (std::size_t k = 0; k < offsets.size(); ++k)
            product_bound *= std::abs(factor_mixed) + factor_bound;
        product_bound -= std::pow(std::abs(factor_mixed), offsets.size());
        reports.push_back(detail::make_report(
            EquivalenceQuantity::ProductOfMeansC2,
            product_of_means_C2(s, obs, offsets, window),
            std::pow(factor_mixed, offsets.size()), product_bound, fast));
    }
    return reports;
}

} // namespace oscmix
