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

#include <doctest.h>

#include <cmath>

#include "oscmix/oscillation.hpp"
#include "oscmix/rng.hpp"
#include "oscmix/strong_equivalence.hpp"

using namespace oscmix;

namespace {

OscillatingPureState random_oscillating(SplitMix64 &rng, std::size_t dim, double freq_scale) {
    std::vector<double> amps(dim), freqs(dim), offsets(dim);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        amps[i] = 0.2 + rng.next_double();
        norm2 += amps[i] * amps[i];
        freqs[i] = static_cast<double>(i) * freq_scale + rng.next_double() * freq_scale * 0.5;
        offsets[i] = rng.next_double() * kTwoPi;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double &a : amps) a *= inv;
    return {amps, freqs, offsets};
}

} // namespace

TEST_CASE("averaged_expectation of a diagonal observable is window-independent") {
    const OscillatingPureState s({0.6, 0.8}, {0.0, 5.0}, {0.2, 1.3});
    const Observable obs = make_observable(ComplexMatrix::diagonal({2.0, -1.0}));
    const double expected = 0.36 * 2.0 - 0.64;
    for (double duration : {0.3, 2.0, 100.0}) {
        CHECK(averaged_expectation(s, obs, AveragingWindow(0.0, duration, 2)) ==
              doctest::Approx(expected).epsilon(1e-13));
    }
    CHECK(averaged_expectation(s, make_observable(ComplexMatrix::identity(2)),
                               AveragingWindow(0.0, 1.0, 2)) == doctest::Approx(1.0));
}

TEST_CASE("averaged_expectation matches a quadrature oracle and the dephased value") {
    SplitMix64 rng(314159ULL);
    const OscillatingPureState s = random_oscillating(rng, 4, 1.0);
    const Observable obs = make_observable(detail::random_hermitian(rng, 4));

    // quadrature oracle on a fractional window with a generous node count
    const AveragingWindow window(0.25, 40.0, 1 << 17);
    const double analytic = averaged_expectation(s, obs, window);
    const cplx quad = time_average(
        [&](double t) {
            const PureState psi = state_at(s, t);
            return inner(psi.amplitudes(), obs.matrix() * psi.amplitudes());
        },
        window);
    CHECK(std::abs(quad.real() - analytic) < 1e-6);
    CHECK(std::abs(quad.imag()) < 1e-10);

    // long window: agrees with the dephased state within the coherence bound
    const double min_gap = s.min_frequency_gap();
    const AveragingWindow long_window(0.0, kTwoPi * 1e4 / min_gap, 2);
    const double averaged = averaged_expectation(s, obs, long_window);
    const double mixed = expectation(dephase(s), obs);
    CHECK(std::abs(averaged - mixed) <=
          detail::coherence_bound(s, obs.matrix(), long_window) + 1e-12);
    CHECK(std::abs(averaged - mixed) < 1e-3);
}

TEST_CASE("averaged_transition") {
    const OscillatingPureState s({0.6, 0.8}, {0.0, 3.0}, {0.0, 0.0});
    const AveragingWindow window(0.0, 1e4, 2);

    // basis targets pick out the squared amplitudes exactly
    CHECK(averaged_transition(s, PureState::basis_vector(2, 0), window) ==
          doctest::Approx(0.36).epsilon(1e-13));
    CHECK(averaged_transition(s, PureState::basis_vector(2, 1), window) ==
          doctest::Approx(0.64).epsilon(1e-13));

    // target outside the support never lights up
    const OscillatingPureState s3({0.6, 0.8, 0.0}, {0.0, 3.0, 7.0}, {0.0, 0.0, 0.0});
    CHECK(averaged_transition(s3, PureState::basis_vector(3, 2), AveragingWindow(0.0, 5.0, 2)) ==
          doctest::Approx(0.0));

    // balanced state onto the balanced target: cross term averages out
    const OscillatingPureState balanced({std::sqrt(0.5), std::sqrt(0.5)}, {0.0, 1.0},
                                        {0.0, 0.0});
    const PureState target = PureState::normalized({1.0, 1.0});
    const double p = averaged_transition(balanced, target, AveragingWindow(0.0, kTwoPi * 1e4, 2));
    CHECK(p == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("correlator_C1 reduces to the expectation and tracks the mixed value") {
    SplitMix64 rng(2718ULL);
    const OscillatingPureState s = random_oscillating(rng, 3, 2.0);
    const AveragingWindow window(0.0, kTwoPi * 5e3, 2);

    const ComplexMatrix h = detail::random_hermitian(rng, 3);
    CHECK(std::abs(correlator_C1(s, h, window).real() -
                   averaged_expectation(s, make_observable(h), window)) < 1e-12);
    CHECK(std::abs(correlator_C1(s, ComplexMatrix::identity(3), window) - cplx{1.0, 0.0}) <
          1e-12);

    const ComplexMatrix chain =
        detail::random_hermitian(rng, 3) * detail::random_hermitian(rng, 3);
    const DensityOperator rho = dephase(s);
    cplx mixed{};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) mixed += rho.matrix()(i, j) * chain(j, i);
    const cplx averaged = correlator_C1(s, chain, window);
    CHECK(std::abs(averaged - mixed) <= detail::coherence_bound(s, chain, window) + 1e-12);

    // quadrature oracle for the chain correlator
    const AveragingWindow quad_window(0.0, 30.0, 1 << 16);
    const cplx oracle = time_average(
        [&](double t) {
            const PureState psi = state_at(s, t);
            return inner(psi.amplitudes(), chain * psi.amplitudes());
        },
        quad_window);
    CHECK(std::abs(correlator_C1(s, chain, quad_window) - oracle) < 1e-5);
}

TEST_CASE("product_of_means_C2") {
    SplitMix64 rng(5150ULL);
    const OscillatingPureState s = random_oscillating(rng, 3, 1.0);
    const Observable obs = make_observable(detail::random_hermitian(rng, 3));
    const AveragingWindow window(0.0, kTwoPi * 1e4, 2);

    CHECK(product_of_means_C2(s, obs, {0.0}, window) ==
          doctest::Approx(averaged_expectation(s, obs, window)).epsilon(1e-13));

    // equal offsets: exactly the N-th power of the single factor
    const double factor = averaged_expectation(s.shifted(0.4), obs, window);
    CHECK(product_of_means_C2(s, obs, {0.4, 0.4, 0.4}, window) ==
          doctest::Approx(factor * factor * factor).epsilon(1e-12));

    // zero-mean observable: the product collapses within the squared bound
    const OscillatingPureState balanced({std::sqrt(0.5), std::sqrt(0.5)}, {0.0, 1.0},
                                        {0.0, 0.0});
    const Observable traceless = make_observable(ComplexMatrix{{1.0, 1.0}, {1.0, -1.0}});
    CHECK(expectation(dephase(balanced), traceless) == doctest::Approx(0.0));
    const double bound = detail::coherence_bound(balanced, traceless.matrix(), window);
    CHECK(std::abs(product_of_means_C2(balanced, traceless, {0.0, 0.0}, window)) <=
          bound * bound + 1e-12);
}

TEST_CASE("all quantities are invariant under a global phase shift") {
    SplitMix64 rng(161803ULL);
    const OscillatingPureState s = random_oscillating(rng, 4, 1.5);
    std::vector<double> shifted_offsets = s.phase_offsets();
    for (double &x : shifted_offsets) x += 1.234;
    const OscillatingPureState shifted(s.amplitudes(), s.frequencies(), shifted_offsets);

    const Observable obs = make_observable(detail::random_hermitian(rng, 4));
    const PureState target = detail::random_state(rng, 4);
    const ComplexMatrix chain =
        detail::random_hermitian(rng, 4) * detail::random_hermitian(rng, 4);
    const AveragingWindow window(0.0, 100.0, 2);

    CHECK(std::abs(averaged_expectation(s, obs, window) -
                   averaged_expectation(shifted, obs, window)) < 1e-12);
    CHECK(std::abs(averaged_transition(s, target, window) -
                   averaged_transition(shifted, target, window)) < 1e-12);
    CHECK(std::abs(correlator_C1(s, chain, window) - correlator_C1(shifted, chain, window)) <
          1e-12);
    CHECK(std::abs(product_of_means_C2(s, obs, {0.0, 0.3}, window) -
                   product_of_means_C2(shifted, obs, {0.0, 0.3}, window)) < 1e-12);
}

TEST_CASE("equivalence_suite passes on fast windows and fails on slow ones") {
    SplitMix64 rng(8080ULL);
    const OscillatingPureState s = random_oscillating(rng, 4, 1.0);
    const double min_gap = s.min_frequency_gap();

    const AveragingWindow fast_window(0.0, kTwoPi * 1e4 / min_gap, 2);
    const auto fast_reports = equivalence_suite(s, 5, fast_window, 424242ULL);
    CHECK(fast_reports.size() == 20);
    for (const auto &r : fast_reports) {
        CHECK(r.pass);
        CHECK(r.deviation <= r.bound + 1e-12);
    }

    // deliberate negative control: a tenth of a cycle leaves coherences visible
    const AveragingWindow slow_window(0.0, kTwoPi * 0.1 / min_gap, 2);
    const auto slow_reports = equivalence_suite(s, 5, slow_window, 424242ULL);
    for (const auto &r : slow_reports) CHECK_FALSE(r.pass);

    // reruns with the same seed are identical
    const auto again = equivalence_suite(s, 5, fast_window, 424242ULL);
    for (std::size_t i = 0; i < again.size(); ++i) {
        CHECK(again[i].oscillating_value == fast_reports[i].oscillating_value);
        CHECK(again[i].deviation == fast_reports[i].deviation);
    }
}

TEST_CASE("equivalence_suite on a one-dimensional state has zero deviations") {
    const OscillatingPureState s({1.0}, {0.0}, {0.0});
    const auto reports = equivalence_suite(s, 3, AveragingWindow(0.0, 1.0, 2), 1ULL);
    for (const auto &r : reports) CHECK(r.deviation == 0.0);
}
