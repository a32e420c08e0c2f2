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

// Simulation of the measurement process itself: a Gaussian pointer coupled
// to the system through exp(-i g O x p), post-selection, position/momentum
// readout, and Monte Carlo over uniformly jittered measurement times with
// two aggregation rules (pooled over all survivors versus per-time-bin).
//
// The coupling is exact: the observable is diagonalized and each eigenbranch
// translates the pointer by g * eigenvalue through a spectral (momentum-
// space) shift on the grid. The momentum-readout constant is not assumed:
// it is re-derived on an exactly solvable case whose weak value is -i and
// checked against the 2 sigma^2 form before any estimate is produced.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "oscmix/complex_matrix.hpp"
#include "oscmix/core.hpp"
#include "oscmix/errors.hpp"
#include "oscmix/numeric.hpp"
#include "oscmix/oscillation.hpp"
#include "oscmix/rng.hpp"
#include "oscmix/weak_values.hpp"

namespace oscmix {

/// Uniform pointer-position grid of M cells over [-L/2, L/2] with an initial
/// Gaussian of position spread sigma, and the coupling strength g. L >= 10
/// sigma keeps periodic wrap-around of the packet below 1e-10.
struct PointerModel {
    std::size_t M = 0;
    double L = 0.0;
    double sigma = 0.0;
    double g = 0.0;

    PointerModel(std::size_t M, double L, double sigma, double g)
        : M(M), L(L), sigma(sigma), g(g) {
        if (M < 128) throw Error("pointer grid needs at least 128 cells");
        if (!(sigma > 0.0)) throw Error("pointer needs positive width");
        if (!(L >= 10.0 * sigma)) throw Error("pointer span must be at least 10 sigma");
    }

    double spacing() const { return L / static_cast<double>(M); }
    double position(std::size_t m) const {
        return -0.5 * L + (static_cast<double>(m) + 0.5) * spacing();
    }
    double momentum(std::size_t n) const {
        return kTwoPi * (static_cast<double>(n) - 0.5 * static_cast<double>(M)) / L;
    }
};

namespace detail {

/// Grid-renormalized Gaussian, <x^2> = sigma^2.
inline std::vector<cplx> initial_packet(const PointerModel &pm) {
    std::vector<cplx> phi(pm.M);
    double norm2 = 0.0;
    for (std::size_t m = 0; m < pm.M; ++m) {
        const double x = pm.position(m);
        phi[m] = std::exp(-x * x / (4.0 * pm.sigma * pm.sigma));
        norm2 += std::norm(phi[m]) * pm.spacing();
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (cplx &z : phi) z *= inv;
    return phi;
}

/// Position -> momentum representation (unitary on the grid; plain O(M^2)
/// transform, fast enough at these sizes).
inline std::vector<cplx> to_momentum(const PointerModel &pm, const std::vector<cplx> &phi) {
    const double scale = pm.spacing() / std::sqrt(kTwoPi);
    std::vector<cplx> out(pm.M);
    for (std::size_t n = 0; n < pm.M; ++n) {
        const double p = pm.momentum(n);
        cplx acc{};
        for (std::size_t m = 0; m < pm.M; ++m) {
            const double arg = -p * pm.position(m);
            acc += phi[m] * cplx{std::cos(arg), std::sin(arg)};
        }
        out[n] = scale * acc;
    }
    return out;
}

inline std::vector<cplx> to_position(const PointerModel &pm, const std::vector<cplx> &phi_p) {
    const double dp = kTwoPi / pm.L;
    const double scale = dp / std::sqrt(kTwoPi);
    std::vector<cplx> out(pm.M);
    for (std::size_t m = 0; m < pm.M; ++m) {
        const double x = pm.position(m);
        cplx acc{};
        for (std::size_t n = 0; n < pm.M; ++n) {
            const double arg = pm.momentum(n) * x;
            acc += phi_p[n] * cplx{std::cos(arg), std::sin(arg)};
        }
        out[m] = scale * acc;
    }
    return out;
}

/// Exact periodic translation by d through a momentum-space phase.
inline std::vector<cplx> translate(const PointerModel &pm, const std::vector<cplx> &phi,
                                   double d) {
    std::vector<cplx> phi_p = to_momentum(pm, phi);
    for (std::size_t n = 0; n < pm.M; ++n) {
        const double arg = -pm.momentum(n) * d;
        phi_p[n] *= cplx{std::cos(arg), std::sin(arg)};
    }
    return to_position(pm, phi_p);
}

} // namespace detail

/// Entangled system-pointer state; row s holds the pointer amplitudes that
/// accompany the system basis vector |s>.
class JointState {
  public:
    JointState(std::size_t system_dim, const PointerModel &pm,
               std::vector<std::vector<cplx>> rows)
        : dim_(system_dim), spacing_(pm.spacing()), rows_(std::move(rows)) {
        double norm2 = 0.0;
        for (const auto &row : rows_) {
            for (cplx z : row) norm2 += std::norm(z) * spacing_;
        }
        if (std::abs(norm2 - 1.0) > 1e-10) {
            throw NotNormalized("joint state grid norm is " + std::to_string(norm2));
        }
    }

    std::size_t system_dim() const { return dim_; }
    const std::vector<cplx> &row(std::size_t s) const { return rows_[s]; }
    double spacing() const { return spacing_; }

  private:
    std::size_t dim_;
    double spacing_;
    std::vector<std::vector<cplx>> rows_;
};

/// Applies exp(-i g O x p): each eigenbranch of the observable carries the
/// pointer packet translated by g * eigenvalue. A shift beyond L/4 would
/// wrap the packet around the periodic grid, so it is refused.
inline JointState weak_couple(const PureState &system, const Observable &obs,
                              const PointerModel &pm) {
    if (system.dim() != obs.dim()) throw DimensionMismatch("weak coupling: dimensions differ");
    const EigenSystem eig = hermitian_eigen(obs.matrix());
    for (double lambda : eig.values) {
        if (std::abs(pm.g * lambda) > pm.L / 4.0) {
            throw GridOverflow("shift " + std::to_string(pm.g * lambda) +
                               " exceeds a quarter of the pointer span");
        }
    }
    const std::vector<cplx> base = detail::initial_packet(pm);
    std::vector<std::vector<cplx>> rows(system.dim(), std::vector<cplx>(pm.M, cplx{}));
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
        const std::vector<cplx> &v = eig.vectors[k];
        const cplx coeff = inner(v, system.amplitudes()); // <v|psi>
        if (std::abs(coeff) == 0.0) continue;
        const std::vector<cplx> shifted = detail::translate(pm, base, pm.g * eig.values[k]);
        for (std::size_t s = 0; s < system.dim(); ++s) {
            const cplx weight = v[s] * coeff;
            for (std::size_t m = 0; m < pm.M; ++m) rows[s][m] += weight * shifted[m];
        }
    }
    return JointState(system.dim(), pm, std::move(rows));
}

struct PostselectResult {
    std::vector<cplx> pointer; // renormalized on the grid
    double probability = 0.0;
};

/// Contracts the system index against the post-selected state. The captured
/// probability is the surviving norm; the returned pointer state is
/// renormalized.
inline PostselectResult postselect(const JointState &joint, const PureState &post) {
    if (joint.system_dim() != post.dim()) {
        throw DimensionMismatch("post-selection: dimensions differ");
    }
    const std::size_t m_cells = joint.row(0).size();
    std::vector<cplx> reduced(m_cells, cplx{});
    for (std::size_t s = 0; s < joint.system_dim(); ++s) {
        const cplx w = std::conj(post[s]);
        for (std::size_t m = 0; m < m_cells; ++m) reduced[m] += w * joint.row(s)[m];
    }
    double norm2 = 0.0;
    for (cplx z : reduced) norm2 += std::norm(z) * joint.spacing();
    if (norm2 <= 1e-300) throw NoSurvivors("post-selection probability vanishes");
    const double inv = 1.0 / std::sqrt(norm2);
    for (cplx &z : reduced) z *= inv;
    return {std::move(reduced), norm2};
}

struct Readout {
    double mean_position = 0.0;
    double mean_momentum = 0.0;
};

/// Grid means of position and (through the discrete Fourier transform with
/// periodic convention) momentum.
inline Readout readout(const PointerModel &pm, const std::vector<cplx> &pointer) {
    if (pointer.size() != pm.M) throw DimensionMismatch("readout: grid size differs");
    double wx = 0.0, nx = 0.0;
    for (std::size_t m = 0; m < pm.M; ++m) {
        const double d = std::norm(pointer[m]);
        wx += pm.position(m) * d;
        nx += d;
    }
    const std::vector<cplx> phi_p = detail::to_momentum(pm, pointer);
    double wp = 0.0, np = 0.0;
    for (std::size_t n = 0; n < pm.M; ++n) {
        const double d = std::norm(phi_p[n]);
        wp += pm.momentum(n) * d;
        np += d;
    }
    return {wx / nx, wp / np};
}

/// Re-derives the conversion from mean pointer momentum to the imaginary
/// part of the weak value on a configuration whose weak value is exactly -i,
/// and checks it against the 2 sigma^2 form. Returns the signed constant c
/// such that Im = mean_momentum * c / g.
inline double calibrate_momentum_constant(const PointerModel &pm) {
    const double g_cal = pm.sigma / 256.0;
    const PointerModel cal(pm.M, pm.L, pm.sigma, g_cal);
    const PureState pre({cplx{1.0, 0.0} / std::sqrt(2.0), cplx{0.0, -1.0} / std::sqrt(2.0)});
    const PureState post({cplx{1.0, 0.0} / std::sqrt(2.0), cplx{1.0, 0.0} / std::sqrt(2.0)});
    const Observable obs = pauli_z();
    // weak value of this configuration: (1 - i)/(1 + i) = -i
    const PostselectResult sel = postselect(weak_couple(pre, obs, cal), post);
    const Readout r = readout(cal, sel.pointer);
    if (r.mean_momentum == 0.0) throw Error("momentum calibration produced no shift");
    const double c = -1.0 * g_cal / r.mean_momentum;
    const double expected = 2.0 * pm.sigma * pm.sigma;
    if (std::abs(std::abs(c) - expected) > 0.01 * expected) {
        throw Error("momentum constant " + std::to_string(c) +
                    " deviates from the 2 sigma^2 form");
    }
    return c;
}

/// Weak value estimated from the pointer: couple, post-select, read out,
/// convert. Converges to weak_value_pure as g -> 0; keep g * |eigenvalue|
/// below sigma/10 for a faithful estimate.
inline WeakValue estimate_weak_value(const PureState &pre, const Observable &obs,
                                     const PureState &post, const PointerModel &pm) {
    if (std::abs(inner(pre.amplitudes(), post.amplitudes())) <= kOverlapEps) {
        throw OrthogonalPostselection("pre/post overlap below threshold");
    }
    const double c_im = calibrate_momentum_constant(pm);
    const PostselectResult sel = postselect(weak_couple(pre, obs, pm), post);
    const Readout r = readout(pm, sel.pointer);
    return {r.mean_position / pm.g, r.mean_momentum * c_im / pm.g};
}

enum class Estimator { Pooled, TimeBinned };

inline const char *to_string(Estimator e) {
    return e == Estimator::Pooled ? "pooled" : "time_binned";
}

/// Monte Carlo weak-value estimate. The two aggregation rules converge to
/// different quantities: Pooled reproduces the separately-averaged ratio
/// (the mixed-state value), TimeBinned the time-averaged weak value.
struct McEstimate {
    WeakValue value{};
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    std::size_t trials = 0;
    std::size_t survivors = 0;
    Estimator estimator = Estimator::Pooled;
};

/// Runs `trials` measurements at uniformly drawn times in the window. Each
/// trial evaluates the exact post-selected pointer distribution at its time,
/// draws survival as a Bernoulli with the post-selection probability, and on
/// survival draws one position and one momentum reading from the exact
/// marginals. Per-trial randomness comes from a counter-based substream of
/// (seed, trial index), so results do not depend on evaluation order.
/// `bins` applies to TimeBinned only; 0 picks 64 bins per winding cycle.
inline McEstimate monte_carlo(const OscillatingPureState &s, const Observable &obs,
                              const PureState &post, const PointerModel &pm,
                              const AveragingWindow &window, std::size_t trials,
                              std::uint64_t seed, Estimator estimator, std::size_t bins = 0) {
    if (trials < 1) throw InsufficientSamples("monte carlo needs at least one trial");
    if (s.dim() != obs.dim() || s.dim() != post.dim()) {
        throw DimensionMismatch("monte carlo: dimensions differ");
    }

    const double min_gap = s.min_frequency_gap();
    const double cycles = std::isfinite(min_gap) ? min_gap * window.duration / kTwoPi : 0.0;
    std::size_t n_bins = 1;
    if (estimator == Estimator::TimeBinned) {
        n_bins = bins != 0 ? bins
                           : 64 * static_cast<std::size_t>(std::max(1.0, std::ceil(cycles)));
        // bins must resolve the winding period
        if (std::isfinite(min_gap) && min_gap > 0.0) {
            const double period = kTwoPi / min_gap;
            if (window.duration / static_cast<double>(n_bins) > period / 16.0) {
                throw BinTooCoarse("bin width exceeds one sixteenth of the winding period");
            }
        }
    }

    // Per-eigenvector shifted packets in both representations, plus overlap
    // matrix for the cheap survival probability.
    const EigenSystem eig = hermitian_eigen(obs.matrix());
    const std::size_t d = s.dim();
    for (double lambda : eig.values) {
        if (std::abs(pm.g * lambda) > pm.L / 4.0) {
            throw GridOverflow("shift exceeds a quarter of the pointer span");
        }
    }
    const std::vector<cplx> base = detail::initial_packet(pm);
    const std::vector<cplx> base_p = detail::to_momentum(pm, base);
    std::vector<std::vector<cplx>> pos_pack(d), mom_pack(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double shift = pm.g * eig.values[k];
        mom_pack[k].resize(pm.M);
        for (std::size_t n = 0; n < pm.M; ++n) {
            const double arg = -pm.momentum(n) * shift;
            mom_pack[k][n] = base_p[n] * cplx{std::cos(arg), std::sin(arg)};
        }
        pos_pack[k] = detail::to_position(pm, mom_pack[k]);
    }
    std::vector<cplx> overlaps(d * d);
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t l = 0; l < d; ++l) {
            cplx acc{};
            for (std::size_t m = 0; m < pm.M; ++m)
                acc += std::conj(pos_pack[k][m]) * pos_pack[l][m];
            overlaps[k * d + l] = acc * pm.spacing();
        }
    }
    std::vector<cplx> post_proj(d); // <post|v_k>
    for (std::size_t k = 0; k < d; ++k) {
        post_proj[k] = std::conj(inner(eig.vectors[k], post.amplitudes()));
    }

    const double c_im = calibrate_momentum_constant(pm);

    struct TrialRecord {
        double x = 0.0;
        double p = 0.0;
        std::size_t bin = 0;
        bool survived = false;
    };
    std::vector<TrialRecord> records(trials);

    std::vector<cplx> alpha(d);
    std::vector<double> density(pm.M);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        SplitMix64 rng = substream(seed, trial);
        const double t = window.start + rng.next_double() * window.duration;
        const PureState psi = state_at(s, t);
        for (std::size_t k = 0; k < d; ++k) {
            alpha[k] = post_proj[k] * inner(eig.vectors[k], psi.amplitudes());
        }
        cplx surv{};
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t l = 0; l < d; ++l)
                surv += std::conj(alpha[k]) * overlaps[k * d + l] * alpha[l];
        const double p_surv = std::clamp(surv.real(), 0.0, 1.0);

        TrialRecord &rec = records[trial];
        rec.bin = std::min(
            n_bins - 1, static_cast<std::size_t>((t - window.start) / window.duration *
                                                 static_cast<double>(n_bins)));
        if (!rng.next_bernoulli(p_surv)) continue;
        rec.survived = true;

        // position reading from the exact marginal
        double total = 0.0;
        for (std::size_t m = 0; m < pm.M; ++m) {
            cplx amp{};
            for (std::size_t k = 0; k < d; ++k) amp += alpha[k] * pos_pack[k][m];
            density[m] = std::norm(amp);
            total += density[m];
        }
        double target = rng.next_double() * total;
        std::size_t pick = pm.M - 1;
        for (std::size_t m = 0; m < pm.M; ++m) {
            target -= density[m];
            if (target <= 0.0) {
                pick = m;
                break;
            }
        }
        rec.x = pm.position(pick);

        // momentum reading from the exact marginal
        total = 0.0;
        for (std::size_t n = 0; n < pm.M; ++n) {
            cplx amp{};
            for (std::size_t k = 0; k < d; ++k) amp += alpha[k] * mom_pack[k][n];
            density[n] = std::norm(amp);
            total += density[n];
        }
        target = rng.next_double() * total;
        pick = pm.M - 1;
        for (std::size_t n = 0; n < pm.M; ++n) {
            target -= density[n];
            if (target <= 0.0) {
                pick = n;
                break;
            }
        }
        rec.p = pm.momentum(pick);
    }

    McEstimate est;
    est.trials = trials;
    est.estimator = estimator;
    for (const auto &rec : records) {
        if (rec.survived) ++est.survivors;
    }
    if (est.survivors == 0) throw NoSurvivors("no trial survived post-selection");

    auto mean_and_stderr = [](const std::vector<double> &v) {
        const double n = static_cast<double>(v.size());
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        if (v.size() < 2) return std::pair<double, double>{mean, 0.0};
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= (n - 1.0);
        return std::pair<double, double>{mean, std::sqrt(var / n)};
    };

    if (estimator == Estimator::Pooled) {
        std::vector<double> xs, ps;
        xs.reserve(est.survivors);
        ps.reserve(est.survivors);
        for (const auto &rec : records) {
            if (!rec.survived) continue;
            xs.push_back(rec.x);
            ps.push_back(rec.p);
        }
        const auto [mx, sx] = mean_and_stderr(xs);
        const auto [mp, sp] = mean_and_stderr(ps);
        est.value = {mx / pm.g, mp * c_im / pm.g};
        est.stderr_re = sx / pm.g;
        est.stderr_im = sp * std::abs(c_im) / pm.g;
    } else {
        std::vector<std::vector<double>> bin_xs(n_bins), bin_ps(n_bins);
        for (const auto &rec : records) {
            if (!rec.survived) continue;
            bin_xs[rec.bin].push_back(rec.x);
            bin_ps[rec.bin].push_back(rec.p);
        }
        double sum_re = 0.0, sum_im = 0.0, var_re = 0.0, var_im = 0.0;
        for (std::size_t b = 0; b < n_bins; ++b) {
            const std::vector<double> &xs = bin_xs[b];
            const std::vector<double> &ps = bin_ps[b];
            if (xs.empty()) {
                throw NoSurvivors("time bin " + std::to_string(b) + " has no survivors");
            }
            const auto [mx, sx] = mean_and_stderr(xs);
            const auto [mp, sp] = mean_and_stderr(ps);
            sum_re += mx / pm.g;
            sum_im += mp * c_im / pm.g;
            var_re += (sx / pm.g) * (sx / pm.g);
            var_im += (sp * std::abs(c_im) / pm.g) * (sp * std::abs(c_im) / pm.g);
        }
        const double nb = static_cast<double>(n_bins);
        est.value = {sum_re / nb, sum_im / nb};
        est.stderr_re = std::sqrt(var_re) / nb;
        est.stderr_im = std::sqrt(var_im) / nb;
    }
    return est;
}

} // namespace oscmix
