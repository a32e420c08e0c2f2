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

// Finite-dimensional states and observables, with the validation rules the
// rest of the library relies on: every value is checked when it is built and
// assumed valid from then on. All types are immutable after construction and
// all operations are pure, so unrestricted concurrent use is safe.

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "oscmix/complex_matrix.hpp"
#include "oscmix/errors.hpp"
#include "oscmix/numeric.hpp"

namespace oscmix {

/// Unit-norm complex vector. Squared norm must be 1 within 1e-12.
class PureState {
  public:
    explicit PureState(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.empty()) throw DimensionMismatch("pure state needs dimension >= 1");
        double norm2 = 0.0;
        for (cplx a : amps_) {
            if (!detail::is_finite(a)) throw NotNormalized("pure state has non-finite amplitude");
            norm2 += std::norm(a);
        }
        if (std::abs(norm2 - 1.0) > kNormTol) {
            throw NotNormalized("pure state squared norm deviates from 1 by " +
                                std::to_string(norm2 - 1.0));
        }
    }

    /// Rescales an arbitrary nonzero vector onto the unit sphere.
    static PureState normalized(std::vector<cplx> v) {
        double norm2 = 0.0;
        for (cplx a : v) norm2 += std::norm(a);
        if (norm2 <= 0.0) throw NotNormalized("cannot normalize the zero vector");
        const double inv = 1.0 / std::sqrt(norm2);
        for (cplx &a : v) a *= inv;
        return PureState(std::move(v));
    }

    static PureState basis_vector(std::size_t dim, std::size_t index) {
        std::vector<cplx> v(dim, cplx{});
        v.at(index) = 1.0;
        return PureState(std::move(v));
    }

    std::size_t dim() const { return amps_.size(); }
    const std::vector<cplx> &amplitudes() const { return amps_; }
    cplx operator[](std::size_t i) const { return amps_[i]; }

  private:
    std::vector<cplx> amps_;
};

/// Hermitian matrix representing a measurable quantity.
class Observable {
  public:
    friend Observable make_observable(ComplexMatrix matrix);

    std::size_t dim() const { return m_.dim(); }
    const ComplexMatrix &matrix() const { return m_; }

  private:
    explicit Observable(ComplexMatrix m) : m_(std::move(m)) {}
    ComplexMatrix m_;
};

/// Validates Hermiticity before wrapping the matrix.
inline Observable make_observable(ComplexMatrix matrix) {
    if (!matrix.all_finite()) throw NotHermitian("observable has non-finite entries");
    const double defect = matrix.hermiticity_defect();
    if (defect > kHermTol) {
        throw NotHermitian("observable deviates from Hermiticity by " + std::to_string(defect));
    }
    return Observable(std::move(matrix));
}

/// diag(+1, -1): the two-level polarization observable used throughout the
/// two-state scenarios.
inline Observable pauli_z() {
    return make_observable(ComplexMatrix::diagonal({1.0, -1.0}));
}

/// Hermitian, positive semi-definite, unit-trace matrix. Positivity is
/// established by full diagonalization so that the error can report the most
/// negative eigenvalue rather than a bare yes/no.
class DensityOperator {
  public:
    friend DensityOperator make_density(ComplexMatrix matrix);

    /// Rank-1 projector of a unit vector. Valid by construction; skips the
    /// eigenvalue scan.
    static DensityOperator from_pure(const PureState &psi) {
        return DensityOperator(outer(psi.amplitudes(), psi.amplitudes()));
    }

    /// Diagonal operator from probabilities that already sum to 1.
    static DensityOperator from_probabilities(const std::vector<double> &probs) {
        return DensityOperator(ComplexMatrix::diagonal(probs));
    }

    std::size_t dim() const { return m_.dim(); }
    const ComplexMatrix &matrix() const { return m_; }

    double purity() const {
        double acc = 0.0;
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < dim(); ++j)
                acc += (m_(i, j) * m_(j, i)).real();
        return acc;
    }

  private:
    explicit DensityOperator(ComplexMatrix m) : m_(std::move(m)) {}
    ComplexMatrix m_;
};

inline DensityOperator make_density(ComplexMatrix matrix) {
    if (!matrix.all_finite()) throw NotHermitian("density operator has non-finite entries");
    const double defect = matrix.hermiticity_defect();
    if (defect > kHermTol) {
        throw NotHermitian("density operator deviates from Hermiticity by " +
                           std::to_string(defect));
    }
    const cplx tr = matrix.trace();
    if (std::abs(tr - 1.0) > kTraceTol) {
        throw TraceNotOne("density operator trace is " + std::to_string(tr.real()) + " + " +
                          std::to_string(tr.imag()) + "i");
    }
    const EigenSystem eig = hermitian_eigen(matrix);
    if (!eig.values.empty() && eig.values.front() < -kPsdTol) {
        throw NotPositive("density operator has negative eigenvalue " +
                              std::to_string(eig.values.front()),
                          eig.values.front());
    }
    return DensityOperator(std::move(matrix));
}

/// Convex mixture of pure states: non-negative weights summing to 1.
class MixtureDecomposition {
  public:
    MixtureDecomposition(std::vector<double> weights, std::vector<PureState> components)
        : weights_(std::move(weights)), components_(std::move(components)) {
        if (weights_.empty() || weights_.size() != components_.size()) {
            throw DimensionMismatch("mixture needs matching, non-empty weight/component lists");
        }
        double total = 0.0;
        for (double w : weights_) {
            if (!(w >= 0.0)) throw NotNormalized("mixture weights must be non-negative");
            total += w;
        }
        if (std::abs(total - 1.0) > kNormTol) {
            throw NotNormalized("mixture weights sum to " + std::to_string(total));
        }
        const std::size_t d = components_.front().dim();
        for (const PureState &c : components_) {
            if (c.dim() != d) throw DimensionMismatch("mixture components differ in dimension");
        }
    }

    std::size_t size() const { return weights_.size(); }
    std::size_t dim() const { return components_.front().dim(); }
    double weight(std::size_t i) const { return weights_[i]; }
    const PureState &component(std::size_t i) const { return components_[i]; }

    /// The density operator the decomposition assembles into.
    DensityOperator assemble() const {
        ComplexMatrix acc(dim());
        for (std::size_t k = 0; k < size(); ++k) {
            const auto &v = components_[k].amplitudes();
            for (std::size_t i = 0; i < dim(); ++i)
                for (std::size_t j = 0; j < dim(); ++j)
                    acc(i, j) += weights_[k] * v[i] * std::conj(v[j]);
        }
        return make_density(std::move(acc));
    }

  private:
    std::vector<double> weights_;
    std::vector<PureState> components_;
};

/// Tr[rho O]. The trace of a Hermitian pair is real; the imaginary residue
/// is checked against 1e-10 and then dropped.
inline double expectation(const DensityOperator &state, const Observable &obs) {
    if (state.dim() != obs.dim()) throw DimensionMismatch("expectation: dimensions differ");
    cplx acc{};
    for (std::size_t i = 0; i < state.dim(); ++i)
        for (std::size_t j = 0; j < state.dim(); ++j)
            acc += state.matrix()(i, j) * obs.matrix()(j, i);
    if (std::abs(acc.imag()) > 1e-10) {
        throw Error("expectation value has imaginary residue " + std::to_string(acc.imag()));
    }
    return acc.real();
}

/// Tr[rho |a><a|], via the same code path as expectation so the two can
/// never disagree. Clamped to [0, 1] against roundoff.
inline double transition_probability(const DensityOperator &state, const PureState &target) {
    if (state.dim() != target.dim()) {
        throw DimensionMismatch("transition probability: dimensions differ");
    }
    const Observable projector =
        make_observable(outer(target.amplitudes(), target.amplitudes()));
    const double p = expectation(state, projector);
    return std::min(1.0, std::max(0.0, p));
}

} // namespace oscmix
