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

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "oscmix/errors.hpp"
#include "oscmix/numeric.hpp"

namespace oscmix {

/// Dense square complex matrix, row-major. Dimensions stay small (<= ~512),
/// so no sparse or blocked machinery.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;

    explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, cplx{}) {}

    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
        dim_ = rows.size();
        data_.reserve(dim_ * dim_);
        for (const auto &row : rows) {
            if (row.size() != dim_) {
                throw DimensionMismatch("matrix rows must all have the same length");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(const std::vector<double> &entries) {
        ComplexMatrix m(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
        return m;
    }

    std::size_t dim() const { return dim_; }

    cplx &operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    cplx operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    cplx trace() const {
        cplx t{};
        for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    /// Largest entry-wise deviation from the own adjoint.
    double hermiticity_defect() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = i; j < dim_; ++j)
                worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return worst;
    }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(),
                           [](cplx z) { return detail::is_finite(z); });
    }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        if (a.dim_ != b.dim_) throw DimensionMismatch("matrix product: dimensions differ");
        ComplexMatrix out(a.dim_);
        for (std::size_t i = 0; i < a.dim_; ++i) {
            for (std::size_t k = 0; k < a.dim_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{}) continue;
                for (std::size_t j = 0; j < a.dim_; ++j) out(i, j) += aik * b(k, j);
            }
        }
        return out;
    }

    friend ComplexMatrix operator+(const ComplexMatrix &a, const ComplexMatrix &b) {
        if (a.dim_ != b.dim_) throw DimensionMismatch("matrix sum: dimensions differ");
        ComplexMatrix out = a;
        for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
        return out;
    }

    friend ComplexMatrix operator*(cplx scale, const ComplexMatrix &a) {
        ComplexMatrix out = a;
        for (auto &z : out.data_) z *= scale;
        return out;
    }

  private:
    std::size_t dim_ = 0;
    std::vector<cplx> data_;
};

inline std::vector<cplx> operator*(const ComplexMatrix &m, const std::vector<cplx> &v) {
    if (m.dim() != v.size()) throw DimensionMismatch("matrix-vector product: dimensions differ");
    std::vector<cplx> out(v.size(), cplx{});
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) out[i] += m(i, j) * v[j];
    return out;
}

/// <a|b> with the bra conjugated.
inline cplx inner(const std::vector<cplx> &a, const std::vector<cplx> &b) {
    if (a.size() != b.size()) throw DimensionMismatch("inner product: dimensions differ");
    cplx acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

/// |a><b| as a matrix.
inline ComplexMatrix outer(const std::vector<cplx> &a, const std::vector<cplx> &b) {
    if (a.size() != b.size()) throw DimensionMismatch("outer product: dimensions differ");
    ComplexMatrix out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) out(i, j) = a[i] * std::conj(b[j]);
    return out;
}

struct EigenSystem {
    std::vector<double> values;        // ascending
    std::vector<std::vector<cplx>> vectors; // vectors[k] belongs to values[k]
};

/// Cyclic complex Jacobi diagonalization for Hermitian input. Accuracy is
/// excellent at the dimensions this library targets; no attempt is made to
/// be fast beyond that.
inline EigenSystem hermitian_eigen(const ComplexMatrix &matrix) {
    const std::size_t n = matrix.dim();
    ComplexMatrix a = matrix;
    ComplexMatrix v = ComplexMatrix::identity(n);

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    const double stop = 1e-14 * std::max(scale, 1.0);

    for (int sweep = 0; sweep < 96; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= stop) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double m = std::abs(apq);
                if (m <= stop) continue;

                const cplx phase = apq / m; // e^{i arg(apq)}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * m);
                const double t =
                    (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // Column rotation mixes columns p and q; the phase keeps the
                // transform unitary for complex off-diagonals.
                const cplx jqp = -s * std::conj(phase);
                const cplx jqq = c * std::conj(phase);
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip + jqp * aiq;
                    a(i, q) = s * aip + jqq * aiq;
                    const cplx vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip + jqp * viq;
                    v(i, q) = s * vip + jqq * viq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const cplx apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj - s * phase * aqj;
                    a(q, j) = s * apj + c * phase * aqj;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenSystem out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (std::size_t k : order) {
        out.values.push_back(a(k, k).real());
        std::vector<cplx> vec(n);
        for (std::size_t i = 0; i < n; ++i) vec[i] = v(i, k);
        out.vectors.push_back(std::move(vec));
    }
    return out;
}

} // namespace oscmix
