// Copyright 2026 The polysim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polysim/errors.hpp"

namespace polysim {

using Complex = std::complex<double>;

/// Largest qubit count the dense reference engine accepts.
inline constexpr std::size_t kMaxDenseQubits = 6;

/// Row-major complex matrix. Square power-of-two instances are n-qubit
/// operators; rectangular ones appear as Kraus factors of destructive
/// operations and state preparations.
class DenseOperator {
   public:
    DenseOperator() = default;
    DenseOperator(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
    }

    static DenseOperator zero_qubits(std::size_t n) {
        check_dense_qubits(n);
        return DenseOperator(std::size_t{1} << n, std::size_t{1} << n);
    }
    static DenseOperator identity(std::size_t dim) {
        DenseOperator out(dim, dim);
        for (std::size_t k = 0; k < dim; ++k) {
            out(k, k) = 1.0;
        }
        return out;
    }
    static DenseOperator scalar(Complex value) {
        DenseOperator out(1, 1);
        out(0, 0) = value;
        return out;
    }
    static DenseOperator from_rows(std::size_t rows, std::size_t cols, std::vector<Complex> entries) {
        if (entries.size() != rows * cols) {
            throw InputError("DenseOperator::from_rows: entry count does not match shape");
        }
        DenseOperator out(rows, cols);
        out.data_ = std::move(entries);
        return out;
    }

    static void check_dense_qubits(std::size_t n) {
        if (n > kMaxDenseQubits) {
            throw InputError(
                "dense materialization limited to " + std::to_string(kMaxDenseQubits) + " qubits, got " +
                std::to_string(n));
        }
    }

    std::size_t rows() const {
        return rows_;
    }
    std::size_t cols() const {
        return cols_;
    }
    bool is_square() const {
        return rows_ == cols_;
    }
    bool empty() const {
        return data_.empty();
    }

    /// Qubit count of a square 2^n x 2^n operator.
    std::size_t num_qubits() const {
        if (!is_square() || rows_ == 0 || (rows_ & (rows_ - 1)) != 0) {
            throw InputError("operator is not a square power-of-two matrix");
        }
        return static_cast<std::size_t>(std::countr_zero(rows_));
    }

    Complex &operator()(std::size_t r, std::size_t c) {
        return data_[r * cols_ + c];
    }
    const Complex &operator()(std::size_t r, std::size_t c) const {
        return data_[r * cols_ + c];
    }
    std::span<Complex> data() {
        return data_;
    }
    std::span<const Complex> data() const {
        return data_;
    }

    DenseOperator adjoint() const {
        DenseOperator out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                out(c, r) = std::conj((*this)(r, c));
            }
        }
        return out;
    }

    Complex trace() const {
        Complex t = 0;
        for (std::size_t k = 0; k < std::min(rows_, cols_); ++k) {
            t += (*this)(k, k);
        }
        return t;
    }

    double max_abs() const {
        double m = 0;
        for (const auto &v : data_) {
            m = std::max(m, std::abs(v));
        }
        return m;
    }

    DenseOperator &operator+=(const DenseOperator &other) {
        require_same_shape(other);
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] += other.data_[k];
        }
        return *this;
    }
    DenseOperator &operator-=(const DenseOperator &other) {
        require_same_shape(other);
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] -= other.data_[k];
        }
        return *this;
    }
    DenseOperator &operator*=(Complex s) {
        for (auto &v : data_) {
            v *= s;
        }
        return *this;
    }

    friend DenseOperator operator+(DenseOperator a, const DenseOperator &b) {
        return a += b;
    }
    friend DenseOperator operator-(DenseOperator a, const DenseOperator &b) {
        return a -= b;
    }
    friend DenseOperator operator*(DenseOperator a, Complex s) {
        return a *= s;
    }
    friend DenseOperator operator*(Complex s, DenseOperator a) {
        return a *= s;
    }

    friend DenseOperator operator*(const DenseOperator &a, const DenseOperator &b) {
        if (a.cols_ != b.rows_) {
            throw InputError("matrix product: inner dimensions differ");
        }
        DenseOperator out(a.rows_, b.cols_);
        for (std::size_t r = 0; r < a.rows_; ++r) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                Complex v = a(r, k);
                if (v == Complex{}) {
                    continue;
                }
                for (std::size_t c = 0; c < b.cols_; ++c) {
                    out(r, c) += v * b(k, c);
                }
            }
        }
        return out;
    }

    bool same_shape(const DenseOperator &other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

   private:
    void require_same_shape(const DenseOperator &other) const {
        if (!same_shape(other)) {
            throw InputError("operator shapes differ");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Kronecker product a ⊗ b; `a` occupies the more significant index bits.
inline DenseOperator kron(const DenseOperator &a, const DenseOperator &b) {
    DenseOperator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar) {
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            Complex v = a(ar, ac);
            if (v == Complex{}) {
                continue;
            }
            for (std::size_t br = 0; br < b.rows(); ++br) {
                for (std::size_t bc = 0; bc < b.cols(); ++bc) {
                    out(ar * b.rows() + br, ac * b.cols() + bc) = v * b(br, bc);
                }
            }
        }
    }
    return out;
}

/// Entrywise max |a - b|; infinite when shapes differ.
inline double max_abs_diff(const DenseOperator &a, const DenseOperator &b) {
    if (!a.same_shape(b)) {
        return INFINITY;
    }
    double m = 0;
    for (std::size_t k = 0; k < a.data().size(); ++k) {
        m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    }
    return m;
}

inline bool is_hermitian(const DenseOperator &a, double tol = 1e-9) {
    if (!a.is_square()) {
        return false;
    }
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = r; c < a.cols(); ++c) {
            if (std::abs(a(r, c) - std::conj(a(c, r))) > tol) {
                return false;
            }
        }
    }
    return true;
}

/// Computational basis projector |bits><bits| on n qubits, qubit 0 most significant.
inline DenseOperator basis_projector(std::size_t n, std::uint64_t bits) {
    auto out = DenseOperator::zero_qubits(n);
    out(bits, bits) = 1.0;
    return out;
}

/// Column vector as an operator.
inline DenseOperator column(std::span<const Complex> amplitudes) {
    DenseOperator out(amplitudes.size(), 1);
    for (std::size_t k = 0; k < amplitudes.size(); ++k) {
        out(k, 0) = amplitudes[k];
    }
    return out;
}

struct HermitianEigen {
    /// Ascending.
    std::vector<double> values;
    /// vectors[k] is the unit eigenvector for values[k].
    std::vector<std::vector<Complex>> vectors;
};

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations on
/// the real symmetric embedding [[Re, -Im], [Im, Re]].
///
/// The embedding doubles every eigenvalue; one representative per pair is
/// returned, chosen greedily so the complex vectors stay orthonormal.
inline HermitianEigen hermitian_eigen(const DenseOperator &h, double tol = 1e-12, int max_sweeps = 100) {
    if (!is_hermitian(h, 1e-9)) {
        throw InputError("hermitian_eigen: input is not Hermitian");
    }
    const std::size_t dim = h.rows();
    const std::size_t m = 2 * dim;
    std::vector<double> a(m * m);
    std::vector<double> v(m * m);
    auto at = [m](std::vector<double> &mat, std::size_t r, std::size_t c) -> double & {
        return mat[r * m + c];
    };
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            double re = h(r, c).real();
            double im = h(r, c).imag();
            at(a, r, c) = re;
            at(a, r + dim, c + dim) = re;
            at(a, r, c + dim) = -im;
            at(a, r + dim, c) = im;
        }
    }
    for (std::size_t k = 0; k < m; ++k) {
        at(v, k, k) = 1.0;
    }

    double scale = 0;
    for (double x : a) {
        scale = std::max(scale, std::abs(x));
    }
    const double threshold = tol * std::max(scale, 1.0);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                off = std::max(off, std::abs(at(a, p, q)));
            }
        }
        if (off <= threshold) {
            break;
        }
        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                double apq = at(a, p, q);
                if (std::abs(apq) <= threshold * 1e-3) {
                    continue;
                }
                double theta = (at(a, q, q) - at(a, p, p)) / (2 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1);
                double s = t * c;
                for (std::size_t k = 0; k < m; ++k) {
                    double akp = at(a, k, p);
                    double akq = at(a, k, q);
                    at(a, k, p) = c * akp - s * akq;
                    at(a, k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    double apk = at(a, p, k);
                    double aqk = at(a, q, k);
                    at(a, p, k) = c * apk - s * aqk;
                    at(a, q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    double vkp = at(v, k, p);
                    double vkq = at(v, k, q);
                    at(v, k, p) = c * vkp - s * vkq;
                    at(v, k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(m);
    for (std::size_t k = 0; k < m; ++k) {
        order[k] = k;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return at(a, x, x) < at(a, y, y);
    });

    HermitianEigen out;
    for (std::size_t idx : order) {
        if (out.values.size() == dim) {
            break;
        }
        std::vector<Complex> w(dim);
        for (std::size_t r = 0; r < dim; ++r) {
            w[r] = Complex(at(v, r, idx), at(v, r + dim, idx));
        }
        // Project out already accepted vectors; a partner of an accepted
        // vector collapses to ~0 and is skipped.
        for (const auto &u : out.vectors) {
            Complex overlap = 0;
            for (std::size_t r = 0; r < dim; ++r) {
                overlap += std::conj(u[r]) * w[r];
            }
            for (std::size_t r = 0; r < dim; ++r) {
                w[r] -= overlap * u[r];
            }
        }
        double norm = 0;
        for (const auto &x : w) {
            norm += std::norm(x);
        }
        norm = std::sqrt(norm);
        if (norm < 0.5) {
            continue;
        }
        for (auto &x : w) {
            x /= norm;
        }
        out.values.push_back(at(a, idx, idx));
        out.vectors.push_back(std::move(w));
    }
    if (out.values.size() != dim) {
        throw VerificationError("hermitian_eigen: failed to extract a full eigenbasis");
    }
    return out;
}

/// Partial trace over one qubit (qubit 0 is the most significant tensor factor).
inline DenseOperator partial_trace(const DenseOperator &a, std::size_t qubit) {
    std::size_t n = a.num_qubits();
    if (n == 0) {
        throw InputError("partial_trace: operator has no qubits");
    }
    if (qubit >= n) {
        throw InputError("partial_trace: qubit " + std::to_string(qubit) + " out of range");
    }
    const std::size_t bit = n - 1 - qubit;
    const std::size_t low_mask = (std::size_t{1} << bit) - 1;
    auto expand = [&](std::size_t reduced, std::size_t value) {
        std::size_t high = (reduced & ~low_mask) << 1;
        return high | (value << bit) | (reduced & low_mask);
    };
    const std::size_t out_dim = a.rows() / 2;
    DenseOperator out(out_dim, out_dim);
    for (std::size_t r = 0; r < out_dim; ++r) {
        for (std::size_t c = 0; c < out_dim; ++c) {
            out(r, c) = a(expand(r, 0), expand(c, 0)) + a(expand(r, 1), expand(c, 1));
        }
    }
    return out;
}

struct StateCheck {
    bool ok = false;
    double trace = 0;
    double min_eigenvalue = 0;
};

/// Density-operator test: trace one and no eigenvalue below -tol.
inline StateCheck validate_state(const DenseOperator &a, double tol = 1e-9) {
    if (!is_hermitian(a, tol)) {
        throw InputError("validate_state: operator is not Hermitian");
    }
    StateCheck out;
    out.trace = a.trace().real();
    out.min_eigenvalue = hermitian_eigen(a).values.front();
    out.ok = std::abs(out.trace - 1) <= tol && out.min_eigenvalue >= -tol;
    return out;
}

}  // namespace polysim
