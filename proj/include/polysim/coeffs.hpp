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

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "polysim/dense.hpp"
#include "polysim/errors.hpp"
#include "polysim/pauli.hpp"

namespace polysim {

/// Real coordinates c_a of a Hermitian operator A = sum_a c_a T_a, indexed by
/// PauliIndex::code(). Trace-one operators have c_0 = 2^-n.
struct CoeffVector {
    std::size_t n = 0;
    std::vector<double> c;

    static CoeffVector zeros(std::size_t num_qubits) {
        return {num_qubits, std::vector<double>(std::size_t{1} << (2 * num_qubits))};
    }

    std::size_t size() const {
        return c.size();
    }
    double operator[](std::size_t code) const {
        return c[code];
    }
    double &operator[](std::size_t code) {
        return c[code];
    }
    double trace() const {
        return c.empty() ? 0.0 : c[0] * static_cast<double>(std::size_t{1} << n);
    }

    double max_abs_diff(const CoeffVector &other) const {
        if (n != other.n) {
            return INFINITY;
        }
        double m = 0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            m = std::max(m, std::abs(c[k] - other.c[k]));
        }
        return m;
    }
};

namespace detail {

struct PauliMasks {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
};

/// Basis-order masks of T_a for a small-n code (qubit 0 is the top bit).
inline PauliMasks pauli_masks(std::size_t n, std::uint64_t code) {
    PauliMasks m;
    for (std::size_t q = 0; q < n; ++q) {
        m.x |= ((code >> q) & 1) << (n - 1 - q);
        m.z |= ((code >> (n + q)) & 1) << (n - 1 - q);
    }
    return m;
}

inline Complex pauli_entry_phase(const PauliMasks &m, std::uint64_t column) {
    static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    unsigned t = std::popcount(m.x & m.z) + 2 * (std::popcount(m.z & column) & 1);
    return ipow[t & 3];
}

}  // namespace detail

/// c_a = Tr(T_a A) / 2^n without normalization checks; A must be Hermitian
/// for the coordinates to be real.
inline CoeffVector pauli_coefficients(const DenseOperator &a) {
    const std::size_t n = a.num_qubits();
    if (n > 6) {
        throw InputError("pauli_coefficients: too many qubits");
    }
    const std::uint64_t dim = std::uint64_t{1} << n;
    auto out = CoeffVector::zeros(n);
    for (std::uint64_t code = 0; code < out.size(); ++code) {
        auto m = detail::pauli_masks(n, code);
        Complex tr = 0;
        for (std::uint64_t k = 0; k < dim; ++k) {
            // (T_a)_{k^x, k} A_{k, k^x}
            tr += detail::pauli_entry_phase(m, k) * a(k, k ^ m.x);
        }
        out[code] = tr.real() / static_cast<double>(dim);
    }
    return out;
}

/// Pauli coordinates of a Hermitian trace-one operator.
inline CoeffVector to_coeffs(const DenseOperator &a, double tol = 1e-9) {
    if (!is_hermitian(a, tol)) {
        throw InputError("to_coeffs: operator is not Hermitian");
    }
    if (std::abs(a.trace() - Complex(1)) > tol) {
        throw InputError("to_coeffs: operator does not have trace one");
    }
    return pauli_coefficients(a);
}

inline DenseOperator from_coeffs(const CoeffVector &v) {
    const std::size_t n = v.n;
    if (v.c.size() != (std::size_t{1} << (2 * n))) {
        throw InputError("from_coeffs: coefficient count does not match n");
    }
    auto out = DenseOperator::zero_qubits(n);
    const std::uint64_t dim = std::uint64_t{1} << n;
    for (std::uint64_t code = 0; code < v.size(); ++code) {
        if (v[code] == 0) {
            continue;
        }
        auto m = detail::pauli_masks(n, code);
        for (std::uint64_t k = 0; k < dim; ++k) {
            out(k ^ m.x, k) += v[code] * detail::pauli_entry_phase(m, k);
        }
    }
    return out;
}

}  // namespace polysim
