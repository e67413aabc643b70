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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polysim/dense.hpp"
#include "polysim/errors.hpp"

namespace polysim {

namespace bits {

inline std::size_t words_for(std::size_t n) {
    return (n + 63) / 64;
}

inline bool get(std::span<const std::uint64_t> w, std::size_t k) {
    return (w[k >> 6] >> (k & 63)) & 1;
}

inline void set(std::span<std::uint64_t> w, std::size_t k, bool v) {
    std::uint64_t m = std::uint64_t{1} << (k & 63);
    if (v) {
        w[k >> 6] |= m;
    } else {
        w[k >> 6] &= ~m;
    }
}

/// Symplectic form on word-packed (x|z) halves.
inline bool omega(
    std::span<const std::uint64_t> ax,
    std::span<const std::uint64_t> az,
    std::span<const std::uint64_t> bx,
    std::span<const std::uint64_t> bz) {
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < ax.size(); ++k) {
        acc ^= (ax[k] & bz[k]) ^ (bx[k] & az[k]);
    }
    return std::popcount(acc) & 1;
}

/// Exponent t (mod 4) with T_a T_b = i^t T_{a+b}.
///
/// T_a = i^{a^X.a^Z} X^{a^X} Z^{a^Z}; moving Z^{a^Z} past X^{b^X} costs
/// (-1)^{a^Z.b^X}, and X^c Z^c = i^{-c^X.c^Z} T_c for c = a + b.
inline unsigned product_exponent(
    std::span<const std::uint64_t> ax,
    std::span<const std::uint64_t> az,
    std::span<const std::uint64_t> bx,
    std::span<const std::uint64_t> bz) {
    unsigned t = 0;
    for (std::size_t k = 0; k < ax.size(); ++k) {
        t += std::popcount(ax[k] & az[k]);
        t += std::popcount(bx[k] & bz[k]);
        t += 2 * std::popcount(az[k] & bx[k]);
        t -= std::popcount((ax[k] ^ bx[k]) & (az[k] ^ bz[k]));
    }
    return t & 3;
}

}  // namespace bits

/// A point a = (a^X | a^Z) of E_n = Z2^{2n}, i.e. a Pauli operator T_a up to phase.
class PauliIndex {
   public:
    PauliIndex() = default;
    explicit PauliIndex(std::size_t num_qubits)
        : n_(num_qubits), words_(2 * bits::words_for(num_qubits)) {
    }

    /// Small-n encoding: bit j of `code` is x_j, bit n + j is z_j.
    static PauliIndex from_code(std::size_t num_qubits, std::uint64_t code) {
        if (num_qubits > 32) {
            throw InputError("PauliIndex::from_code supports at most 32 qubits");
        }
        PauliIndex out(num_qubits);
        for (std::size_t q = 0; q < num_qubits; ++q) {
            out.set_x(q, (code >> q) & 1);
            out.set_z(q, (code >> (num_qubits + q)) & 1);
        }
        return out;
    }

    std::uint64_t code() const {
        if (n_ > 32) {
            throw InputError("PauliIndex::code supports at most 32 qubits");
        }
        std::uint64_t c = 0;
        for (std::size_t q = 0; q < n_; ++q) {
            c |= std::uint64_t{x(q)} << q;
            c |= std::uint64_t{z(q)} << (n_ + q);
        }
        return c;
    }

    std::size_t num_qubits() const {
        return n_;
    }
    std::size_t num_words() const {
        return words_.size() / 2;
    }

    bool x(std::size_t q) const {
        return bits::get(xs(), q);
    }
    bool z(std::size_t q) const {
        return bits::get(zs(), q);
    }
    void set_x(std::size_t q, bool v) {
        bits::set(xs(), q, v);
    }
    void set_z(std::size_t q, bool v) {
        bits::set(zs(), q, v);
    }

    std::span<const std::uint64_t> xs() const {
        return std::span(words_).first(num_words());
    }
    std::span<const std::uint64_t> zs() const {
        return std::span(words_).last(num_words());
    }
    std::span<std::uint64_t> xs() {
        return std::span(words_).first(num_words());
    }
    std::span<std::uint64_t> zs() {
        return std::span(words_).last(num_words());
    }

    bool is_identity() const {
        for (auto w : words_) {
            if (w) {
                return false;
            }
        }
        return true;
    }

    /// Number of qubits on which the operator acts non-trivially.
    std::size_t weight() const {
        std::size_t w = 0;
        for (std::size_t k = 0; k < num_words(); ++k) {
            w += std::popcount(xs()[k] | zs()[k]);
        }
        return w;
    }

    PauliIndex &operator+=(const PauliIndex &other) {
        require_same_size(other);
        for (std::size_t k = 0; k < words_.size(); ++k) {
            words_[k] ^= other.words_[k];
        }
        return *this;
    }
    friend PauliIndex operator+(PauliIndex a, const PauliIndex &b) {
        return a += b;
    }

    friend bool operator==(const PauliIndex &, const PauliIndex &) = default;
    friend std::strong_ordering operator<=>(const PauliIndex &a, const PauliIndex &b) {
        if (auto c = a.n_ <=> b.n_; c != 0) {
            return c;
        }
        return a.words_ <=> b.words_;
    }

    void require_same_size(const PauliIndex &other) const {
        if (n_ != other.n_) {
            throw InputError(
                "Pauli size mismatch: " + std::to_string(n_) + " vs " + std::to_string(other.n_) + " qubits");
        }
    }

    std::size_t hash() const {
        std::size_t h = n_;
        for (auto w : words_) {
            h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }

   private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Symplectic form; 0 iff T_a and T_b commute.
inline bool omega(const PauliIndex &a, const PauliIndex &b) {
    a.require_same_size(b);
    return bits::omega(a.xs(), a.zs(), b.xs(), b.zs());
}

/// Sign bit in T_a T_b = (-1)^beta T_{a+b} for commuting a, b.
inline bool beta(const PauliIndex &a, const PauliIndex &b) {
    if (omega(a, b)) {
        throw PreconditionError("beta: indices anticommute");
    }
    return (bits::product_exponent(a.xs(), a.zs(), b.xs(), b.zs()) >> 1) & 1;
}

/// The operator i^phase T_index.
struct PhasedPauli {
    std::uint8_t phase = 0;
    PauliIndex index;

    PhasedPauli() = default;
    PhasedPauli(unsigned t, PauliIndex a) : phase(static_cast<std::uint8_t>(t & 3)), index(std::move(a)) {
    }
    static PhasedPauli identity(std::size_t n) {
        return PhasedPauli(0, PauliIndex(n));
    }

    std::size_t num_qubits() const {
        return index.num_qubits();
    }
    bool is_hermitian() const {
        return (phase & 1) == 0;
    }
    /// (-1)^sign for a Hermitian operator.
    bool sign() const {
        return (phase >> 1) & 1;
    }

    friend bool operator==(const PhasedPauli &, const PhasedPauli &) = default;
};

inline PhasedPauli multiply(const PhasedPauli &p, const PhasedPauli &q) {
    p.index.require_same_size(q.index);
    unsigned t = p.phase + q.phase + bits::product_exponent(p.index.xs(), p.index.zs(), q.index.xs(), q.index.zs());
    return PhasedPauli(t, p.index + q.index);
}

enum class GateKind { H, S, X, Y, Z, CZ, CNOT };

inline bool is_two_qubit(GateKind k) {
    return k == GateKind::CZ || k == GateKind::CNOT;
}

inline std::string_view gate_name(GateKind k) {
    switch (k) {
        case GateKind::H:
            return "H";
        case GateKind::S:
            return "S";
        case GateKind::X:
            return "X";
        case GateKind::Y:
            return "Y";
        case GateKind::Z:
            return "Z";
        case GateKind::CZ:
            return "CZ";
        case GateKind::CNOT:
            return "CNOT";
    }
    return "?";
}

/// An elementary Clifford gate. For CNOT, qubits[0] is the control.
struct CliffordGate {
    GateKind kind = GateKind::H;
    std::size_t q0 = 0;
    std::size_t q1 = 0;

    static CliffordGate single(GateKind k, std::size_t q) {
        if (is_two_qubit(k)) {
            throw InputError("gate " + std::string(gate_name(k)) + " needs two qubits");
        }
        return {k, q, q};
    }
    static CliffordGate pair(GateKind k, std::size_t a, std::size_t b) {
        if (!is_two_qubit(k)) {
            throw InputError("gate " + std::string(gate_name(k)) + " takes one qubit");
        }
        if (a == b) {
            throw InputError("two-qubit gate needs distinct qubits");
        }
        return {k, a, b};
    }

    void check_range(std::size_t n) const {
        if (q0 >= n || (is_two_qubit(kind) && q1 >= n)) {
            throw InputError("gate " + std::string(gate_name(kind)) + " qubit out of range for n=" + std::to_string(n));
        }
    }
};

namespace detail {

/// In-place conjugation of a Hermitian-factor row (x|z, sign) by a gate.
/// Returns the sign flip φ_U(a).
inline bool conjugate_bits(const CliffordGate &g, std::span<std::uint64_t> xs, std::span<std::uint64_t> zs) {
    auto gx = [&](std::size_t q) {
        return bits::get(xs, q);
    };
    auto gz = [&](std::size_t q) {
        return bits::get(zs, q);
    };
    const std::size_t a = g.q0;
    const std::size_t b = g.q1;
    switch (g.kind) {
        case GateKind::H: {
            bool x = gx(a), z = gz(a);
            bits::set(xs, a, z);
            bits::set(zs, a, x);
            return x && z;
        }
        case GateKind::S: {
            bool x = gx(a), z = gz(a);
            bits::set(zs, a, z ^ x);
            return x && z;
        }
        case GateKind::X:
            return gz(a);
        case GateKind::Y:
            return gx(a) ^ gz(a);
        case GateKind::Z:
            return gx(a);
        case GateKind::CNOT: {
            bool xc = gx(a), zc = gz(a), xt = gx(b), zt = gz(b);
            bits::set(xs, b, xt ^ xc);
            bits::set(zs, a, zc ^ zt);
            return xc && zt && !(xt ^ zc);
        }
        case GateKind::CZ: {
            bool xc = gx(a), zc = gz(a), xt = gx(b), zt = gz(b);
            bits::set(zs, a, zc ^ xt);
            bits::set(zs, b, zt ^ xc);
            return xc && xt && (zc ^ zt);
        }
    }
    return false;
}

}  // namespace detail

/// U p U† for an elementary Clifford U.
inline PhasedPauli conjugate(const CliffordGate &g, PhasedPauli p) {
    g.check_range(p.num_qubits());
    if (detail::conjugate_bits(g, p.index.xs(), p.index.zs())) {
        p.phase = static_cast<std::uint8_t>((p.phase + 2) & 3);
    }
    return p;
}

/// Parses "[+|-]" followed by n characters from {I,_,X,Y,Z}. Each letter is
/// the Hermitian single-qubit factor, so "Y" has index bits (1|1).
inline PhasedPauli parse_pauli(std::string_view text) {
    unsigned phase = 0;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
        phase = text.front() == '-' ? 2 : 0;
        text.remove_prefix(1);
    }
    if (text.empty()) {
        throw InputError("empty Pauli string");
    }
    PauliIndex a(text.size());
    for (std::size_t q = 0; q < text.size(); ++q) {
        switch (text[q]) {
            case 'I':
            case '_':
                break;
            case 'X':
                a.set_x(q, true);
                break;
            case 'Y':
                a.set_x(q, true);
                a.set_z(q, true);
                break;
            case 'Z':
                a.set_z(q, true);
                break;
            default:
                throw InputError("bad Pauli character '" + std::string(1, text[q]) + "'");
        }
    }
    return PhasedPauli(phase, std::move(a));
}

inline std::string pauli_letters(const PauliIndex &a) {
    std::string out;
    out.reserve(a.num_qubits());
    for (std::size_t q = 0; q < a.num_qubits(); ++q) {
        out.push_back("IXZY"[a.x(q) | (a.z(q) << 1)]);
    }
    return out;
}

/// Inverse of parse_pauli; non-Hermitian phases print as "+i"/"-i".
inline std::string format_pauli(const PhasedPauli &p) {
    static constexpr const char *prefix[] = {"+", "+i", "-", "-i"};
    return prefix[p.phase & 3] + pauli_letters(p.index);
}

/// Dense 2^n x 2^n matrix of i^t T_a; qubit 0 is the most significant factor.
///
/// T_a is a signed permutation: X^x Z^z |k> = (-1)^{z.k} |k xor x>.
inline DenseOperator materialize(const PhasedPauli &p) {
    const std::size_t n = p.num_qubits();
    DenseOperator::check_dense_qubits(n);
    std::uint64_t xmask = 0, zmask = 0;
    for (std::size_t q = 0; q < n; ++q) {
        xmask |= std::uint64_t{p.index.x(q)} << (n - 1 - q);
        zmask |= std::uint64_t{p.index.z(q)} << (n - 1 - q);
    }
    static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    unsigned base = (p.phase + std::popcount(xmask & zmask)) & 3;
    auto out = DenseOperator::zero_qubits(n);
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) {
        unsigned t = base + 2 * (std::popcount(zmask & k) & 1);
        out(k ^ xmask, k) = ipow[t & 3];
    }
    return out;
}

/// A Z2-valued function on a set of indices, stored pointwise.
struct ValueAssignment {
    std::vector<PauliIndex> domain;
    std::vector<std::uint8_t> values;
};

}  // namespace polysim

template <>
struct std::hash<polysim::PauliIndex> {
    std::size_t operator()(const polysim::PauliIndex &a) const {
        return a.hash();
    }
};
