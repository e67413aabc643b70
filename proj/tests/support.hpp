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

// Test-side reference implementations: gate matrices written out entry by
// entry, projectors from explicit matrices, and random circuit generators.

#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "polysim.hpp"

namespace polysim::testing {

using C = std::complex<double>;

inline DenseOperator mat2(C a, C b, C c, C d) {
    return DenseOperator::from_rows(2, 2, {a, b, c, d});
}

inline DenseOperator ref_single(GateKind k) {
    const double r = 1.0 / std::sqrt(2.0);
    const C i{0, 1};
    switch (k) {
        case GateKind::H: return mat2(r, r, r, -r);
        case GateKind::S: return mat2(1, 0, 0, i);
        case GateKind::X: return mat2(0, 1, 1, 0);
        case GateKind::Y: return mat2(0, -i, i, 0);
        case GateKind::Z: return mat2(1, 0, 0, -1);
        default: throw std::logic_error("not a single-qubit gate");
    }
}

inline DenseOperator ref_pauli_letter(char c) {
    switch (c) {
        case 'I': return DenseOperator::identity(2);
        case 'X': return ref_single(GateKind::X);
        case 'Y': return ref_single(GateKind::Y);
        case 'Z': return ref_single(GateKind::Z);
        default: throw std::logic_error("bad letter");
    }
}

/// Tensor product of letters, qubit 0 leftmost.
inline DenseOperator ref_pauli(const std::string &letters) {
    DenseOperator out = DenseOperator::identity(1);
    for (char c : letters) {
        out = kron(out, ref_pauli_letter(c));
    }
    return out;
}

inline std::string letters_of_code(std::size_t n, std::uint64_t code) {
    std::string s;
    for (std::size_t q = 0; q < n; ++q) {
        bool x = (code >> q) & 1, z = (code >> (n + q)) & 1;
        s.push_back(x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I'));
    }
    return s;
}

/// Dense n-qubit matrix of an elementary gate, assembled independently of
/// the library's gate tables.
inline DenseOperator ref_gate(const CliffordGate &g, std::size_t n) {
    const std::size_t dim = std::size_t{1} << n;
    if (!is_two_qubit(g.kind)) {
        DenseOperator out = DenseOperator::identity(1);
        for (std::size_t q = 0; q < n; ++q) {
            out = kron(out, q == g.q0 ? ref_single(g.kind) : DenseOperator::identity(2));
        }
        return out;
    }
    auto bit = [&](std::uint64_t k, std::size_t q) { return (k >> (n - 1 - q)) & 1; };
    DenseOperator out(dim, dim);
    for (std::uint64_t k = 0; k < dim; ++k) {
        if (g.kind == GateKind::CNOT) {
            std::uint64_t t = bit(k, g.q0) ? k ^ (std::uint64_t{1} << (n - 1 - g.q1)) : k;
            out(t, k) = 1.0;
        } else {
            out(k, k) = (bit(k, g.q0) && bit(k, g.q1)) ? -1.0 : 1.0;
        }
    }
    return out;
}

inline DenseOperator conj_by(const DenseOperator &u, const DenseOperator &a) {
    return u * a * u.adjoint();
}

inline CliffordGate random_gate(std::mt19937_64 &rng, std::size_t n) {
    static const GateKind kinds[] = {GateKind::H, GateKind::S, GateKind::X, GateKind::Y,
                                     GateKind::Z, GateKind::CZ, GateKind::CNOT};
    std::uniform_int_distribution<int> kd(0, n > 1 ? 6 : 4);
    std::uniform_int_distribution<std::size_t> qd(0, n - 1);
    GateKind k = kinds[kd(rng)];
    std::size_t a = qd(rng);
    if (!is_two_qubit(k)) {
        return CliffordGate::single(k, a);
    }
    std::size_t b = qd(rng);
    while (b == a) {
        b = qd(rng);
    }
    return CliffordGate::pair(k, a, b);
}

inline PhasedPauli random_hermitian_pauli(std::mt19937_64 &rng, std::size_t n) {
    PauliIndex a(n);
    do {
        for (std::size_t q = 0; q < n; ++q) {
            a.set_x(q, rng() & 1);
            a.set_z(q, rng() & 1);
        }
    } while (a.is_identity());
    return PhasedPauli((rng() & 1) ? 2 : 0, a);
}

/// Hermitian matrix of a signed Pauli built from its letters.
inline DenseOperator ref_signed(const PhasedPauli &p) {
    auto m = ref_pauli(pauli_letters(p.index));
    return p.sign() ? m * C(-1.0) : m;
}

inline std::vector<std::string> all_histories(std::size_t len) {
    std::vector<std::string> out;
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << len); ++k) {
        std::string h;
        for (std::size_t j = 0; j < len; ++j) {
            h.push_back(((k >> (len - 1 - j)) & 1) ? '1' : '0');
        }
        out.push_back(h);
    }
    return out;
}

/// Random adaptive circuit on 1 or 2 qubits plus the vertex family whose
/// stage sets it is simulable over.
struct RandomAdaptive {
    Circuit circuit;
    std::string family;
};

inline RandomAdaptive random_adaptive(std::mt19937_64 &rng, std::size_t n) {
    static const char *single_states[] = {"0", "1", "+", "-", "+i", "-i"};
    static const char *signed_1q[] = {"X", "Y", "Z", "-X", "-Y", "-Z"};
    RandomAdaptive out;
    Circuit &c = out.circuit;
    c.n = n;
    std::uniform_int_distribution<int> six(0, 5);
    const int variant = static_cast<int>(rng() % 3);
    if (n == 1) {
        c.model = "pauli";
        out.family = "cube";
        if (rng() & 1) {
            c.resource.kind = "magic_t_all";
        } else {
            c.resource.kind = "states";
            c.resource.states = {single_states[six(rng)]};
        }
        const std::size_t steps = 1 + rng() % 3;
        for (std::size_t k = 0; k < steps; ++k) {
            CircuitStep st;
            st.kind = CircuitStep::Kind::measure;
            for (const auto &h : all_histories(k)) {
                st.cases[h] = signed_1q[six(rng)];
            }
            c.steps.push_back(st);
        }
        return out;
    }
    if (variant == 2) {
        // Local model: graph state, adaptive destructive measurements.
        c.model = "local_pauli";
        out.family = "cube";
        c.resource.kind = "plus";
        c.graph = {{0, 1}};
        CircuitStep m0;
        m0.kind = CircuitStep::Kind::local_measure;
        m0.qubit = 0;
        m0.cases["*"] = std::string(1, "XYZ"[rng() % 3]);
        c.steps.push_back(m0);
        if (rng() & 1) {
            CircuitStep ff;
            ff.kind = CircuitStep::Kind::feedforward;
            ff.affine = {1};
            ff.constant = rng() & 1;
            c.steps.push_back(ff);
            CircuitStep m1;
            m1.kind = CircuitStep::Kind::local_measure;
            m1.qubit = 1;
            m1.cases["0"] = "X";
            m1.cases["1"] = std::string(1, "YZ"[rng() % 2]);
            c.steps.push_back(m1);
        }
        return out;
    }
    c.model = "pauli";
    out.family = "sp";
    c.resource.kind = "states";
    c.resource.states = {single_states[six(rng)], single_states[six(rng)]};
    const std::size_t steps = 1 + rng() % 3;
    for (std::size_t k = 0; k < steps; ++k) {
        CircuitStep st;
        st.kind = CircuitStep::Kind::measure;
        for (const auto &h : all_histories(k)) {
            st.cases[h] = format_pauli(random_hermitian_pauli(rng, 2));
        }
        c.steps.push_back(st);
    }
    return out;
}

}  // namespace polysim::testing
