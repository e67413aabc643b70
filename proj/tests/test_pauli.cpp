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

#include <gtest/gtest.h>

#include "support.hpp"

using namespace polysim;
using namespace polysim::testing;

namespace {

PhasedPauli hermitian_of_code(std::size_t n, std::uint64_t code) {
    return PhasedPauli(0, PauliIndex::from_code(n, code));
}

bool dense_commute(const DenseOperator &a, const DenseOperator &b) {
    return max_abs_diff(a * b, b * a) < 1e-12;
}

}  // namespace

TEST(Pauli, MaterializeMatchesLetters) {
    for (std::size_t n = 1; n <= 3; ++n) {
        for (std::uint64_t c = 0; c < (1u << (2 * n)); ++c) {
            auto p = hermitian_of_code(n, c);
            EXPECT_LT(max_abs_diff(materialize(p), ref_pauli(letters_of_code(n, c))), 1e-15) << c;
        }
    }
}

TEST(Pauli, SymplecticFormExhaustive) {
    for (std::size_t n = 1; n <= 2; ++n) {
        const std::uint64_t m = 1u << (2 * n);
        for (std::uint64_t a = 0; a < m; ++a) {
            for (std::uint64_t b = 0; b < m; ++b) {
                auto pa = PauliIndex::from_code(n, a), pb = PauliIndex::from_code(n, b);
                bool comm = dense_commute(ref_pauli(letters_of_code(n, a)), ref_pauli(letters_of_code(n, b)));
                EXPECT_EQ(omega(pa, pb), !comm);
                EXPECT_EQ(omega(pa, pb), omega(pb, pa));
            }
        }
    }
}

TEST(Pauli, SignFunctionExhaustive) {
    for (std::size_t n = 1; n <= 2; ++n) {
        const std::uint64_t m = 1u << (2 * n);
        for (std::uint64_t a = 0; a < m; ++a) {
            for (std::uint64_t b = 0; b < m; ++b) {
                auto pa = PauliIndex::from_code(n, a), pb = PauliIndex::from_code(n, b);
                if (omega(pa, pb)) {
                    EXPECT_THROW(beta(pa, pb), PreconditionError);
                    continue;
                }
                auto prod = ref_pauli(letters_of_code(n, a)) * ref_pauli(letters_of_code(n, b));
                auto sum = ref_pauli(letters_of_code(n, a ^ b));
                double sign = beta(pa, pb) ? -1.0 : 1.0;
                EXPECT_LT(max_abs_diff(prod, sum * C(sign)), 1e-12) << a << " " << b;
            }
        }
    }
}

TEST(Pauli, SignFunctionIdentities) {
    const std::size_t n = 2;
    for (std::uint64_t a = 0; a < 16; ++a) {
        auto pa = PauliIndex::from_code(n, a);
        EXPECT_FALSE(beta(pa, pa));
        EXPECT_FALSE(beta(pa, PauliIndex(n)));
    }
}

TEST(Pauli, ProductMatchesDense) {
    const std::size_t n = 2;
    for (std::uint64_t a = 0; a < 16; ++a) {
        for (std::uint64_t b = 0; b < 16; ++b) {
            for (unsigned t = 0; t < 4; ++t) {
                PhasedPauli p(t, PauliIndex::from_code(n, a)), q(1, PauliIndex::from_code(n, b));
                EXPECT_LT(max_abs_diff(materialize(multiply(p, q)), materialize(p) * materialize(q)), 1e-12);
            }
        }
    }
}

TEST(Pauli, ConjugationMatchesDenseForEveryGate) {
    const std::size_t n = 2;
    std::vector<CliffordGate> gates;
    for (auto k : {GateKind::H, GateKind::S, GateKind::X, GateKind::Y, GateKind::Z}) {
        gates.push_back(CliffordGate::single(k, 0));
        gates.push_back(CliffordGate::single(k, 1));
    }
    for (auto k : {GateKind::CZ, GateKind::CNOT}) {
        gates.push_back(CliffordGate::pair(k, 0, 1));
        gates.push_back(CliffordGate::pair(k, 1, 0));
    }
    for (const auto &g : gates) {
        auto u = ref_gate(g, n);
        for (std::uint64_t a = 0; a < 16; ++a) {
            auto p = hermitian_of_code(n, a);
            auto got = conjugate(g, p);
            EXPECT_TRUE(got.is_hermitian());
            EXPECT_LT(max_abs_diff(materialize(got), conj_by(u, materialize(p))), 1e-12)
                << gate_name(g.kind) << " " << format_pauli(p);
        }
    }
}

TEST(Pauli, ConjugationAcrossWordBoundary) {
    // n = 130 puts qubits 3 and 129 in different 64-bit words; the action
    // must equal the 2-qubit action embedded at those positions.
    const std::size_t n = 130;
    for (auto k : {GateKind::CZ, GateKind::CNOT}) {
        for (std::uint64_t a = 0; a < 16; ++a) {
            PauliIndex big(n);
            auto small = PauliIndex::from_code(2, a);
            big.set_x(3, small.x(0));
            big.set_z(3, small.z(0));
            big.set_x(129, small.x(1));
            big.set_z(129, small.z(1));
            auto rb = conjugate(CliffordGate::pair(k, 3, 129), PhasedPauli(0, big));
            auto rs = conjugate(CliffordGate::pair(k, 0, 1), PhasedPauli(0, small));
            EXPECT_EQ(rb.phase, rs.phase);
            EXPECT_EQ(rb.index.x(3), rs.index.x(0));
            EXPECT_EQ(rb.index.z(129), rs.index.z(1));
            EXPECT_EQ(rb.index.weight(), rs.index.weight());
        }
    }
}

TEST(Pauli, ParseFormatRoundTrip) {
    for (const char *s : {"+X", "-Y", "+IZ", "-XYZI", "+I"}) {
        EXPECT_EQ(format_pauli(parse_pauli(s)), s);
    }
    EXPECT_EQ(format_pauli(parse_pauli("XZ")), "+XZ");
    EXPECT_THROW(parse_pauli(""), InputError);
    EXPECT_THROW(parse_pauli("+XQ"), InputError);
    EXPECT_THROW(parse_pauli("-"), InputError);
}

TEST(Pauli, SizeMismatchRejected) {
    EXPECT_THROW(omega(PauliIndex(1), PauliIndex(2)), InputError);
    EXPECT_THROW(conjugate(CliffordGate::single(GateKind::H, 3), PhasedPauli::identity(2)), InputError);
    EXPECT_THROW(CliffordGate::pair(GateKind::CNOT, 1, 1), InputError);
}

TEST(Rng, SplitSeedIsDeterministicAndDistinct) {
    EXPECT_EQ(split_seed(7, 3), split_seed(7, 3));
    EXPECT_NE(split_seed(7, 3), split_seed(7, 4));
    EXPECT_NE(split_seed(7, 3), split_seed(8, 3));
}
