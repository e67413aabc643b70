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

DenseOperator random_hermitian(std::mt19937_64 &rng, std::size_t dim) {
    std::normal_distribution<double> g;
    DenseOperator h(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
        h(r, r) = g(rng);
        for (std::size_t c = r + 1; c < dim; ++c) {
            h(r, c) = C(g(rng), g(rng));
            h(c, r) = std::conj(h(r, c));
        }
    }
    return h;
}

DenseOperator random_state(std::mt19937_64 &rng, std::size_t n) {
    auto g = random_hermitian(rng, std::size_t{1} << n);
    auto rho = g * g.adjoint();
    return rho * C(1.0 / rho.trace().real());
}

}  // namespace

TEST(Dense, EigenDecompositionReconstructs) {
    std::mt19937_64 rng(1);
    for (std::size_t dim : {1u, 2u, 4u, 8u, 16u}) {
        auto h = random_hermitian(rng, dim);
        auto e = hermitian_eigen(h);
        ASSERT_EQ(e.values.size(), dim);
        DenseOperator rebuilt(dim, dim);
        for (std::size_t k = 0; k < dim; ++k) {
            auto v = column(e.vectors[k]);
            rebuilt += v * v.adjoint() * C(e.values[k]);
            if (k) {
                EXPECT_LE(e.values[k - 1], e.values[k]);
            }
        }
        EXPECT_LT(max_abs_diff(rebuilt, h), 1e-9) << dim;
    }
    EXPECT_THROW(hermitian_eigen(DenseOperator::from_rows(2, 2, {0, 1, 0, 0})), InputError);
}

TEST(Dense, DegenerateSpectrumStaysOrthonormal) {
    auto h = ref_pauli("ZI") + ref_pauli("IZ");  // eigenvalues -2, 0, 0, 2
    auto e = hermitian_eigen(h);
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = 0; b < 4; ++b) {
            C ip = 0;
            for (std::size_t k = 0; k < 4; ++k) ip += std::conj(e.vectors[a][k]) * e.vectors[b][k];
            EXPECT_NEAR(std::abs(ip), a == b ? 1.0 : 0.0, 1e-9);
        }
    }
}

TEST(Dense, PartialTraceOfProducts) {
    std::mt19937_64 rng(2);
    auto a = random_state(rng, 1), b = random_state(rng, 2);
    auto ab = kron(a, b);
    EXPECT_LT(max_abs_diff(partial_trace(ab, 0), b), 1e-12);
    auto rest = partial_trace(partial_trace(ab, 2), 1);
    EXPECT_LT(max_abs_diff(rest, a), 1e-12);
    EXPECT_THROW(partial_trace(ab, 3), InputError);
}

TEST(Dense, StateValidation) {
    std::mt19937_64 rng(3);
    EXPECT_TRUE(validate_state(random_state(rng, 2)).ok);
    EXPECT_FALSE(validate_state(ref_pauli("Z")).ok);
    EXPECT_FALSE(validate_state(DenseOperator::identity(2)).ok);
}

TEST(Coeffs, RoundTripAndTrace) {
    std::mt19937_64 rng(4);
    for (std::size_t n = 1; n <= 3; ++n) {
        auto rho = random_state(rng, n);
        auto c = to_coeffs(rho);
        EXPECT_NEAR(c.trace(), 1.0, 1e-12);
        EXPECT_LT(max_abs_diff(from_coeffs(c), rho), 1e-12);
        // Coefficient of T_a is Tr(rho T_a) / 2^n.
        for (std::uint64_t a = 0; a < c.size(); ++a) {
            double want = (rho * ref_pauli(letters_of_code(n, a))).trace().real() / double(1u << n);
            EXPECT_NEAR(c[a], want, 1e-12);
        }
    }
    EXPECT_THROW(to_coeffs(DenseOperator::from_rows(2, 2, {0, 1, 0, 0})), InputError);
}

TEST(Instrument, MeasurementsAreTracePreserving) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = 1 + k % 3;
        auto b = random_hermitian_pauli(rng, n);
        auto m = pauli_measurement_instrument(b);
        EXPECT_LT(trace_preservation_error(m), 1e-12);
        auto rho = random_state(rng, n);
        auto p0 = apply_cp(m, 0, 0, rho).trace().real();
        auto want = (((DenseOperator::identity(std::size_t{1} << n) + ref_signed(b)) * C(0.5)) * rho).trace().real();
        EXPECT_NEAR(p0, want, 1e-12);
    }
}

TEST(Instrument, DestructiveMeasurementTracesOutTheQubit) {
    std::mt19937_64 rng(6);
    auto rho = random_state(rng, 2);
    auto m = pauli_measurement_instrument(parse_pauli("XI"), true, 0);
    EXPECT_EQ(m.output_dim, 2u);
    EXPECT_LT(trace_preservation_error(m), 1e-12);
    for (bool s : {false, true}) {
        auto proj = (DenseOperator::identity(4) + ref_pauli("XI") * C(s ? -1.0 : 1.0)) * C(0.5);
        auto want = partial_trace(proj * rho * proj, 0);
        EXPECT_LT(max_abs_diff(apply_cp(m, 0, s, rho), want), 1e-12);
    }
    EXPECT_THROW(pauli_measurement_instrument(parse_pauli("XZ"), true, 0), InputError);
}

TEST(Instrument, PreparationAndNamedStates) {
    auto t = magic_state();
    auto c = to_coeffs(t);
    EXPECT_NEAR(c[1], 0.5 / std::sqrt(2.0), 1e-12);  // X
    EXPECT_NEAR(c[3], 0.5 / std::sqrt(2.0), 1e-12);  // Y
    EXPECT_NEAR(c[2], 0.0, 1e-12);                   // Z
    auto prep = preparation_instrument(t);
    EXPECT_LT(max_abs_diff(apply_cp(prep, 0, 0, DenseOperator::identity(1)), t), 1e-12);
    EXPECT_THROW(named_state_vector("Q"), InputError);
    EXPECT_THROW(preparation_instrument(ref_pauli("Z")), InputError);
}

TEST(Instrument, FeedforwardIsAffine) {
    auto ff = feedforward_instrument({1, 0, 1}, true);
    EXPECT_EQ(ff.input_labels.size(), 8u);
    for (std::size_t a = 0; a < 8; ++a) {
        const auto &h = ff.input_labels[a];
        bool f = true ^ (h[0] == '1') ^ (h[2] == '1');
        EXPECT_NEAR(apply_cp(ff, a, f, DenseOperator::identity(1)).trace().real(), 1.0, 1e-15);
        EXPECT_NEAR(apply_cp(ff, a, !f, DenseOperator::identity(1)).trace().real(), 0.0, 1e-15);
    }
}

TEST(Instrument, GateUnitariesMatchReference) {
    for (auto k : {GateKind::H, GateKind::S, GateKind::X, GateKind::Y, GateKind::Z}) {
        for (std::size_t q = 0; q < 3; ++q) {
            auto g = CliffordGate::single(k, q);
            EXPECT_LT(max_abs_diff(gate_unitary(g, 3), ref_gate(g, 3)), 1e-12);
        }
    }
    for (auto k : {GateKind::CZ, GateKind::CNOT}) {
        auto g = CliffordGate::pair(k, 2, 0);
        EXPECT_LT(max_abs_diff(gate_unitary(g, 3), ref_gate(g, 3)), 1e-12);
    }
    auto t = gate_unitary("T", {0}, 1);
    EXPECT_NEAR(std::arg(t(1, 1)), std::numbers::pi / 4, 1e-12);
    EXPECT_THROW(gate_unitary("Q", {0}, 1), InputError);
}
