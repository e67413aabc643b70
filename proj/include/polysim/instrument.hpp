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

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polysim/dense.hpp"
#include "polysim/errors.hpp"
#include "polysim/pauli.hpp"

namespace polysim {

/// An adaptive instrument Gamma x Sigma -> CP(H, K) held as Kraus factors.
///
/// Kraus lists are indexed [a * |Sigma| + s]; an empty list is the zero map.
/// Factors are output_dim x input_dim, so destructive steps and state
/// preparations (input_dim 1) fit the same shape.
struct DenseInstrument {
    std::size_t input_dim = 1;
    std::size_t output_dim = 1;
    std::vector<std::string> input_labels{"*"};
    std::vector<std::string> outcome_labels{"*"};
    std::vector<std::vector<DenseOperator>> kraus;

    std::size_t num_inputs() const {
        return input_labels.size();
    }
    std::size_t num_outcomes() const {
        return outcome_labels.size();
    }

    const std::vector<DenseOperator> &ops(std::size_t a, std::size_t s) const {
        if (a >= num_inputs() || s >= num_outcomes()) {
            throw InputError("instrument: input/outcome index out of range");
        }
        return kraus[a * num_outcomes() + s];
    }
    std::vector<DenseOperator> &ops(std::size_t a, std::size_t s) {
        if (a >= num_inputs() || s >= num_outcomes()) {
            throw InputError("instrument: input/outcome index out of range");
        }
        return kraus[a * num_outcomes() + s];
    }

    std::size_t input_index(std::string_view label) const {
        return find(input_labels, label, "input");
    }
    std::size_t outcome_index(std::string_view label) const {
        return find(outcome_labels, label, "outcome");
    }

    /// Empty Kraus table of the right size.
    static DenseInstrument shaped(
        std::size_t in_dim,
        std::size_t out_dim,
        std::vector<std::string> inputs,
        std::vector<std::string> outcomes) {
        DenseInstrument out;
        out.input_dim = in_dim;
        out.output_dim = out_dim;
        out.input_labels = std::move(inputs);
        out.outcome_labels = std::move(outcomes);
        out.kraus.assign(out.input_labels.size() * out.outcome_labels.size(), {});
        return out;
    }

   private:
    static std::size_t find(const std::vector<std::string> &labels, std::string_view label, const char *what) {
        for (std::size_t k = 0; k < labels.size(); ++k) {
            if (labels[k] == label) {
                return k;
            }
        }
        throw InputError(std::string("instrument: unknown ") + what + " label '" + std::string(label) + "'");
    }
};

/// Phi_a^s(A) = sum_K K A K†.
inline DenseOperator apply_cp(const DenseInstrument &instr, std::size_t a, std::size_t s, const DenseOperator &op) {
    if (op.rows() != instr.input_dim || op.cols() != instr.input_dim) {
        throw InputError(
            "apply_cp: operator dimension " + std::to_string(op.rows()) + " does not match instrument input " +
            std::to_string(instr.input_dim));
    }
    DenseOperator out(instr.output_dim, instr.output_dim);
    for (const auto &k : instr.ops(a, s)) {
        out += k * op * k.adjoint();
    }
    return out;
}

inline DenseOperator apply_cp(
    const DenseInstrument &instr, std::string_view a, std::string_view s, const DenseOperator &op) {
    return apply_cp(instr, instr.input_index(a), instr.outcome_index(s), op);
}

/// Largest entrywise deviation of sum_s sum_K K†K from the identity, over inputs.
inline double trace_preservation_error(const DenseInstrument &instr) {
    double worst = 0;
    const auto id = DenseOperator::identity(instr.input_dim);
    for (std::size_t a = 0; a < instr.num_inputs(); ++a) {
        DenseOperator acc(instr.input_dim, instr.input_dim);
        for (std::size_t s = 0; s < instr.num_outcomes(); ++s) {
            for (const auto &k : instr.ops(a, s)) {
                acc += k.adjoint() * k;
            }
        }
        worst = std::max(worst, max_abs_diff(acc, id));
    }
    return worst;
}

inline void require_trace_preserving(const DenseInstrument &instr, double tol = 1e-9) {
    double err = trace_preservation_error(instr);
    if (err > tol) {
        throw VerificationError("instrument is not trace preserving (error " + std::to_string(err) + ")");
    }
}

/// Pi_b^s = (1 + (-1)^s B) / 2 for a Hermitian Pauli B.
inline DenseOperator pauli_projector(const PhasedPauli &b, bool s) {
    if (!b.is_hermitian()) {
        throw InputError("Pauli measurement needs a Hermitian operator (phase +-1)");
    }
    auto m = materialize(b);
    auto id = DenseOperator::identity(m.rows());
    return (s ? id - m : id + m) * 0.5;
}

/// Single-qubit gate matrices and the two-qubit CZ / CNOT, by name.
inline DenseOperator single_qubit_gate(std::string_view name) {
    using std::numbers::sqrt2;
    const Complex i{0, 1};
    auto m = [](Complex a, Complex b, Complex c, Complex d) {
        return DenseOperator::from_rows(2, 2, {a, b, c, d});
    };
    if (name == "I") return m(1, 0, 0, 1);
    if (name == "H") return m(1 / sqrt2, 1 / sqrt2, 1 / sqrt2, -1 / sqrt2);
    if (name == "S") return m(1, 0, 0, i);
    if (name == "Sdg") return m(1, 0, 0, -i);
    if (name == "X") return m(0, 1, 1, 0);
    if (name == "Y") return m(0, -i, i, 0);
    if (name == "Z") return m(1, 0, 0, -1);
    if (name == "T") return m(1, 0, 0, std::polar(1.0, std::numbers::pi / 4));
    if (name == "Tdg") return m(1, 0, 0, std::polar(1.0, -std::numbers::pi / 4));
    throw InputError("unknown single-qubit gate '" + std::string(name) + "'");
}

inline bool is_single_qubit_gate_name(std::string_view name) {
    for (auto g : {"I", "H", "S", "Sdg", "X", "Y", "Z", "T", "Tdg"}) {
        if (name == g) {
            return true;
        }
    }
    return false;
}

inline bool is_two_qubit_gate_name(std::string_view name) {
    return name == "CZ" || name == "CNOT";
}

/// The n-qubit unitary of a named gate on the given qubits.
inline DenseOperator gate_unitary(std::string_view name, const std::vector<std::size_t> &qubits, std::size_t n) {
    DenseOperator::check_dense_qubits(n);
    for (auto q : qubits) {
        if (q >= n) {
            throw InputError("gate " + std::string(name) + ": qubit " + std::to_string(q) + " out of range");
        }
    }
    const std::size_t dim = std::size_t{1} << n;
    if (is_single_qubit_gate_name(name)) {
        if (qubits.size() != 1) {
            throw InputError("gate " + std::string(name) + " takes one qubit");
        }
        DenseOperator out = DenseOperator::identity(1);
        for (std::size_t q = 0; q < n; ++q) {
            out = kron(out, q == qubits[0] ? single_qubit_gate(name) : DenseOperator::identity(2));
        }
        return out;
    }
    if (is_two_qubit_gate_name(name)) {
        if (qubits.size() != 2 || qubits[0] == qubits[1]) {
            throw InputError("gate " + std::string(name) + " takes two distinct qubits");
        }
        const std::size_t cbit = std::size_t{1} << (n - 1 - qubits[0]);
        const std::size_t tbit = std::size_t{1} << (n - 1 - qubits[1]);
        DenseOperator out(dim, dim);
        for (std::size_t k = 0; k < dim; ++k) {
            bool c = k & cbit;
            if (name == "CZ") {
                out(k, k) = (c && (k & tbit)) ? -1.0 : 1.0;
            } else {
                out(c ? k ^ tbit : k, k) = 1.0;
            }
        }
        return out;
    }
    throw InputError("unknown gate '" + std::string(name) + "'");
}

inline DenseOperator gate_unitary(const CliffordGate &g, std::size_t n) {
    std::vector<std::size_t> qs{g.q0};
    if (is_two_qubit(g.kind)) {
        qs.push_back(g.q1);
    }
    return gate_unitary(gate_name(g.kind), qs, n);
}

inline std::vector<std::string> bit_labels() {
    return {"0", "1"};
}

/// Channel A -> U A U†, identical for every input label.
inline DenseInstrument unitary_instrument(const DenseOperator &u, std::vector<std::string> inputs = {"*"}) {
    if (!u.is_square()) {
        throw InputError("unitary_instrument: matrix is not square");
    }
    auto out = DenseInstrument::shaped(u.rows(), u.rows(), std::move(inputs), {"*"});
    for (auto &k : out.kraus) {
        k = {u};
    }
    return out;
}

/// Kraus factors of the partial trace over `qubit` composed after `pre`.
inline std::vector<DenseOperator> traced_out(const DenseOperator &pre, std::size_t qubit, std::size_t n) {
    std::vector<DenseOperator> out;
    for (std::size_t k = 0; k < 2; ++k) {
        DenseOperator e = DenseOperator::identity(1);
        for (std::size_t q = 0; q < n; ++q) {
            if (q == qubit) {
                DenseOperator bra(1, 2);
                bra(0, k) = 1.0;
                e = kron(e, bra);
            } else {
                e = kron(e, DenseOperator::identity(2));
            }
        }
        out.push_back(e * pre);
    }
    return out;
}

/// Measurement of a Hermitian Pauli. Non-destructive: Kraus {Pi_b^s}.
/// Destructive: b must act on `qubit` alone, which is traced out afterwards.
inline DenseInstrument pauli_measurement_instrument(
    const PhasedPauli &b, bool destructive = false, std::optional<std::size_t> qubit = std::nullopt) {
    if (!b.is_hermitian()) {
        throw InputError("pauli_measurement_instrument: non-Hermitian operator");
    }
    const std::size_t n = b.num_qubits();
    DenseOperator::check_dense_qubits(n);
    const std::size_t dim = std::size_t{1} << n;
    if (!destructive) {
        auto out = DenseInstrument::shaped(dim, dim, {"*"}, bit_labels());
        for (bool s : {false, true}) {
            out.ops(0, s) = {pauli_projector(b, s)};
        }
        return out;
    }
    if (!qubit || *qubit >= n) {
        throw InputError("destructive measurement needs a target qubit in range");
    }
    for (std::size_t q = 0; q < n; ++q) {
        if (q != *qubit && (b.index.x(q) || b.index.z(q))) {
            throw InputError("destructive measurement operator must act on the target qubit only");
        }
    }
    auto out = DenseInstrument::shaped(dim, dim / 2, {"*"}, bit_labels());
    for (bool s : {false, true}) {
        out.ops(0, s) = traced_out(pauli_projector(b, s), *qubit, n);
    }
    return out;
}

/// Single-qubit pure states by name: 0 1 + - +i -i T.
/// "T" is T|+>, the magic state rho_T with Bloch vector (1/sqrt2, 1/sqrt2, 0).
inline std::vector<Complex> named_state_vector(std::string_view name) {
    using std::numbers::sqrt2;
    const Complex i{0, 1};
    if (name == "0") return {1, 0};
    if (name == "1") return {0, 1};
    if (name == "+") return {1 / sqrt2, 1 / sqrt2};
    if (name == "-") return {1 / sqrt2, -1 / sqrt2};
    if (name == "+i") return {1 / sqrt2, i / sqrt2};
    if (name == "-i") return {1 / sqrt2, -i / sqrt2};
    if (name == "T") return {1 / sqrt2, std::polar(1.0, std::numbers::pi / 4) / sqrt2};
    throw InputError("unknown single-qubit state '" + std::string(name) + "'");
}

inline DenseOperator pure_density(std::span<const Complex> amplitudes) {
    auto ket = column(amplitudes);
    return ket * ket.adjoint();
}

inline DenseOperator magic_state() {
    return pure_density(named_state_vector("T"));
}

/// Preparation C -> H of a density operator: alpha -> alpha rho.
inline DenseInstrument preparation_instrument(const DenseOperator &rho, double tol = 1e-9) {
    auto check = validate_state(rho, tol);
    if (!check.ok) {
        throw InputError("preparation_instrument: input is not a density operator");
    }
    auto eig = hermitian_eigen(rho);
    auto out = DenseInstrument::shaped(1, rho.rows(), {"*"}, {"*"});
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
        if (eig.values[k] <= tol) {
            continue;
        }
        auto ket = column(eig.vectors[k]);
        out.ops(0, 0).push_back(ket * Complex(std::sqrt(eig.values[k])));
    }
    return out;
}

inline DenseInstrument pure_preparation(std::span<const Complex> amplitudes) {
    auto out = DenseInstrument::shaped(1, amplitudes.size(), {"*"}, {"*"});
    out.ops(0, 0) = {column(amplitudes)};
    return out;
}

/// Classical feedforward C -> C: (Phi_L)_a^s(alpha) = delta_{s, f(a)} alpha with
/// f(a) = affine . a + constant over Z2. Input labels are history bit strings.
inline DenseInstrument feedforward_instrument(const std::vector<std::uint8_t> &affine, bool constant) {
    const std::size_t k = affine.size();
    if (k > 20) {
        throw InputError("feedforward: history too long");
    }
    std::vector<std::string> inputs;
    for (std::uint64_t h = 0; h < (std::uint64_t{1} << k); ++h) {
        std::string label;
        for (std::size_t j = 0; j < k; ++j) {
            label.push_back(((h >> (k - 1 - j)) & 1) ? '1' : '0');
        }
        inputs.push_back(label);
    }
    auto out = DenseInstrument::shaped(1, 1, inputs, bit_labels());
    for (std::size_t a = 0; a < inputs.size(); ++a) {
        bool f = constant;
        for (std::size_t j = 0; j < k; ++j) {
            f ^= (affine[j] & 1) && inputs[a][j] == '1';
        }
        out.ops(a, f) = {DenseOperator::identity(1)};
    }
    return out;
}

}  // namespace polysim
