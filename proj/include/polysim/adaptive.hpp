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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polysim/dense.hpp"
#include "polysim/errors.hpp"
#include "polysim/geometry.hpp"
#include "polysim/instrument.hpp"
#include "polysim/pauli.hpp"

namespace polysim {

// ---------------------------------------------------------------------------
// Composition laws.

namespace detail {

inline bool is_wildcard(const std::vector<std::string> &labels) {
    return labels.size() == 1 && labels.front() == "*";
}

}  // namespace detail

/// (Psi * Phi)_a^{s r} = Psi_s^r o Phi_a^s.
inline DenseInstrument star_compose(const DenseInstrument &phi, const DenseInstrument &psi) {
    if (psi.input_dim != phi.output_dim) {
        throw InputError("star_compose: Hilbert spaces do not chain");
    }
    const bool wildcard = detail::is_wildcard(psi.input_labels);
    if (!wildcard && psi.input_labels != phi.outcome_labels) {
        throw InputError("star_compose: input set does not match the outcome set");
    }
    auto out = DenseInstrument::shaped(
        phi.input_dim, psi.output_dim, phi.input_labels, product_labels(phi.outcome_labels, psi.outcome_labels));
    for (std::size_t a = 0; a < phi.num_inputs(); ++a) {
        for (std::size_t s = 0; s < phi.num_outcomes(); ++s) {
            for (std::size_t r = 0; r < psi.num_outcomes(); ++r) {
                auto &ops = out.ops(a, s * psi.num_outcomes() + r);
                for (const auto &k2 : psi.ops(wildcard ? 0 : s, r)) {
                    for (const auto &k1 : phi.ops(a, s)) {
                        ops.push_back(k2 * k1);
                    }
                }
            }
        }
    }
    return out;
}

/// (Psi o Phi)_{a1 a2}^{s1 s2} = Psi_{a2}^{s2} o Phi_{a1}^{s1}.
inline DenseInstrument horizontal_compose(const DenseInstrument &phi, const DenseInstrument &psi) {
    if (psi.input_dim != phi.output_dim) {
        throw InputError("horizontal_compose: Hilbert spaces do not chain");
    }
    auto out = DenseInstrument::shaped(
        phi.input_dim, psi.output_dim, product_labels(phi.input_labels, psi.input_labels),
        product_labels(phi.outcome_labels, psi.outcome_labels));
    for (std::size_t a1 = 0; a1 < phi.num_inputs(); ++a1) {
        for (std::size_t a2 = 0; a2 < psi.num_inputs(); ++a2) {
            for (std::size_t s1 = 0; s1 < phi.num_outcomes(); ++s1) {
                for (std::size_t s2 = 0; s2 < psi.num_outcomes(); ++s2) {
                    auto &ops = out.ops(a1 * psi.num_inputs() + a2, s1 * psi.num_outcomes() + s2);
                    for (const auto &k2 : psi.ops(a2, s2)) {
                        for (const auto &k1 : phi.ops(a1, s1)) {
                            ops.push_back(k2 * k1);
                        }
                    }
                }
            }
        }
    }
    return out;
}

/// (Psi . Phi)_a^s = sum_b Phi_a^b (x) Psi_b^s; Phi's space is the first
/// tensor factor.
inline DenseInstrument vertical_compose(const DenseInstrument &phi, const DenseInstrument &psi) {
    const bool wildcard = detail::is_wildcard(psi.input_labels);
    if (!wildcard && psi.input_labels != phi.outcome_labels) {
        throw InputError("vertical_compose: classical sets do not chain");
    }
    auto out = DenseInstrument::shaped(
        phi.input_dim * psi.input_dim, phi.output_dim * psi.output_dim, phi.input_labels, psi.outcome_labels);
    for (std::size_t a = 0; a < phi.num_inputs(); ++a) {
        for (std::size_t s = 0; s < psi.num_outcomes(); ++s) {
            auto &ops = out.ops(a, s);
            for (std::size_t b = 0; b < phi.num_outcomes(); ++b) {
                for (const auto &k1 : phi.ops(a, b)) {
                    for (const auto &k2 : psi.ops(wildcard ? 0 : b, s)) {
                        ops.push_back(kron(k1, k2));
                    }
                }
            }
        }
    }
    return out;
}

/// Largest entrywise difference between the actions of two instruments on
/// every matrix unit; Kraus representations may differ.
inline double action_distance(const DenseInstrument &phi, const DenseInstrument &psi) {
    if (phi.input_dim != psi.input_dim || phi.output_dim != psi.output_dim ||
        phi.input_labels != psi.input_labels || phi.outcome_labels != psi.outcome_labels) {
        return std::numeric_limits<double>::infinity();
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < phi.input_dim; ++r) {
        for (std::size_t c = 0; c < phi.input_dim; ++c) {
            DenseOperator unit(phi.input_dim, phi.input_dim);
            unit(r, c) = 1.0;
            for (std::size_t a = 0; a < phi.num_inputs(); ++a) {
                for (std::size_t s = 0; s < phi.num_outcomes(); ++s) {
                    worst = std::max(worst, max_abs_diff(apply_cp(phi, a, s, unit), apply_cp(psi, a, s, unit)));
                }
            }
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Circuit description.

struct CircuitStep {
    enum class Kind { gate, measure, local_measure, feedforward };
    Kind kind = Kind::gate;
    std::string gate;
    std::vector<std::size_t> qubits;
    /// History bit string (or "*") -> signed Pauli string.
    std::map<std::string, std::string> cases;
    std::size_t qubit = 0;
    std::vector<std::uint8_t> affine;
    bool constant = false;
};

struct Resource {
    /// zeros | plus | magic_t_all | states | explicit
    std::string kind = "zeros";
    /// Per-qubit state names for kind == states.
    std::vector<std::string> states;
    std::optional<DenseOperator> rho;
};

struct Circuit {
    /// clifford | pauli | local_pauli
    std::string model = "clifford";
    std::size_t n = 1;
    Resource resource;
    std::vector<std::pair<std::size_t, std::size_t>> graph;
    std::vector<CircuitStep> steps;
};

inline const char *step_kind_name(CircuitStep::Kind k) {
    switch (k) {
        case CircuitStep::Kind::gate:
            return "gate";
        case CircuitStep::Kind::measure:
            return "measure";
        case CircuitStep::Kind::local_measure:
            return "local_measure";
        case CircuitStep::Kind::feedforward:
            return "feedforward";
    }
    return "?";
}

inline Resource default_resource(std::string_view model) {
    Resource r;
    r.kind = model == "pauli" ? "magic_t_all" : model == "local_pauli" ? "plus" : "zeros";
    return r;
}

/// Per-qubit state names of a product resource, or nothing for explicit.
inline std::optional<std::vector<std::string>> resource_state_names(const Resource &r, std::size_t n) {
    if (r.kind == "zeros") {
        return std::vector<std::string>(n, "0");
    }
    if (r.kind == "plus") {
        return std::vector<std::string>(n, "+");
    }
    if (r.kind == "magic_t_all") {
        return std::vector<std::string>(n, "T");
    }
    if (r.kind == "states") {
        return r.states;
    }
    return std::nullopt;
}

namespace detail {

inline std::string step_error(std::size_t index, const std::string &what) {
    return "step " + std::to_string(index) + ": " + what;
}

/// Live qubit positions before each step (destructive steps remove one).
struct LiveQubits {
    std::vector<std::size_t> order;

    std::size_t position(std::size_t qubit, std::size_t step) const {
        auto it = std::find(order.begin(), order.end(), qubit);
        if (it == order.end()) {
            throw InputError(step_error(step, "qubit " + std::to_string(qubit) + " is not available"));
        }
        return static_cast<std::size_t>(it - order.begin());
    }
};

inline std::vector<std::string> histories(std::size_t h) {
    if (h > 16) {
        throw InputError("outcome history too long for explicit case tables");
    }
    std::vector<std::string> out;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << h); ++v) {
        std::string label;
        for (std::size_t j = 0; j < h; ++j) {
            label.push_back(((v >> (h - 1 - j)) & 1) ? '1' : '0');
        }
        out.push_back(label);
    }
    return out;
}

inline bool is_bit_string(const std::string &s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c == '0' || c == '1'; });
}

/// Case lookup with the "*" default.
inline const std::string &resolve_case(
    const std::map<std::string, std::string> &cases, const std::string &key, std::size_t step) {
    auto it = cases.find(key);
    if (it == cases.end()) {
        it = cases.find("*");
    }
    if (it == cases.end()) {
        throw InputError(step_error(step, "no case for history '" + key + "'"));
    }
    return it->second;
}

inline void check_case_keys(
    const std::map<std::string, std::string> &cases, std::size_t arity, std::size_t step) {
    if (cases.empty()) {
        throw InputError(step_error(step, "measurement needs at least one case"));
    }
    for (const auto &[key, _] : cases) {
        if (key != "*" && (key.size() != arity || !is_bit_string(key))) {
            throw InputError(step_error(step, "case key '" + key + "' must be '*' or " + std::to_string(arity) + " bits"));
        }
    }
}

inline PhasedPauli parse_step_pauli(const std::string &text, std::size_t width, std::size_t step) {
    PhasedPauli p;
    try {
        p = parse_pauli(text);
    } catch (const InputError &e) {
        throw InputError(step_error(step, e.what()));
    }
    if (p.num_qubits() != width) {
        throw InputError(step_error(
            step, "Pauli '" + text + "' has " + std::to_string(p.num_qubits()) + " qubits, expected " +
                      std::to_string(width)));
    }
    if (p.index.is_identity()) {
        throw InputError(step_error(step, "cannot measure the identity"));
    }
    return p;
}

}  // namespace detail

/// Checks model/step compatibility, qubit ranges, case arities, feedforward
/// arity and placement, and one destructive measurement per qubit. Errors
/// name the step index.
inline void validate_circuit(const Circuit &c) {
    if (c.model != "clifford" && c.model != "pauli" && c.model != "local_pauli") {
        throw InputError("unknown model '" + c.model + "'");
    }
    if (c.n == 0) {
        throw InputError("circuit needs n >= 1");
    }
    if (auto names = resource_state_names(c.resource, c.n)) {
        if (names->size() != c.n) {
            throw InputError("resource: expected " + std::to_string(c.n) + " states");
        }
        for (const auto &s : *names) {
            named_state_vector(s);
        }
    } else if (c.resource.kind == "explicit") {
        if (!c.resource.rho || c.resource.rho->rows() != (std::size_t{1} << std::min<std::size_t>(c.n, 30))) {
            throw InputError("resource: explicit state has the wrong dimension");
        }
    } else {
        throw InputError("unknown resource kind '" + c.resource.kind + "'");
    }
    if (!c.graph.empty() && c.model != "local_pauli") {
        throw InputError("graph edges are only allowed in the local_pauli model");
    }
    for (const auto &[i, j] : c.graph) {
        if (i >= c.n || j >= c.n || i == j) {
            throw InputError("graph: invalid edge");
        }
    }
    detail::LiveQubits live;
    for (std::size_t q = 0; q < c.n; ++q) {
        live.order.push_back(q);
    }
    std::size_t history = 0;
    for (std::size_t k = 0; k < c.steps.size(); ++k) {
        const auto &st = c.steps[k];
        using K = CircuitStep::Kind;
        const bool local = c.model == "local_pauli";
        if ((st.kind == K::gate && c.model != "clifford") || (st.kind == K::measure && local) ||
            ((st.kind == K::local_measure || st.kind == K::feedforward) && !local)) {
            throw InputError(detail::step_error(
                k, std::string(step_kind_name(st.kind)) + " steps are not allowed in the " + c.model + " model"));
        }
        switch (st.kind) {
            case K::gate: {
                const bool two = is_two_qubit_gate_name(st.gate);
                if (!two && !is_single_qubit_gate_name(st.gate)) {
                    throw InputError(detail::step_error(k, "unknown gate '" + st.gate + "'"));
                }
                if (st.qubits.size() != (two ? 2u : 1u)) {
                    throw InputError(detail::step_error(k, "wrong number of qubits for " + st.gate));
                }
                for (auto q : st.qubits) {
                    if (q >= c.n) {
                        throw InputError(detail::step_error(k, "qubit " + std::to_string(q) + " out of range"));
                    }
                }
                if (two && st.qubits[0] == st.qubits[1]) {
                    throw InputError(detail::step_error(k, "two-qubit gate needs distinct qubits"));
                }
                break;
            }
            case K::measure: {
                detail::check_case_keys(st.cases, history, k);
                for (const auto &[_, text] : st.cases) {
                    detail::parse_step_pauli(text, c.n, k);
                }
                ++history;
                break;
            }
            case K::feedforward: {
                if (st.affine.size() != history) {
                    throw InputError(detail::step_error(
                        k, "feedforward needs " + std::to_string(history) + " affine coefficients"));
                }
                for (auto bit : st.affine) {
                    if (bit > 1) {
                        throw InputError(detail::step_error(k, "feedforward coefficients must be bits"));
                    }
                }
                if (k + 1 >= c.steps.size() || c.steps[k + 1].kind != K::local_measure) {
                    throw InputError(detail::step_error(k, "feedforward must be followed by a local_measure"));
                }
                break;
            }
            case K::local_measure: {
                const bool fed = k > 0 && c.steps[k - 1].kind == K::feedforward;
                detail::check_case_keys(st.cases, fed ? 1 : history, k);
                for (const auto &[_, text] : st.cases) {
                    detail::parse_step_pauli(text, 1, k);
                }
                if (st.qubit >= c.n) {
                    throw InputError(detail::step_error(k, "qubit " + std::to_string(st.qubit) + " out of range"));
                }
                auto pos = live.position(st.qubit, k);
                live.order.erase(live.order.begin() + static_cast<std::ptrdiff_t>(pos));
                ++history;
                break;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Adaptive computations.

/// Phi_0 .. Phi_N as dense instruments. Step 0 is the preparation C -> H_1.
/// An input set {"*"} ignores the history; an outcome set {"*"} adds nothing
/// to it. Otherwise inputs are history bit strings and outcomes are bits.
struct AdaptiveComputation {
    std::vector<DenseInstrument> steps;
    std::vector<std::string> tags;

    std::size_t num_qubits_after(std::size_t step) const {
        return static_cast<std::size_t>(std::countr_zero(steps.at(step).output_dim));
    }
};

inline std::size_t input_for(const DenseInstrument &phi, const std::string &history) {
    return detail::is_wildcard(phi.input_labels) ? 0 : phi.input_index(history);
}

inline std::string extend_history(const std::string &history, const std::string &outcome) {
    return outcome == "*" ? history : history + outcome;
}

/// Check that every step is trace preserving per input.
inline void validate_computation(const AdaptiveComputation &comp, double tol = 1e-9) {
    if (comp.steps.empty() || comp.steps.front().input_dim != 1) {
        throw InputError("computation must start with a preparation from the scalars");
    }
    for (std::size_t k = 0; k < comp.steps.size(); ++k) {
        if (k > 0 && comp.steps[k].input_dim != comp.steps[k - 1].output_dim) {
            throw InputError(detail::step_error(k, "Hilbert-space dimensions do not chain"));
        }
        if (trace_preservation_error(comp.steps[k]) > tol) {
            throw VerificationError(detail::step_error(k, "instrument is not trace preserving"));
        }
    }
}

/// Phi_P . ... . Phi_P: product preparation.
inline DenseInstrument product_preparation(const std::vector<std::string> &names) {
    DenseInstrument out = DenseInstrument::shaped(1, 1, {"*"}, {"*"});
    out.ops(0, 0) = {DenseOperator::identity(1)};
    for (const auto &name : names) {
        out = vertical_compose(out, pure_preparation(named_state_vector(name)));
    }
    return out;
}

inline DenseInstrument resource_preparation(const Resource &r, std::size_t n) {
    DenseOperator::check_dense_qubits(n);
    if (auto names = resource_state_names(r, n)) {
        return product_preparation(*names);
    }
    return preparation_instrument(*r.rho);
}

namespace detail {

/// Non-destructive measurement whose operator depends on the history.
inline DenseInstrument adaptive_measurement(
    const std::map<std::string, std::string> &cases, std::size_t history, std::size_t n, std::size_t step,
    std::optional<std::size_t> destroy = std::nullopt, std::size_t live = 0) {
    const bool single = cases.size() == 1 && (history == 0 || cases.begin()->first == "*");
    auto build = [&](const std::string &text) {
        if (destroy) {
            auto letter = parse_step_pauli(text, 1, step);
            PhasedPauli b{letter.phase, PauliIndex(live)};
            b.index.set_x(*destroy, letter.index.x(0));
            b.index.set_z(*destroy, letter.index.z(0));
            return pauli_measurement_instrument(b, true, *destroy);
        }
        return pauli_measurement_instrument(parse_step_pauli(text, n, step));
    };
    if (single) {
        return build(cases.begin()->second);
    }
    auto inputs = histories(history);
    const std::size_t dim = std::size_t{1} << (destroy ? live : n);
    auto out = DenseInstrument::shaped(dim, destroy ? dim / 2 : dim, inputs, bit_labels());
    for (std::size_t a = 0; a < inputs.size(); ++a) {
        auto one = build(resolve_case(cases, inputs[a], step));
        for (std::size_t s = 0; s < 2; ++s) {
            out.ops(a, s) = one.ops(0, s);
        }
    }
    return out;
}

inline DenseInstrument graph_entangler(const std::vector<std::pair<std::size_t, std::size_t>> &graph, std::size_t n) {
    DenseOperator u = DenseOperator::identity(std::size_t{1} << n);
    for (const auto &[i, j] : graph) {
        u = gate_unitary("CZ", {i, j}, n) * u;
    }
    return unitary_instrument(u);
}

}  // namespace detail

/// Clifford model: preparation, then gates and adaptive Pauli measurements.
inline AdaptiveComputation build_clifford_model(const Circuit &c) {
    if (c.model != "clifford") {
        throw InputError("build_clifford_model: model must be clifford");
    }
    validate_circuit(c);
    AdaptiveComputation comp;
    comp.steps.push_back(resource_preparation(c.resource, c.n));
    comp.tags.push_back("prepare");
    std::size_t history = 0;
    for (std::size_t k = 0; k < c.steps.size(); ++k) {
        const auto &st = c.steps[k];
        if (st.kind == CircuitStep::Kind::gate) {
            comp.steps.push_back(unitary_instrument(gate_unitary(st.gate, st.qubits, c.n)));
            comp.tags.push_back("gate");
        } else {
            comp.steps.push_back(detail::adaptive_measurement(st.cases, history, c.n, k));
            comp.tags.push_back("pauli_measure");
            ++history;
        }
    }
    return comp;
}

/// Pauli model: Phi_0 prepares the resource (rho_T on every qubit by
/// default); each later step is a non-destructive Pauli measurement chosen by
/// the full outcome history.
inline AdaptiveComputation build_pauli_model(const Circuit &c) {
    if (c.model != "pauli") {
        throw InputError("build_pauli_model: model must be pauli");
    }
    validate_circuit(c);
    AdaptiveComputation comp;
    comp.steps.push_back(resource_preparation(c.resource, c.n));
    comp.tags.push_back("prepare");
    for (std::size_t k = 0; k < c.steps.size(); ++k) {
        comp.steps.push_back(detail::adaptive_measurement(c.steps[k].cases, k, c.n, k));
        comp.tags.push_back("pauli_measure");
    }
    return comp;
}

/// Local Pauli model: Phi_0 = Phi_E o (Phi_P . ... . Phi_P) with the graph
/// entangler; then destructive single-qubit measurements, each optionally
/// preceded by an affine feedforward composed vertically into it.
inline AdaptiveComputation build_local_pauli_model(const Circuit &c) {
    if (c.model != "local_pauli") {
        throw InputError("build_local_pauli_model: model must be local_pauli");
    }
    validate_circuit(c);
    AdaptiveComputation comp;
    auto prep = resource_preparation(c.resource, c.n);
    if (!c.graph.empty()) {
        prep = horizontal_compose(prep, detail::graph_entangler(c.graph, c.n));
    }
    comp.steps.push_back(std::move(prep));
    comp.tags.push_back("prepare");
    detail::LiveQubits live;
    for (std::size_t q = 0; q < c.n; ++q) {
        live.order.push_back(q);
    }
    std::size_t history = 0;
    for (std::size_t k = 0; k < c.steps.size(); ++k) {
        const auto &st = c.steps[k];
        if (st.kind == CircuitStep::Kind::feedforward) {
            continue;
        }
        auto pos = live.position(st.qubit, k);
        const bool fed = k > 0 && c.steps[k - 1].kind == CircuitStep::Kind::feedforward;
        auto meas = detail::adaptive_measurement(st.cases, fed ? 1 : history, 0, k, pos, live.order.size());
        if (fed) {
            const auto &ff = c.steps[k - 1];
            if (detail::is_wildcard(meas.input_labels)) {
                auto widened = DenseInstrument::shaped(meas.input_dim, meas.output_dim, bit_labels(), meas.outcome_labels);
                for (std::size_t b = 0; b < 2; ++b) {
                    for (std::size_t s = 0; s < 2; ++s) {
                        widened.ops(b, s) = meas.ops(0, s);
                    }
                }
                meas = std::move(widened);
            }
            meas = vertical_compose(feedforward_instrument(ff.affine, ff.constant), meas);
            comp.tags.push_back("feedforward+local_measure");
        } else {
            comp.tags.push_back("local_measure");
        }
        comp.steps.push_back(std::move(meas));
        live.order.erase(live.order.begin() + static_cast<std::ptrdiff_t>(pos));
        ++history;
    }
    return comp;
}

inline AdaptiveComputation build_computation(const Circuit &c) {
    if (c.model == "pauli") {
        return build_pauli_model(c);
    }
    if (c.model == "local_pauli") {
        return build_local_pauli_model(c);
    }
    return build_clifford_model(c);
}

struct BornResult {
    std::map<std::string, double> probabilities;
    /// Normalized post-states for branches with positive probability.
    std::map<std::string, DenseOperator> post_states;
};

/// p^{s1..sN} = Tr(Phi^{s1..sN}(1)), branch by branch.
inline BornResult evaluate_born(const AdaptiveComputation &comp, double prune = 1e-15) {
    validate_computation(comp);
    std::map<std::string, DenseOperator> branches;
    branches.emplace("", DenseOperator::identity(1));
    for (const auto &phi : comp.steps) {
        DenseOperator::check_dense_qubits(static_cast<std::size_t>(std::countr_zero(phi.output_dim)));
        std::map<std::string, DenseOperator> next;
        for (const auto &[history, rho] : branches) {
            const std::size_t a = input_for(phi, history);
            for (std::size_t s = 0; s < phi.num_outcomes(); ++s) {
                auto img = apply_cp(phi, a, s, rho);
                if (img.trace().real() <= prune) {
                    continue;
                }
                auto key = extend_history(history, phi.outcome_labels[s]);
                auto it = next.find(key);
                if (it == next.end()) {
                    next.emplace(key, std::move(img));
                } else {
                    it->second += img;
                }
            }
        }
        branches = std::move(next);
    }
    BornResult out;
    for (auto &[history, rho] : branches) {
        double p = rho.trace().real();
        out.probabilities[history] = p;
        out.post_states.emplace(history, rho * Complex(1.0 / p));
    }
    return out;
}

/// The whole computation as one instrument C -> H_N whose outcomes are full
/// histories, by iterated star composition with history pass-through.
inline DenseInstrument flatten(const AdaptiveComputation &comp) {
    validate_computation(comp);
    DenseInstrument acc = comp.steps.front();
    if (!detail::is_wildcard(acc.outcome_labels)) {
        throw InputError("flatten: preparation must have a single outcome");
    }
    acc.outcome_labels = {""};
    for (std::size_t k = 1; k < comp.steps.size(); ++k) {
        const auto &phi = comp.steps[k];
        // Pass-through: input h, outcome h+s.
        std::vector<std::string> outs;
        for (const auto &h : acc.outcome_labels) {
            for (const auto &s : phi.outcome_labels) {
                outs.push_back(extend_history(h, s));
            }
        }
        auto step = DenseInstrument::shaped(phi.input_dim, phi.output_dim, acc.outcome_labels, outs);
        for (std::size_t a = 0; a < acc.outcome_labels.size(); ++a) {
            const std::size_t in = input_for(phi, acc.outcome_labels[a]);
            for (std::size_t s = 0; s < phi.num_outcomes(); ++s) {
                step.ops(a, a * phi.num_outcomes() + s) = phi.ops(in, s);
            }
        }
        auto composed = star_compose(acc, step);
        // Keep only the consistent (h, h s) pairs, relabeled by h s.
        auto next = DenseInstrument::shaped(1, phi.output_dim, {"*"}, outs);
        for (std::size_t a = 0; a < acc.outcome_labels.size(); ++a) {
            for (std::size_t s = 0; s < phi.num_outcomes(); ++s) {
                const std::size_t col = a * phi.num_outcomes() + s;
                next.ops(0, col) = composed.ops(0, a * outs.size() + col);
            }
        }
        acc = std::move(next);
    }
    return acc;
}

}  // namespace polysim
