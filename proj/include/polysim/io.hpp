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

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "polysim/adaptive.hpp"
#include "polysim/cnc.hpp"
#include "polysim/engine.hpp"
#include "polysim/errors.hpp"
#include "polysim/geometry.hpp"

namespace polysim {

using json = nlohmann::json;

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline json parse_json_text(const std::string &text, const std::string &what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw InputError(what + ": " + e.what());
    }
}

/// 64-bit FNV-1a, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

namespace detail {

/// Runs fn, turning JSON access errors into InputError with context.
template <class Fn>
auto json_guard(const std::string &context, Fn &&fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const json::exception &e) {
        throw InputError(context + ": " + e.what());
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dense operators and states.

inline json dense_to_json(const DenseOperator &a) {
    json re = json::array(), im = json::array();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        json rr = json::array(), ii = json::array();
        for (std::size_t c = 0; c < a.cols(); ++c) {
            rr.push_back(a(r, c).real());
            ii.push_back(a(r, c).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ii));
    }
    return {{"n", a.num_qubits()}, {"re", re}, {"im", im}};
}

inline DenseOperator dense_from_json(const json &j) {
    return detail::json_guard("dense operator", [&] {
        const std::size_t n = j.at("n").get<std::size_t>();
        DenseOperator::check_dense_qubits(n);
        const std::size_t dim = std::size_t{1} << n;
        const auto &re = j.at("re");
        const json im = j.contains("im") ? j.at("im") : json();
        if (re.size() != dim || (!im.is_null() && im.size() != dim)) {
            throw InputError("dense operator: expected " + std::to_string(dim) + " rows");
        }
        DenseOperator out(dim, dim);
        for (std::size_t r = 0; r < dim; ++r) {
            if (re[r].size() != dim || (!im.is_null() && im[r].size() != dim)) {
                throw InputError("dense operator: ragged row");
            }
            for (std::size_t c = 0; c < dim; ++c) {
                out(r, c) = Complex(re[r][c].get<double>(), im.is_null() ? 0.0 : im[r][c].get<double>());
            }
        }
        return out;
    });
}

inline json coeffs_to_json(const CoeffVector &v) {
    return {{"n", v.n}, {"coeffs", v.c}};
}

inline CoeffVector coeffs_from_json(const json &j) {
    return detail::json_guard("coefficient vector", [&] {
        CoeffVector v;
        v.n = j.at("n").get<std::size_t>();
        if (v.n > 6) {
            throw InputError("coefficient vector: n too large");
        }
        v.c = j.at("coeffs").get<std::vector<double>>();
        if (v.c.size() != (std::size_t{1} << (2 * v.n))) {
            throw InputError("coefficient vector: expected 4^n entries");
        }
        return v;
    });
}

/// A state file: {"n","re","im"} (a density operator) or {"n","coeffs"}.
inline CoeffVector state_from_json(const json &j) {
    if (j.is_object() && j.contains("coeffs")) {
        auto v = coeffs_from_json(j);
        if (std::abs(v.trace() - 1.0) > 1e-9) {
            throw InputError("state: coefficients are not trace one");
        }
        return v;
    }
    return to_coeffs(dense_from_json(j));
}

// ---------------------------------------------------------------------------
// Vertex sets, tables, backends, CNC labels.

inline json vertex_set_to_json(const VertexSet &v) {
    json verts = json::array();
    for (std::size_t k = 0; k < v.size(); ++k) {
        verts.push_back({{"label", v.labels[k]}, {"coeffs", v.vectors[k].c}});
    }
    return {{"n", v.n}, {"vertices", verts}};
}

/// Accepts {"n","vertices"} or a report carrying one under "vertex_set".
inline VertexSet vertex_set_from_json(const json &j) {
    if (j.is_object() && j.contains("vertex_set")) {
        return vertex_set_from_json(j.at("vertex_set"));
    }
    auto v = detail::json_guard("vertex set", [&] {
        VertexSet out;
        out.n = j.at("n").get<std::size_t>();
        if (out.n > 4) {
            throw InputError("vertex set: n too large");
        }
        for (const auto &e : j.at("vertices")) {
            CoeffVector c{out.n, e.at("coeffs").get<std::vector<double>>()};
            out.add(e.at("label").get<std::string>(), std::move(c));
        }
        return out;
    });
    v.validate();
    return v;
}

template <class Scalar>
json table_to_json(const BasicUpdateMapTable<Scalar> &t) {
    json entries = json::array();
    for (std::size_t x = 0; x < t.x_labels.size(); ++x) {
        for (std::size_t a = 0; a < t.a_labels.size(); ++a) {
            json moves = json::array();
            for (const auto &mv : t.row(x, a)) {
                json m{{"y", t.y_labels[mv.y]}, {"s", t.s_labels[mv.s]}};
                if constexpr (std::is_same_v<Scalar, double>) {
                    m["p"] = mv.p;
                } else {
                    m["p"] = mv.p.template convert_to<double>();
                    m["p_exact"] = mv.p.str();
                }
                moves.push_back(std::move(m));
            }
            entries.push_back({{"x", t.x_labels[x]}, {"a", t.a_labels[a]}, {"moves", moves}});
        }
    }
    return {{"x_labels", t.x_labels},
            {"a_labels", t.a_labels},
            {"y_labels", t.y_labels},
            {"s_labels", t.s_labels},
            {"entries", entries}};
}

inline UpdateMapTable table_from_json(const json &j) {
    return detail::json_guard("update map table", [&] {
        auto t = UpdateMapTable::shaped(
            j.at("x_labels").get<std::vector<std::string>>(), j.at("a_labels").get<std::vector<std::string>>(),
            j.at("y_labels").get<std::vector<std::string>>(), j.at("s_labels").get<std::vector<std::string>>());
        auto find = [](const std::vector<std::string> &labels, const std::string &l) {
            auto it = std::find(labels.begin(), labels.end(), l);
            if (it == labels.end()) {
                throw InputError("update map table: unknown label '" + l + "'");
            }
            return static_cast<std::size_t>(it - labels.begin());
        };
        for (const auto &e : j.at("entries")) {
            auto &row = t.row(find(t.x_labels, e.at("x").get<std::string>()), find(t.a_labels, e.at("a").get<std::string>()));
            for (const auto &m : e.at("moves")) {
                double p = m.at("p").get<double>();
                if (p < 0) {
                    throw InputError("update map table: negative probability");
                }
                row.push_back({find(t.y_labels, m.at("y").get<std::string>()), find(t.s_labels, m.at("s").get<std::string>()), p});
            }
        }
        return t;
    });
}

inline json backend_to_json(const VertexBackend &b) {
    json stages = json::array(), tables = json::array();
    for (const auto &s : b.stages) {
        stages.push_back(vertex_set_to_json(s));
    }
    for (std::size_t k = 0; k < b.tables.size(); ++k) {
        tables.push_back(k < b.first_step ? json() : table_to_json(b.tables[k]));
    }
    return {{"first_step", b.first_step}, {"stages", stages}, {"tables", tables}};
}

inline VertexBackend backend_from_json(const json &j) {
    return detail::json_guard("vertex backend", [&] {
        VertexBackend b;
        b.first_step = j.at("first_step").get<std::size_t>();
        for (const auto &s : j.at("stages")) {
            b.stages.push_back(vertex_set_from_json(s));
        }
        for (const auto &t : j.at("tables")) {
            b.tables.push_back(t.is_null() ? UpdateMapTable{} : table_from_json(t));
        }
        return b;
    });
}

inline json cnc_label_to_json(const CncLabel &l) {
    json omega = json::array();
    for (const auto &a : l.omega) {
        omega.push_back(pauli_letters(a));
    }
    std::vector<int> gamma(l.gamma.begin(), l.gamma.end());
    return {{"omega", omega}, {"gamma", gamma}};
}

inline json decomposition_to_json(const Decomposition &d) {
    return {{"labels", d.labels}, {"weights", d.weights}, {"negativity", d.negativity}};
}

// ---------------------------------------------------------------------------
// Circuits.

inline json resource_to_json(const Resource &r) {
    if (r.kind == "states") {
        return r.states;
    }
    if (r.kind == "explicit") {
        return dense_to_json(*r.rho);
    }
    return r.kind;
}

inline Resource resource_from_json(const json &j) {
    Resource r;
    if (j.is_string()) {
        r.kind = j.get<std::string>();
        if (r.kind != "zeros" && r.kind != "plus" && r.kind != "magic_t_all") {
            throw InputError("resource: unknown kind '" + r.kind + "'");
        }
    } else if (j.is_array()) {
        r.kind = "states";
        r.states = j.get<std::vector<std::string>>();
    } else if (j.is_object()) {
        r.kind = "explicit";
        r.rho = dense_from_json(j);
    } else {
        throw InputError("resource: expected a name, a list of state names, or a density operator");
    }
    return r;
}

inline json circuit_to_json(const Circuit &c) {
    json steps = json::array();
    for (const auto &st : c.steps) {
        json s{{"type", step_kind_name(st.kind)}};
        switch (st.kind) {
            case CircuitStep::Kind::gate:
                s["name"] = st.gate;
                s["qubits"] = st.qubits;
                break;
            case CircuitStep::Kind::measure:
                s["cases"] = st.cases;
                break;
            case CircuitStep::Kind::local_measure:
                s["qubit"] = st.qubit;
                s["cases"] = st.cases;
                break;
            case CircuitStep::Kind::feedforward:
                s["affine"] = std::vector<int>(st.affine.begin(), st.affine.end());
                s["const"] = st.constant ? 1 : 0;
                break;
        }
        steps.push_back(std::move(s));
    }
    json graph = json::array();
    for (const auto &[i, j] : c.graph) {
        graph.push_back({i, j});
    }
    return {{"model", c.model}, {"n", c.n}, {"resource", resource_to_json(c.resource)}, {"graph", graph}, {"steps", steps}};
}

/// Parses and validates; errors name the offending step.
inline Circuit circuit_from_json(const json &j) {
    Circuit c = detail::json_guard("circuit", [&] {
        Circuit out;
        out.model = j.at("model").get<std::string>();
        out.n = j.at("n").get<std::size_t>();
        out.resource = j.contains("resource") ? resource_from_json(j.at("resource")) : default_resource(out.model);
        if (j.contains("graph")) {
            for (const auto &e : j.at("graph")) {
                if (e.size() != 2) {
                    throw InputError("graph: edges are pairs");
                }
                out.graph.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
            }
        }
        const auto &steps = j.at("steps");
        for (std::size_t k = 0; k < steps.size(); ++k) {
            detail::json_guard("step " + std::to_string(k), [&] {
                const auto &s = steps[k];
                CircuitStep st;
                const auto type = s.at("type").get<std::string>();
                if (type == "gate") {
                    st.kind = CircuitStep::Kind::gate;
                    st.gate = s.at("name").get<std::string>();
                    st.qubits = s.at("qubits").get<std::vector<std::size_t>>();
                } else if (type == "measure") {
                    st.kind = CircuitStep::Kind::measure;
                    st.cases = s.at("cases").get<std::map<std::string, std::string>>();
                } else if (type == "local_measure") {
                    st.kind = CircuitStep::Kind::local_measure;
                    st.qubit = s.at("qubit").get<std::size_t>();
                    st.cases = s.at("cases").get<std::map<std::string, std::string>>();
                } else if (type == "feedforward") {
                    st.kind = CircuitStep::Kind::feedforward;
                    for (int b : s.at("affine").get<std::vector<int>>()) {
                        if (b != 0 && b != 1) {
                            throw InputError("step " + std::to_string(k) + ": feedforward coefficients must be bits");
                        }
                        st.affine.push_back(static_cast<std::uint8_t>(b));
                    }
                    int constant = s.contains("const") ? s.at("const").get<int>() : 0;
                    if (constant != 0 && constant != 1) {
                        throw InputError("step " + std::to_string(k) + ": feedforward constant must be a bit");
                    }
                    st.constant = constant == 1;
                } else {
                    throw InputError("step " + std::to_string(k) + ": unknown step type '" + type + "'");
                }
                out.steps.push_back(std::move(st));
                return 0;
            });
        }
        return out;
    });
    validate_circuit(c);
    return c;
}

inline Circuit parse_circuit_text(const std::string &text) {
    return circuit_from_json(parse_json_text(text, "circuit"));
}

inline Circuit parse_circuit(const std::string &path) {
    return parse_circuit_text(read_file(path));
}

// ---------------------------------------------------------------------------
// Reports.

inline json counts_to_json(const Counts &c) {
    json out = json::object();
    for (const auto &[k, v] : c) {
        out[k] = v;
    }
    return out;
}

inline json estimate_to_json(const EstimateReport &r) {
    return {{"event", r.event},
            {"estimate", r.estimate},
            {"epsilon", r.epsilon},
            {"delta", r.delta},
            {"samples", r.samples},
            {"negativity", r.negativity},
            {"sample_rule", "N = ceil(2 |r|_1^2 / epsilon^2 * ln(2 / delta))"}};
}

inline json timing_to_json(const TableauTiming &t) {
    auto avg = [](double s, std::uint64_t k) { return k ? s / static_cast<double>(k) : 0.0; };
    return {{"total_seconds", t.total_seconds},
            {"gates", t.gates},
            {"measurements", t.measurements},
            {"seconds_per_gate", avg(t.gate_seconds, t.gates)},
            {"seconds_per_measurement", avg(t.measure_seconds, t.measurements)}};
}

}  // namespace polysim
