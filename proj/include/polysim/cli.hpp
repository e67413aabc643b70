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
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "polysim/io.hpp"

namespace polysim {

inline constexpr const char *kVersion = "0.1.0";

struct CliOptions {
    std::string verb;
    std::string circuit, state, vertices, target, tables, backend = "oracle", out, what, event, instrument, family;
    std::uint64_t shots = 0, seed = 0, gates = 100000, measurements = 1000;
    std::size_t n = 1;
    std::optional<std::size_t> step;
    std::optional<std::uint64_t> samples;
    double epsilon = 0.01, delta = 0.05;
    unsigned threads = 0;
    bool exact = false, timing = false, allow_large = false, dump = false;
};

namespace cli_detail {

class Session {
   public:
    explicit Session(const CliOptions &o) : opt_(o) {}

    json header() const {
        return {{"tool", "polysim"}, {"version", kVersion}, {"verb", opt_.verb}, {"seed", opt_.seed}, {"inputs", inputs_}};
    }

    std::string load(const std::string &flag, const std::string &path) {
        auto text = read_file(path);
        inputs_[flag] = {{"path", path}, {"fnv1a", fnv1a_hex(text)}};
        return text;
    }

    Circuit circuit() {
        require(opt_.circuit, "--circuit");
        return parse_circuit_text(load("circuit", opt_.circuit));
    }

    CoeffVector state() {
        require(opt_.state, "--state");
        return state_from_json(parse_json_text(load("state", opt_.state), "state"));
    }

    /// A file path or a built-in set name.
    VertexSet vertex_set(const std::string &flag, const std::string &spec) {
        require(spec, "--" + flag);
        if (std::filesystem::is_regular_file(spec)) {
            return vertex_set_from_json(parse_json_text(load(flag, spec), flag));
        }
        auto v = builtin_vertex_set(spec);
        if (!v) {
            throw InputError("--" + flag + ": '" + spec + "' is neither a file nor a built-in vertex set");
        }
        inputs_[flag] = {{"builtin", spec}};
        return *v;
    }

    VertexBackend backend_file() {
        return backend_from_json(parse_json_text(load("tables", opt_.tables), "tables"));
    }

    unsigned threads() const {
        if (opt_.threads != 0) {
            return opt_.threads;
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    static void require(const std::string &value, const std::string &flag) {
        if (value.empty()) {
            throw InputError(flag + " is required");
        }
    }

   private:
    const CliOptions &opt_;
    json inputs_ = json::object();
};

inline std::string default_family(const Circuit &c) {
    return c.model == "clifford" ? "sp" : "cube";
}

/// Instrument from --circuit/--step or from --instrument:
/// measure:<pauli> | destructive:<single-qubit pauli> | gate:<name>.
inline DenseInstrument pick_instrument(Session &s, const CliOptions &o) {
    if (!o.instrument.empty()) {
        auto colon = o.instrument.find(':');
        if (colon == std::string::npos) {
            throw InputError("--instrument expects kind:argument");
        }
        auto kind = o.instrument.substr(0, colon), arg = o.instrument.substr(colon + 1);
        if (kind == "measure") {
            return pauli_measurement_instrument(parse_pauli(arg));
        }
        if (kind == "destructive") {
            auto b = parse_pauli(arg);
            if (b.num_qubits() != 1) {
                throw InputError("destructive instruments are single-qubit here");
            }
            return pauli_measurement_instrument(b, true, 0);
        }
        if (kind == "gate") {
            const std::size_t q = is_two_qubit_gate_name(arg) ? 2 : 1;
            std::vector<std::size_t> qs(q);
            for (std::size_t k = 0; k < q; ++k) {
                qs[k] = k;
            }
            return unitary_instrument(gate_unitary(arg, qs, q));
        }
        throw InputError("unknown instrument kind '" + kind + "'");
    }
    if (!o.step) {
        throw InputError("--step (with --circuit) or --instrument is required");
    }
    auto comp = build_computation(s.circuit());
    if (*o.step >= comp.steps.size()) {
        throw InputError("--step out of range: the computation has " + std::to_string(comp.steps.size()) + " steps");
    }
    return comp.steps[*o.step];
}

inline json violation_to_json(const PreservationViolation &v) {
    return {{"x", v.x}, {"a", v.a}, {"s", v.s}, {"kind", v.kind}, {"trace", v.trace}, {"image", v.image.c},
            {"separator", v.separator}};
}

inline json stage_density(const AdaptiveComputation &comp) {
    return dense_to_json(apply_cp(comp.steps.at(0), 0, 0, DenseOperator::identity(1)));
}

}  // namespace cli_detail

/// Runs one verb; returns the report and the exit code it implies.
inline std::pair<json, int> dispatch(const CliOptions &o) {
    cli_detail::Session s(o);
    json body = json::object();
    int code = 0;
    if (o.verb == "simulate") {
        auto c = s.circuit();
        if (o.backend == "tableau") {
            if (o.shots == 0) {
                throw InputError("the tableau backend samples; pass --shots");
            }
            auto run = run_tableau_fast(c, o.shots, o.seed, s.threads());
            body["counts"] = counts_to_json(run.counts);
            if (o.timing) {
                body["timing"] = timing_to_json(run.timing);
            }
        } else if (o.backend == "oracle" || o.backend == "vertex") {
            auto comp = build_computation(c);
            std::map<std::string, double> probs;
            std::optional<VertexBackend> vb;
            if (o.backend == "vertex") {
                if (!o.tables.empty()) {
                    vb = s.backend_file();
                    check_backend(comp, *vb);
                } else {
                    auto fam = o.family.empty() ? cli_detail::default_family(c) : o.family;
                    vb = derive_vertex_backend(comp, family_stages(comp, fam));
                    body["family"] = fam;
                }
            }
            if (o.shots == 0) {
                probs = vb ? propagate_exact(comp, *vb).probabilities : evaluate_born(comp).probabilities;
                body["distribution"] = probs;
            } else if (vb) {
                body["counts"] = counts_to_json(sample(comp, *vb, o.shots, o.seed, s.threads()));
            } else {
                body["counts"] = counts_to_json(sample_distribution(evaluate_born(comp).probabilities, o.shots, o.seed, s.threads()));
            }
        } else {
            throw InputError("--backend must be oracle, tableau or vertex");
        }
        body["backend"] = o.backend;
        if (o.shots) {
            body["shots"] = o.shots;
        }
    } else if (o.verb == "estimate") {
        auto c = s.circuit();
        if (!o.state.empty()) {
            c.resource.kind = "explicit";
            c.resource.rho = from_coeffs(s.state());
        }
        cli_detail::Session::require(o.event, "--event");
        auto comp = build_computation(c);
        auto fam = o.family.empty() ? std::string("sp") : o.family;
        auto stages = family_stages(comp, fam);
        auto vb = derive_vertex_backend(comp, stages, 1);
        auto rho1 = pauli_coefficients(apply_cp(comp.steps[0], 0, 0, DenseOperator::identity(1)));
        auto rob = robustness(rho1, vb.stages[1]);
        auto rep = estimate_quasi(comp, vb, rob.decomposition, Event::parse(o.event), o.epsilon, o.delta, o.seed,
                                  s.threads(), o.samples);
        body["estimate"] = estimate_to_json(rep);
        body["decomposition"] = decomposition_to_json(rob.decomposition);
        body["family"] = fam;
    } else if (o.verb == "robustness") {
        auto target = s.state();
        auto v = s.vertex_set("vertices", o.vertices);
        if (o.exact) {
            auto r = robustness_exact(target, v);
            body["value"] = r.convert_to<double>();
            body["value_exact"] = r.str();
        } else {
            auto r = robustness(target, v);
            body["value"] = r.value;
            body["decomposition"] = decomposition_to_json(r.decomposition);
        }
    } else if (o.verb == "enumerate") {
        if (o.what == "stabilizer") {
            if (o.n == 0 || o.n > 3) {
                throw InputError("stabilizer enumeration supports n = 1..3");
            }
            auto states = enumerate_stabilizer_states(o.n);
            json labels = json::array();
            for (const auto &t : states) {
                labels.push_back(detail::stabilizer_label(t));
            }
            body["count"] = states.size();
            body["labels"] = labels;
            body["vertex_set"] = vertex_set_to_json(stabilizer_vertex_set(o.n));
            if (o.dump) {
                json dumps = json::array();
                for (const auto &t : states) {
                    dumps.push_back(t.dump());
                }
                body["tableaux"] = dumps;
            }
        } else if (o.what == "cnc") {
            auto labels = enumerate_maximal_cnc(o.n);
            json arr = json::array();
            for (const auto &l : labels) {
                arr.push_back(cnc_label_to_json(l));
            }
            body["count"] = labels.size();
            body["labels"] = arr;
        } else if (o.what == "cnc-sets") {
            auto sets = enumerate_maximal_cnc_sets(o.n);
            json arr = json::array();
            for (const auto &set : sets) {
                json one = json::array();
                for (const auto &a : set) {
                    one.push_back(pauli_letters(a));
                }
                arr.push_back(one);
            }
            body["count"] = sets.size();
            body["sets"] = arr;
        } else if (o.what == "dual") {
            auto v = o.vertices.empty() ? stabilizer_vertex_set(o.n) : s.vertex_set("vertices", o.vertices);
            auto d = dual_vertices(v, o.allow_large);
            body["count"] = d.size();
            body["vertex_set"] = vertex_set_to_json(d);
        } else {
            throw InputError("--what must be stabilizer, cnc, cnc-sets or dual");
        }
        body["what"] = o.what;
        body["n"] = o.n;
    } else if (o.verb == "check-preservation") {
        auto phi = cli_detail::pick_instrument(s, o);
        auto a = s.vertex_set("vertices", o.vertices);
        auto b = s.vertex_set("target", o.target.empty() ? o.vertices : o.target);
        auto rep = check_preservation(phi, a, b);
        json vs = json::array();
        for (const auto &v : rep.violations) {
            vs.push_back(cli_detail::violation_to_json(v));
        }
        body["ok"] = rep.ok;
        body["checked"] = rep.checked;
        body["violations"] = vs;
        code = rep.ok ? 0 : 1;
    } else if (o.verb == "derive-updates") {
        if (o.step || !o.instrument.empty()) {
            auto phi = cli_detail::pick_instrument(s, o);
            auto a = s.vertex_set("vertices", o.vertices);
            auto b = s.vertex_set("target", o.target.empty() ? o.vertices : o.target);
            if (o.exact) {
                body["table"] = table_to_json(derive_update_map_exact(phi, a, b));
            } else {
                auto t = derive_update_map(phi, a, b);
                auto chk = check_simulates(phi, t, a, b);
                body["table"] = table_to_json(t);
                body["max_error"] = chk.max_error;
            }
        } else {
            auto c = s.circuit();
            auto comp = build_computation(c);
            auto fam = o.family.empty() ? cli_detail::default_family(c) : o.family;
            body["backend"] = backend_to_json(derive_vertex_backend(comp, family_stages(comp, fam)));
            body["family"] = fam;
        }
    } else if (o.verb == "bench") {
        auto r = bench_tableau(o.n, o.gates, o.measurements, o.seed);
        body["n"] = r.n;
        body["gates"] = r.gates;
        body["measurements"] = r.measurements;
        body["random_outcomes"] = r.random_outcomes;
        body["timing"] = {{"gate_seconds", r.gate_seconds}, {"measure_seconds", r.measure_seconds},
                          {"total_seconds", r.total_seconds}};
    } else {
        throw InputError("unknown verb '" + o.verb + "'");
    }
    json report = s.header();
    report.update(body);
    return {report, code};
}

/// Full command line: parse, dispatch, write. Exit codes 0 / 1 / 2.
inline int run_cli(std::vector<std::string> args, std::ostream &out, std::ostream &err) {
    CliOptions o;
    CLI::App app{"polysim: polyhedral classical simulation of quantum circuits"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1, 1);

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--out", o.out, "write the report here instead of standard output");
        sub->add_option("--seed", o.seed, "RNG seed");
        sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    };
    auto *sim = app.add_subcommand("simulate", "run a circuit on a backend");
    sim->add_option("--circuit", o.circuit)->required();
    sim->add_option("--backend", o.backend)->check(CLI::IsMember({"oracle", "tableau", "vertex"}));
    sim->add_option("--shots", o.shots, "0 = exact distribution (oracle, vertex)");
    sim->add_option("--tables", o.tables, "vertex backend file from derive-updates");
    sim->add_option("--vertices", o.family, "vertex family for derived tables: sp | local_sp | cube");
    sim->add_flag("--timing", o.timing, "tableau backend: include timing");
    add_common(sim);

    auto *est = app.add_subcommand("estimate", "quasi-probability estimate of an outcome event");
    est->add_option("--circuit", o.circuit)->required();
    est->add_option("--state", o.state, "overrides the circuit's resource state");
    est->add_option("--event", o.event, "outcome mask over 0, 1, *")->required();
    est->add_option("--epsilon", o.epsilon);
    est->add_option("--delta", o.delta);
    est->add_option("--samples", o.samples, "override the Hoeffding count");
    est->add_option("--vertices", o.family, "vertex family: sp | local_sp | cube");
    add_common(est);

    auto *rob = app.add_subcommand("robustness", "l1 robustness of a state over a vertex set");
    rob->add_option("--state", o.state)->required();
    rob->add_option("--vertices", o.vertices)->required();
    rob->add_flag("--exact", o.exact, "rational arithmetic");
    add_common(rob);

    auto *en = app.add_subcommand("enumerate", "enumerate stabilizer states, CNC labels or dual vertices");
    en->add_option("--what", o.what)->required()->check(CLI::IsMember({"stabilizer", "cnc", "cnc-sets", "dual"}));
    en->add_option("--n", o.n);
    en->add_option("--vertices", o.vertices, "dual: vertex set to dualize (default spN)");
    en->add_flag("--allow-large", o.allow_large, "dual: allow n = 2");
    en->add_flag("--dump", o.dump, "stabilizer: include tableau dumps");
    add_common(en);

    auto *cp = app.add_subcommand("check-preservation", "check that an instrument maps conv(A) into conv(B)");
    cp->add_option("--circuit", o.circuit);
    cp->add_option("--step", o.step);
    cp->add_option("--instrument", o.instrument, "measure:<pauli> | destructive:<pauli> | gate:<name>");
    cp->add_option("--vertices", o.vertices)->required();
    cp->add_option("--target", o.target);
    add_common(cp);

    auto *du = app.add_subcommand("derive-updates", "LP-derived update maps");
    du->add_option("--circuit", o.circuit);
    du->add_option("--step", o.step);
    du->add_option("--instrument", o.instrument);
    du->add_option("--vertices", o.vertices, "input set (single step) or family (whole circuit)");
    du->add_option("--target", o.target);
    du->add_flag("--exact", o.exact);
    add_common(du);

    auto *bench = app.add_subcommand("bench", "random Clifford circuit timing on the tableau");
    bench->add_option("--n", o.n);
    bench->add_option("--gates", o.gates);
    bench->add_option("--measurements", o.measurements);
    add_common(bench);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            out << (dynamic_cast<const CLI::CallForVersion *>(&e) ? std::string(kVersion) + "\n" : app.help());
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }
    o.verb = app.get_subcommands().front()->get_name();
    if (o.verb == "derive-updates" && !o.step && o.instrument.empty()) {
        o.family = o.vertices;
    }
    if (o.verb == "bench" && bench->count("--n") == 0) {
        o.n = 1000;
    }
    try {
        auto [report, code] = dispatch(o);
        const auto text = report.dump(2) + "\n";
        if (o.out.empty()) {
            out << text;
        } else {
            std::ofstream f(o.out, std::ios::binary);
            if (!f || !(f << text)) {
                throw InputError("cannot write '" + o.out + "'");
            }
        }
        if (code != 0) {
            err << "check failed\n";
        }
        return code;
    } catch (const InputError &e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError &e) {
        err << "precondition failed: " << e.what() << "\n";
        return 1;
    } catch (const VerificationError &e) {
        err << "verification failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace polysim
