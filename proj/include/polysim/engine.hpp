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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "polysim/adaptive.hpp"
#include "polysim/errors.hpp"
#include "polysim/geometry.hpp"
#include "polysim/rng.hpp"
#include "polysim/tableau.hpp"

namespace polysim {

using Counts = std::map<std::string, std::uint64_t>;

/// Shots per seed stream; stream k covers shots [k*kShotChunk, (k+1)*kShotChunk).
inline constexpr std::uint64_t kShotChunk = 4096;

inline double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace detail {

/// Runs fn(chunk, shots_in_chunk) over all chunks on up to `threads` workers
/// and returns the per-chunk results in chunk order.
template <class Result>
std::vector<Result> run_chunks(
    std::uint64_t shots, unsigned threads, const std::function<Result(std::uint64_t, std::uint64_t)> &fn) {
    const std::uint64_t chunks = (shots + kShotChunk - 1) / kShotChunk;
    std::vector<Result> out(chunks);
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(chunks, 1)));
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](unsigned worker) {
        try {
            for (std::uint64_t c = worker; c < chunks; c += threads) {
                out[c] = fn(c, std::min(kShotChunk, shots - c * kShotChunk));
            }
        } catch (...) {
            errors[worker] = std::current_exception();
        }
    };
    if (threads <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back(work, w);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

inline Counts merge_counts(const std::vector<Counts> &parts) {
    Counts out;
    for (const auto &p : parts) {
        for (const auto &[k, v] : p) {
            out[k] += v;
        }
    }
    return out;
}

inline void require_shots(std::uint64_t shots) {
    if (shots == 0) {
        throw InputError("shots must be at least 1");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Vertex backend.

/// Stage sets A_0..A_N and tables q_k : A_k x Gamma_k -> A_{k+1} x Sigma_k
/// for steps k >= first_step (earlier tables are left empty).
struct VertexBackend {
    std::vector<VertexSet> stages;
    std::vector<UpdateMapTable> tables;
    std::size_t first_step = 0;
};

/// A_0 = scalars, A_{k+1} from the family at the qubit count after step k.
inline std::vector<VertexSet> family_stages(const AdaptiveComputation &comp, std::string_view family) {
    std::vector<VertexSet> out{scalar_vertex_set()};
    for (std::size_t k = 0; k < comp.steps.size(); ++k) {
        out.push_back(family_vertex_set(family, comp.num_qubits_after(k)));
    }
    return out;
}

/// Simulation-diagram check of every configured stage.
inline void check_backend(const AdaptiveComputation &comp, const VertexBackend &backend, double tol = 1e-9) {
    if (backend.stages.size() != comp.steps.size() + 1 || backend.tables.size() != comp.steps.size()) {
        throw InputError("vertex backend: stage count does not match the computation");
    }
    for (std::size_t k = backend.first_step; k < comp.steps.size(); ++k) {
        auto chk = check_simulates(comp.steps[k], backend.tables[k], backend.stages[k], backend.stages[k + 1], tol);
        if (!chk.ok) {
            throw VerificationError(
                "step " + std::to_string(k) + ": update map does not simulate the instrument (error " +
                std::to_string(chk.max_error) + ")");
        }
    }
}

/// LP-derived tables for every step from first_step on, checked afterwards.
inline VertexBackend derive_vertex_backend(
    const AdaptiveComputation &comp, std::vector<VertexSet> stages, std::size_t first_step = 0) {
    validate_computation(comp);
    if (stages.size() != comp.steps.size() + 1) {
        throw InputError("vertex backend: need one vertex set per stage");
    }
    VertexBackend out;
    out.first_step = first_step;
    out.tables.resize(comp.steps.size());
    for (std::size_t k = first_step; k < comp.steps.size(); ++k) {
        try {
            out.tables[k] = derive_update_map(comp.steps[k], stages[k], stages[k + 1]);
        } catch (const PreconditionError &e) {
            throw PreconditionError("step " + std::to_string(k) + ": " + e.what());
        }
    }
    out.stages = std::move(stages);
    check_backend(comp, out);
    return out;
}

struct ExactDistribution {
    std::map<std::string, double> probabilities;
    /// Per history: unnormalized weights over the final stage's vertices.
    std::map<std::string, std::vector<double>> final_weights;
};

/// Pushes the exact distribution over (vertex, history) through q_0..q_N.
inline ExactDistribution propagate_exact(const AdaptiveComputation &comp, const VertexBackend &backend) {
    if (backend.first_step != 0) {
        throw InputError("propagate_exact needs a table for the preparation step");
    }
    if (backend.stages.size() != comp.steps.size() + 1 || backend.tables.size() != comp.steps.size()) {
        throw InputError("vertex backend: stage count does not match the computation");
    }
    std::map<std::pair<std::string, std::size_t>, double> dist{{{"", 0}, 1.0}};
    for (std::size_t k = 0; k < comp.steps.size(); ++k) {
        const auto &phi = comp.steps[k];
        const auto &q = backend.tables[k];
        std::map<std::pair<std::string, std::size_t>, double> next;
        for (const auto &[key, p] : dist) {
            const auto &[history, x] = key;
            for (const auto &mv : q.row(x, input_for(phi, history))) {
                if (mv.p < 0) {
                    throw PreconditionError("propagate_exact: negative table entry (use estimate_quasi)");
                }
                next[{extend_history(history, q.s_labels[mv.s]), mv.y}] += p * mv.p;
            }
        }
        dist = std::move(next);
    }
    ExactDistribution out;
    const std::size_t last = backend.stages.back().size();
    for (const auto &[key, p] : dist) {
        out.probabilities[key.first] += p;
        auto &w = out.final_weights[key.first];
        w.resize(last, 0.0);
        w[key.second] += p;
    }
    return out;
}

/// sum_y w_y B_y / sum_y w_y.
inline DenseOperator residual_state(const VertexSet &stage, const std::vector<double> &weights) {
    DenseOperator out(stage.dim(), stage.dim());
    double total = 0.0;
    for (std::size_t y = 0; y < weights.size(); ++y) {
        if (weights[y] != 0.0) {
            out += from_coeffs(stage.vectors[y]) * Complex(weights[y]);
            total += weights[y];
        }
    }
    return out * Complex(1.0 / total);
}

namespace detail {

template <class Move>
const Move &draw_move(const std::vector<Move> &row, Rng &rng) {
    if (row.empty()) {
        throw PreconditionError("update map row is empty");
    }
    double u = uniform01(rng), acc = 0.0;
    for (const auto &mv : row) {
        acc += mv.p;
        if (u < acc) {
            return mv;
        }
    }
    return row.back();
}

/// One trajectory from stage `from`, starting at vertex x with history h.
inline std::string walk(
    const AdaptiveComputation &comp, const VertexBackend &backend, std::size_t from, std::size_t x, std::string h,
    Rng &rng) {
    for (std::size_t k = from; k < comp.steps.size(); ++k) {
        const auto &q = backend.tables[k];
        const auto &mv = draw_move(q.row(x, input_for(comp.steps[k], h)), rng);
        if (mv.p < 0) {
            throw PreconditionError("sampling: negative table entry");
        }
        h = extend_history(h, q.s_labels[mv.s]);
        x = mv.y;
    }
    return h;
}

}  // namespace detail

/// Trajectories of the Markov chain q_N * ... * q_0; seeded per chunk.
inline Counts sample(
    const AdaptiveComputation &comp, const VertexBackend &backend, std::uint64_t shots, std::uint64_t seed,
    unsigned threads = 1) {
    detail::require_shots(shots);
    if (backend.first_step != 0) {
        throw InputError("sample needs a table for the preparation step");
    }
    auto parts = detail::run_chunks<Counts>(shots, threads, [&](std::uint64_t chunk, std::uint64_t count) {
        Rng rng(split_seed(seed, chunk));
        Counts c;
        for (std::uint64_t i = 0; i < count; ++i) {
            ++c[detail::walk(comp, backend, 0, 0, "", rng)];
        }
        return c;
    });
    return detail::merge_counts(parts);
}

/// Draws from an explicit distribution (e.g. the oracle's).
inline Counts sample_distribution(
    const std::map<std::string, double> &probabilities, std::uint64_t shots, std::uint64_t seed,
    unsigned threads = 1) {
    detail::require_shots(shots);
    std::vector<std::pair<std::string, double>> cdf;
    double acc = 0.0;
    for (const auto &[k, p] : probabilities) {
        acc += p;
        cdf.emplace_back(k, acc);
    }
    if (cdf.empty()) {
        throw InputError("sample_distribution: empty distribution");
    }
    auto parts = detail::run_chunks<Counts>(shots, threads, [&](std::uint64_t chunk, std::uint64_t count) {
        Rng rng(split_seed(seed, chunk));
        Counts c;
        for (std::uint64_t i = 0; i < count; ++i) {
            double u = uniform01(rng) * acc;
            auto it = std::upper_bound(
                cdf.begin(), cdf.end(), u, [](double v, const auto &e) { return v < e.second; });
            ++c[(it == cdf.end() ? cdf.back() : *it).first];
        }
        return c;
    });
    return detail::merge_counts(parts);
}

// ---------------------------------------------------------------------------
// Quasi-probability estimation.

/// Outcome-sequence predicate: bits must match, '*' matches anything.
struct Event {
    std::string mask;

    bool matches(const std::string &history) const {
        if (history.size() != mask.size()) {
            return false;
        }
        for (std::size_t k = 0; k < mask.size(); ++k) {
            if (mask[k] != '*' && mask[k] != history[k]) {
                return false;
            }
        }
        return true;
    }

    static Event parse(const std::string &mask) {
        for (char c : mask) {
            if (c != '0' && c != '1' && c != '*') {
                throw InputError("event mask may contain only 0, 1 and *");
            }
        }
        return {mask};
    }
};

/// Hoeffding count for samples in [-|r|_1, |r|_1]:
/// N = ceil(2 |r|_1^2 / eps^2 * ln(2 / delta)).
inline std::uint64_t hoeffding_samples(double negativity, double epsilon, double delta) {
    if (!(epsilon > 0 && epsilon < 1) || !(delta > 0 && delta < 1)) {
        throw InputError("epsilon and delta must lie in (0, 1)");
    }
    return static_cast<std::uint64_t>(std::ceil(2.0 * negativity * negativity / (epsilon * epsilon) * std::log(2.0 / delta)));
}

struct EstimateReport {
    std::string event;
    double estimate = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    std::uint64_t samples = 0;
    double negativity = 0.0;
};

/// Samples an initial vertex of stage 1 with probability |r_y| / |r|_1,
/// carries sign(r_y) |r|_1, walks the tables from step 1 on, and averages the
/// signed event indicator. Negativity is allowed only in the decomposition.
inline EstimateReport estimate_quasi(
    const AdaptiveComputation &comp, const VertexBackend &backend, const Decomposition &decomposition,
    const Event &event, double epsilon, double delta, std::uint64_t seed, unsigned threads = 1,
    std::optional<std::uint64_t> samples_override = std::nullopt) {
    if (backend.stages.size() != comp.steps.size() + 1 || backend.tables.size() != comp.steps.size()) {
        throw InputError("vertex backend: stage count does not match the computation");
    }
    if (backend.first_step > 1) {
        throw InputError("estimate_quasi needs tables from step 1 on");
    }
    if (decomposition.labels.empty() || decomposition.labels.size() != decomposition.weights.size()) {
        throw InputError("estimate_quasi: empty or malformed decomposition");
    }
    const auto &stage = backend.stages.at(1);
    std::vector<std::pair<std::size_t, double>> cdf;
    double norm = 0.0;
    std::vector<std::size_t> vertex;
    for (std::size_t k = 0; k < decomposition.labels.size(); ++k) {
        vertex.push_back(stage.index_of(decomposition.labels[k]));
        norm += std::abs(decomposition.weights[k]);
        cdf.emplace_back(k, norm);
    }
    EstimateReport out;
    out.event = event.mask;
    out.epsilon = epsilon;
    out.delta = delta;
    out.negativity = norm;
    out.samples = samples_override ? *samples_override : hoeffding_samples(norm, epsilon, delta);
    detail::require_shots(out.samples);
    auto parts = detail::run_chunks<double>(out.samples, threads, [&](std::uint64_t chunk, std::uint64_t count) {
        Rng rng(split_seed(seed, chunk));
        double sum = 0.0;
        for (std::uint64_t i = 0; i < count; ++i) {
            double u = uniform01(rng) * norm;
            std::size_t pick = cdf.back().first;
            for (const auto &[k, c] : cdf) {
                if (u < c) {
                    pick = k;
                    break;
                }
            }
            auto h = detail::walk(comp, backend, 1, vertex[pick], "", rng);
            if (event.matches(h)) {
                sum += decomposition.weights[pick] < 0 ? -norm : norm;
            }
        }
        return sum;
    });
    double total = 0.0;
    for (double p : parts) {
        total += p;
    }
    out.estimate = total / static_cast<double>(out.samples);
    return out;
}

// ---------------------------------------------------------------------------
// Tableau fast path.

namespace detail {

struct TabGate {
    std::vector<CliffordGate> gates;
};
struct TabMeasure {
    std::map<std::string, PhasedPauli> cases;
    bool feedforward_key = false;
};
struct TabFeedforward {
    std::vector<std::uint8_t> affine;
    bool constant = false;
};
using TabOp = std::variant<TabGate, TabMeasure, TabFeedforward>;

inline std::vector<CliffordGate> clifford_sequence(const std::string &name, const std::vector<std::size_t> &q) {
    using G = GateKind;
    auto one = [&](G k) { return CliffordGate::single(k, q.at(0)); };
    if (name == "I") return {};
    if (name == "H") return {one(G::H)};
    if (name == "S") return {one(G::S)};
    if (name == "Sdg") return {one(G::S), one(G::S), one(G::S)};
    if (name == "X") return {one(G::X)};
    if (name == "Y") return {one(G::Y)};
    if (name == "Z") return {one(G::Z)};
    if (name == "CZ") return {CliffordGate::pair(G::CZ, q.at(0), q.at(1))};
    if (name == "CNOT") return {CliffordGate::pair(G::CNOT, q.at(0), q.at(1))};
    throw PreconditionError("tableau backend: non-Clifford gate '" + name + "'");
}

/// Gates taking |0> to a named single-qubit stabilizer state.
inline std::vector<CliffordGate> state_preparation(const std::string &name, std::size_t q) {
    using G = GateKind;
    if (name == "0") return {};
    if (name == "1") return {CliffordGate::single(G::X, q)};
    if (name == "+") return {CliffordGate::single(G::H, q)};
    if (name == "-") return {CliffordGate::single(G::X, q), CliffordGate::single(G::H, q)};
    if (name == "+i") return {CliffordGate::single(G::H, q), CliffordGate::single(G::S, q)};
    if (name == "-i") return {CliffordGate::single(G::H, q), CliffordGate::single(G::S, q), CliffordGate::single(G::Z, q)};
    throw PreconditionError("tableau backend: resource state '" + name + "' is not a stabilizer state");
}

struct TableauProgram {
    std::size_t n = 0;
    std::vector<CliffordGate> prep;
    std::vector<TabOp> ops;
};

inline TableauProgram compile_tableau(const Circuit &c) {
    validate_circuit(c);
    TableauProgram prog;
    prog.n = c.n;
    auto names = resource_state_names(c.resource, c.n);
    if (!names) {
        throw PreconditionError("tableau backend: explicit resource states are not supported");
    }
    for (std::size_t q = 0; q < c.n; ++q) {
        for (const auto &g : state_preparation((*names)[q], q)) {
            prog.prep.push_back(g);
        }
    }
    for (const auto &[i, j] : c.graph) {
        prog.prep.push_back(CliffordGate::pair(GateKind::CZ, i, j));
    }
    for (std::size_t k = 0; k < c.steps.size(); ++k) {
        const auto &st = c.steps[k];
        switch (st.kind) {
            case CircuitStep::Kind::gate:
                prog.ops.emplace_back(TabGate{clifford_sequence(st.gate, st.qubits)});
                break;
            case CircuitStep::Kind::measure: {
                TabMeasure m;
                for (const auto &[key, text] : st.cases) {
                    m.cases.emplace(key, parse_pauli(text));
                }
                prog.ops.emplace_back(std::move(m));
                break;
            }
            case CircuitStep::Kind::local_measure: {
                TabMeasure m;
                m.feedforward_key = k > 0 && c.steps[k - 1].kind == CircuitStep::Kind::feedforward;
                for (const auto &[key, text] : st.cases) {
                    auto letter = parse_pauli(text);
                    PhasedPauli b{letter.phase, PauliIndex(c.n)};
                    b.index.set_x(st.qubit, letter.index.x(0));
                    b.index.set_z(st.qubit, letter.index.z(0));
                    m.cases.emplace(key, std::move(b));
                }
                prog.ops.emplace_back(std::move(m));
                break;
            }
            case CircuitStep::Kind::feedforward:
                prog.ops.emplace_back(TabFeedforward{st.affine, st.constant});
                break;
        }
    }
    return prog;
}

inline const PhasedPauli &lookup_case(const std::map<std::string, PhasedPauli> &cases, const std::string &key) {
    auto it = cases.find(key);
    if (it == cases.end()) {
        it = cases.find("*");
    }
    if (it == cases.end()) {
        throw InputError("no measurement case for history '" + key + "'");
    }
    return it->second;
}

}  // namespace detail

struct TableauTiming {
    double total_seconds = 0.0;
    std::uint64_t gates = 0;
    std::uint64_t measurements = 0;
    double gate_seconds = 0.0;
    double measure_seconds = 0.0;
};

struct TableauRun {
    Counts counts;
    TableauTiming timing;
};

/// Runs a Clifford circuit shot by shot on the stabilizer tableau. Destructive
/// local measurements keep the measured qubit, which no later step touches.
inline TableauRun run_tableau_fast(const Circuit &c, std::uint64_t shots, std::uint64_t seed, unsigned threads = 1) {
    detail::require_shots(shots);
    auto prog = detail::compile_tableau(c);
    using Clock = std::chrono::steady_clock;
    struct Part {
        Counts counts;
        TableauTiming timing;
    };
    const auto start = Clock::now();
    auto parts = detail::run_chunks<Part>(shots, threads, [&](std::uint64_t chunk, std::uint64_t count) {
        Rng rng(split_seed(seed, chunk));
        Part part;
        for (std::uint64_t i = 0; i < count; ++i) {
            auto t = StabilizerTableau::init_zero(prog.n);
            for (const auto &g : prog.prep) {
                t.apply(g);
            }
            std::string history;
            std::string ff_bit;
            for (const auto &op : prog.ops) {
                if (auto *g = std::get_if<detail::TabGate>(&op)) {
                    auto t0 = Clock::now();
                    for (const auto &gate : g->gates) {
                        t.apply(gate);
                    }
                    part.timing.gate_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
                    ++part.timing.gates;
                } else if (auto *m = std::get_if<detail::TabMeasure>(&op)) {
                    const auto &b = detail::lookup_case(m->cases, m->feedforward_key ? ff_bit : history);
                    auto t0 = Clock::now();
                    auto res = t.measure(b.index, b.sign(), rng);
                    part.timing.measure_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
                    ++part.timing.measurements;
                    history.push_back(res.outcome ? '1' : '0');
                } else {
                    const auto &ff = std::get<detail::TabFeedforward>(op);
                    bool f = ff.constant;
                    for (std::size_t j = 0; j < ff.affine.size(); ++j) {
                        f ^= ff.affine[j] && history[j] == '1';
                    }
                    ff_bit = f ? "1" : "0";
                }
            }
            ++part.counts[history];
        }
        return part;
    });
    TableauRun out;
    for (const auto &p : parts) {
        for (const auto &[k, v] : p.counts) {
            out.counts[k] += v;
        }
        out.timing.gates += p.timing.gates;
        out.timing.measurements += p.timing.measurements;
        out.timing.gate_seconds += p.timing.gate_seconds;
        out.timing.measure_seconds += p.timing.measure_seconds;
    }
    out.timing.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
}

struct BenchReport {
    std::size_t n = 0;
    std::uint64_t gates = 0;
    std::uint64_t measurements = 0;
    std::uint64_t seed = 0;
    double gate_seconds = 0.0;
    double measure_seconds = 0.0;
    double total_seconds = 0.0;
    std::uint64_t random_outcomes = 0;
};

/// Uniformly random elementary Clifford gates followed by random Pauli
/// measurements on |0...0>, timed separately (generation excluded).
inline BenchReport bench_tableau(std::size_t n, std::uint64_t gates, std::uint64_t measurements, std::uint64_t seed) {
    if (n < 2) {
        throw InputError("bench needs n >= 2");
    }
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick_q(0, n - 1);
    std::uniform_int_distribution<int> pick_kind(0, 6);
    const GateKind kinds[] = {GateKind::H, GateKind::S, GateKind::X, GateKind::Y, GateKind::Z, GateKind::CZ, GateKind::CNOT};
    std::vector<CliffordGate> seq;
    seq.reserve(gates);
    for (std::uint64_t k = 0; k < gates; ++k) {
        GateKind kind = kinds[pick_kind(rng)];
        std::size_t a = pick_q(rng);
        if (is_two_qubit(kind)) {
            std::size_t b = pick_q(rng);
            while (b == a) {
                b = pick_q(rng);
            }
            seq.push_back(CliffordGate::pair(kind, a, b));
        } else {
            seq.push_back(CliffordGate::single(kind, a));
        }
    }
    std::vector<PauliIndex> meas;
    for (std::uint64_t k = 0; k < measurements; ++k) {
        PauliIndex b(n);
        do {
            for (std::size_t q = 0; q < n; ++q) {
                auto r = rng() & 3;
                b.set_x(q, r & 1);
                b.set_z(q, r >> 1);
            }
        } while (b.is_identity());
        meas.push_back(std::move(b));
    }
    using Clock = std::chrono::steady_clock;
    BenchReport out{n, gates, measurements, seed, 0, 0, 0, 0};
    auto t = StabilizerTableau::init_zero(n);
    auto t0 = Clock::now();
    for (const auto &g : seq) {
        t.apply(g);
    }
    auto t1 = Clock::now();
    for (const auto &b : meas) {
        out.random_outcomes += t.measure(b, false, rng).deterministic ? 0 : 1;
    }
    auto t2 = Clock::now();
    out.gate_seconds = std::chrono::duration<double>(t1 - t0).count();
    out.measure_seconds = std::chrono::duration<double>(t2 - t1).count();
    out.total_seconds = out.gate_seconds + out.measure_seconds;
    return out;
}

}  // namespace polysim
