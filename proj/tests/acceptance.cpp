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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are pinned below.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "support.hpp"

using namespace polysim;
using namespace polysim::testing;

namespace {

constexpr double kOracleTol = 1e-9;
constexpr double kCncTol = 1e-12;
constexpr double kRobustTol = 1e-7;
constexpr double kUpdateTol = 1e-9;
constexpr double kTvTol = 0.02;
constexpr double kGkSeconds = 60.0;
constexpr double kBenchSeconds = 5.0;
constexpr double kBenchRatio = 10.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

// 1 ------------------------------------------------------------------------
Outcome gk_correctness() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1);
    std::size_t measurements = 0, random_branches = 0;
    for (int circuit = 0; circuit < 200; ++circuit) {
        const std::size_t n = 1 + circuit % 4;
        const int gates = 1 + static_cast<int>(rng() % 50);
        const int meas = static_cast<int>(rng() % 11);
        std::vector<int> slots(gates + meas, 0);
        for (int k = 0; k < meas; ++k) slots[k] = 1;
        std::shuffle(slots.begin(), slots.end(), rng);
        auto t = StabilizerTableau::init_zero(n);
        auto rho = basis_projector(n, 0);
        const auto id = DenseOperator::identity(std::size_t{1} << n);
        for (int slot : slots) {
            if (!slot) {
                auto g = random_gate(rng, n);
                t.apply(g);
                rho = conj_by(ref_gate(g, n), rho);
                continue;
            }
            auto b = random_hermitian_pauli(rng, n);
            auto proj0 = (id + ref_signed(b)) * C(0.5);
            const double p0 = (proj0 * rho).trace().real();
            const bool det = p0 < kOracleTol || p0 > 1 - kOracleTol;
            const bool want = det ? (p0 < 0.5) : static_cast<bool>(rng() & 1);
            auto res = t.measure_forced(b.index, b.sign(), want);
            const double pw = want ? 1 - p0 : p0;
            auto proj = want ? id - proj0 : proj0;
            rho = proj * rho * proj * C(1.0 / pw);
            ++measurements;
            random_branches += !det;
            if (res.deterministic != det || res.outcome != want || std::abs(res.probability - pw) > kOracleTol ||
                max_abs_diff(t.to_state(), rho) > kOracleTol) {
                return {false, "mismatch in circuit " + std::to_string(circuit)};
            }
        }
        if (max_abs_diff(t.to_state(), rho) > kOracleTol) {
            return {false, "final state mismatch in circuit " + std::to_string(circuit)};
        }
    }
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << "200 circuits, " << measurements << " measurements (" << random_branches << " random), " << secs << " s";
    return {secs < kGkSeconds, os.str()};
}

// 2 ------------------------------------------------------------------------
Outcome gk_performance() {
    auto a = bench_tableau(1000, 100000, 1000, 2);
    auto b = bench_tableau(2000, 100000, 1000, 2);
    const double ratio = b.total_seconds / a.total_seconds;
    std::ostringstream os;
    os << "n=1000 " << a.total_seconds << " s, n=2000 " << b.total_seconds << " s, ratio " << ratio;
    return {a.total_seconds < kBenchSeconds && ratio <= kBenchRatio, os.str()};
}

// 3 ------------------------------------------------------------------------
Outcome enumeration() {
    const std::size_t want[] = {6, 60, 1080};
    std::ostringstream os;
    for (std::size_t n = 1; n <= 3; ++n) {
        std::size_t formula = std::size_t{1} << n;
        for (std::size_t k = 1; k <= n; ++k) formula *= (std::size_t{1} << k) + 1;
        auto got = enumerate_stabilizer_states(n).size();
        os << got << (n < 3 ? "/" : "");
        if (got != want[n - 1] || got != formula) return {false, "stabilizer count " + os.str()};
    }
    auto labels = enumerate_maximal_cnc(1);
    auto dual = dual_vertices(stabilizer_vertex_set(1));
    if (labels.size() != 8 || dual.size() != 8) return {false, "cnc/dual size"};
    double worst = 0;
    for (const auto &l : labels) {
        auto c = pauli_coefficients(cnc_operator(l));
        double best = INFINITY;
        for (const auto &d : dual.vectors) best = std::min(best, d.max_abs_diff(c));
        worst = std::max(worst, best);
    }
    os << " states; 8 CNC labels, max distance to dual vertices " << worst;
    return {worst <= kCncTol, os.str()};
}

// 4 ------------------------------------------------------------------------
Outcome robustness_values() {
    const double r = robustness(to_coeffs(magic_state()), stabilizer_vertex_set(1)).value;
    bool ok = std::abs(r - std::sqrt(2.0)) <= kRobustTol;
    std::size_t checked = 0;
    for (std::size_t n : {1u, 2u}) {
        auto sp = stabilizer_vertex_set(n);
        for (const auto &v : sp.vectors) {
            ok = ok && robustness_exact(v, sp) == Rational(1);
            ++checked;
        }
    }
    std::ostringstream os;
    os.precision(12);
    os << "R(rho_T)=" << r << "; " << checked << " stabilizer states with exact value 1";
    return {ok, os.str()};
}

// 5 ------------------------------------------------------------------------
Outcome preservation() {
    auto p1 = *builtin_vertex_set("p1");
    auto lp1 = *builtin_vertex_set("lp1");
    auto lp0 = *builtin_vertex_set("lp0");
    auto sp1 = stabilizer_vertex_set(1);
    bool ok = true;
    for (const char *b : {"X", "Y", "Z"}) {
        ok = ok && check_preservation(pauli_measurement_instrument(parse_pauli(b)), p1, p1).ok;
        ok = ok && check_preservation(pauli_measurement_instrument(parse_pauli(b), true, 0), lp1, lp0).ok;
    }
    auto t = check_preservation(unitary_instrument(gate_unitary("T", {0}, 1)), sp1, sp1);
    bool witness = !t.ok && !t.violations.empty() &&
                   max_abs_diff(from_coeffs(sp1.vectors[sp1.index_of(t.violations.front().x)]),
                                pure_density(named_state_vector("+"))) < kOracleTol;
    return {ok && witness, std::string("X/Y/Z preserve P_1 and LP_1->LP_0; T fails, witness ") +
                               (t.violations.empty() ? "none" : t.violations.front().x)};
}

// 6, 7 ---------------------------------------------------------------------
std::vector<RandomAdaptive> corpus() {
    std::mt19937_64 rng(2026);
    std::vector<RandomAdaptive> out;
    for (int k = 0; k < 20; ++k) out.push_back(random_adaptive(rng, 1 + k % 2));
    return out;
}

Outcome update_maps() {
    double worst = 0;
    bool exact_rows = true;
    for (const char *set : {"sp1", "p1"}) {
        auto v = *builtin_vertex_set(set);
        for (const char *b : {"Z", "X", "Y"}) {
            auto phi = pauli_measurement_instrument(parse_pauli(b));
            auto chk = check_simulates(phi, derive_update_map(phi, v, v), v, v, kUpdateTol);
            if (!chk.ok) return {false, std::string("table for ") + b + " on " + set + " does not simulate"};
            worst = std::max(worst, chk.max_error);
            auto exact = derive_update_map_exact(phi, v, v);
            for (std::size_t x = 0; x < exact.x_labels.size(); ++x) exact_rows = exact_rows && exact.row_sum(x, 0) == Rational(1);
        }
    }
    double prop = 0;
    for (const auto &ra : corpus()) {
        auto comp = build_computation(ra.circuit);
        auto backend = derive_vertex_backend(comp, family_stages(comp, ra.family));
        auto exact = propagate_exact(comp, backend);
        auto born = evaluate_born(comp);
        std::set<std::string> keys;
        for (const auto &[h, _] : born.probabilities) keys.insert(h);
        for (const auto &[h, _] : exact.probabilities) keys.insert(h);
        for (const auto &h : keys) {
            double a = born.probabilities.count(h) ? born.probabilities.at(h) : 0.0;
            double b = exact.probabilities.count(h) ? exact.probabilities.at(h) : 0.0;
            prop = std::max(prop, std::abs(a - b));
        }
    }
    std::ostringstream os;
    os << "diagram error " << worst << ", exact row sums " << (exact_rows ? "1" : "not 1")
       << ", propagate vs Born max diff " << prop << " over 20 circuits";
    return {worst <= kUpdateTol && exact_rows && prop <= kOracleTol, os.str()};
}

Outcome composition() {
    double worst = 0;
    std::size_t checks = 0;
    for (const auto &ra : corpus()) {
        auto comp = build_computation(ra.circuit);
        auto backend = derive_vertex_backend(comp, family_stages(comp, ra.family));
        // Every prefix of the left fold; step k reads the history of steps 0..k-1.
        auto phi = comp.steps[0];
        auto q = backend.tables[0];
        for (std::size_t k = 1; k < comp.steps.size(); ++k) {
            phi = star_compose(phi, comp.steps[k]);
            q = star_compose(q, backend.tables[k]);
            auto chk = check_simulates(phi, q, backend.stages.front(), backend.stages[k + 1], kOracleTol);
            worst = std::max(worst, chk.max_error);
            if (!chk.ok) return {false, "composite of steps 0.." + std::to_string(k) + " fails"};
            ++checks;
        }
    }
    std::ostringstream os;
    os << checks << " composites, max error " << worst;
    return {worst <= kOracleTol, os.str()};
}

// 8 ------------------------------------------------------------------------
Outcome estimator() {
    Circuit c;
    c.model = "pauli";
    c.n = 1;
    c.resource.kind = "magic_t_all";
    CircuitStep m;
    m.kind = CircuitStep::Kind::measure;
    m.cases = {{"*", "X"}};
    c.steps = {m};
    auto comp = build_computation(c);
    auto backend = derive_vertex_backend(comp, family_stages(comp, "sp"), 1);
    auto rho1 = pauli_coefficients(apply_cp(comp.steps[0], 0, 0, DenseOperator::identity(1)));
    auto dec = robustness(rho1, backend.stages[1]).decomposition;
    const double eps = 0.01, delta = 0.05;
    const double target = 0.5 * (1 + 1 / std::sqrt(2.0));
    const auto want_n = static_cast<std::uint64_t>(std::ceil(2.0 * 2.0 / (eps * eps) * std::log(2.0 / delta)));
    int within = 0;
    std::uint64_t samples = 0;
    for (int run = 0; run < 20; ++run) {
        auto rep = estimate_quasi(comp, backend, dec, Event::parse("0"), eps, delta, 100 + run, 0);
        within += std::abs(rep.estimate - target) <= eps;
        samples = rep.samples;
        if (rep.samples != want_n) return {false, "sample count " + std::to_string(rep.samples)};
    }
    std::ostringstream os;
    os << within << "/20 runs within " << eps << " of " << target << ", N=" << samples << ", |r|_1=" << dec.negativity;
    return {within >= 19 && std::abs(dec.negativity - std::sqrt(2.0)) < kRobustTol, os.str()};
}

// 9 ------------------------------------------------------------------------
Outcome cluster() {
    auto c = parse_circuit(std::string(POLYSIM_SOURCE_DIR) + "/circuits/cluster.json");
    auto comp = build_computation(c);
    auto born = evaluate_born(comp);
    auto backend = derive_vertex_backend(comp, family_stages(comp, "cube"));
    auto exact = propagate_exact(comp, backend);
    bool ok = born.probabilities.size() == 2;
    for (std::uint64_t s : {0u, 1u}) {
        const std::string key = s ? "1" : "0";
        ok = ok && std::abs(born.probabilities.at(key) - 0.5) <= kOracleTol &&
             std::abs(exact.probabilities.at(key) - 0.5) <= kOracleTol &&
             max_abs_diff(born.post_states.at(key), basis_projector(1, s)) <= kOracleTol &&
             max_abs_diff(residual_state(backend.stages.back(), exact.final_weights.at(key)), basis_projector(1, s)) <=
                 kOracleTol;
    }
    auto tv = [](const Counts &counts) {
        double shots = 0;
        for (const auto &[_, v] : counts) shots += double(v);
        double d = 0;
        for (const char *k : {"0", "1"}) d += std::abs((counts.count(k) ? double(counts.at(k)) : 0.0) / shots - 0.5);
        return d / 2;
    };
    const double tv_vertex = tv(sample(comp, backend, 10000, 9, 0));
    const double tv_tableau = tv(run_tableau_fast(c, 10000, 9, 0).counts);
    std::ostringstream os;
    os << "oracle and vertex backend uniform with |s><s| residuals; TV vertex " << tv_vertex << ", tableau " << tv_tableau;
    return {ok && tv_vertex < kTvTol && tv_tableau < kTvTol, os.str()};
}

// 10 -----------------------------------------------------------------------
Outcome contextuality() {
    std::vector<PauliIndex> all;
    for (std::uint64_t a = 0; a < 16; ++a) all.push_back(PauliIndex::from_code(2, a));
    if (!value_assignments(all).empty()) return {false, "E_2 admits a value assignment"};
    std::size_t subspaces = 0;
    for (std::size_t n = 1; n <= 2; ++n) {
        const std::uint32_t m = 1u << (2 * n);
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); mask += 2) {
            bool sub = true;
            for (std::uint32_t a = 0; a < m && sub; ++a) {
                if (!((mask >> a) & 1)) continue;
                for (std::uint32_t b = 0; b < m && sub; ++b) {
                    if (!((mask >> b) & 1)) continue;
                    sub = ((mask >> (a ^ b)) & 1) && !omega(PauliIndex::from_code(n, a), PauliIndex::from_code(n, b));
                }
            }
            if (!sub) continue;
            std::vector<PauliIndex> set;
            for (std::uint32_t a = 0; a < m; ++a)
                if ((mask >> a) & 1) set.push_back(PauliIndex::from_code(n, a));
            const std::size_t k = static_cast<std::size_t>(std::countr_zero(set.size()));
            if (value_assignments(set).size() != (std::size_t{1} << k)) {
                return {false, "isotropic subspace with wrong assignment count"};
            }
            ++subspaces;
        }
    }
    return {true, "E_2 has none; " + std::to_string(subspaces) + " isotropic subspaces (n=1,2) have 2^k each"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"GK correctness vs dense oracle", gk_correctness},
        {"GK performance and scaling", gk_performance},
        {"Enumeration regressions", enumeration},
        {"Robustness", robustness_values},
        {"Preservation", preservation},
        {"Update maps", update_maps},
        {"Composition of update maps", composition},
        {"Quasi-probability estimator", estimator},
        {"Local model end-to-end", cluster},
        {"Contextuality witness", contextuality},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (k + 1) << "] " << criteria[k].first << ": " << o.detail
                  << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}
