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

double tv_distance(const std::map<std::string, double> &p, const Counts &counts) {
    double shots = 0;
    for (const auto &[_, v] : counts) shots += double(v);
    std::set<std::string> keys;
    for (const auto &[k, _] : p) keys.insert(k);
    for (const auto &[k, _] : counts) keys.insert(k);
    double tv = 0;
    for (const auto &k : keys) {
        double a = p.count(k) ? p.at(k) : 0.0;
        double b = counts.count(k) ? double(counts.at(k)) / shots : 0.0;
        tv += std::abs(a - b);
    }
    return tv / 2;
}

Circuit magic_x() {
    Circuit c;
    c.model = "pauli";
    c.n = 1;
    c.resource.kind = "magic_t_all";
    CircuitStep m;
    m.kind = CircuitStep::Kind::measure;
    m.cases = {{"*", "X"}};
    c.steps = {m};
    return c;
}

}  // namespace

TEST(Engine, ExactPropagationMatchesBornOnRandomAdaptiveCircuits) {
    std::mt19937_64 rng(2026);
    for (int trial = 0; trial < 20; ++trial) {
        auto ra = random_adaptive(rng, 1 + trial % 2);
        auto comp = build_computation(ra.circuit);
        auto backend = derive_vertex_backend(comp, family_stages(comp, ra.family));
        auto exact = propagate_exact(comp, backend);
        auto born = evaluate_born(comp);
        for (const auto &[h, p] : born.probabilities) {
            ASSERT_TRUE(exact.probabilities.count(h)) << h;
            EXPECT_NEAR(exact.probabilities.at(h), p, 1e-9) << h;
            // Residual state carried by the vertex weights.
            auto rho = residual_state(backend.stages.back(), exact.final_weights.at(h));
            EXPECT_LT(max_abs_diff(rho, born.post_states.at(h)), 1e-9) << h;
        }
        for (const auto &[h, p] : exact.probabilities) {
            if (!born.probabilities.count(h)) {
                EXPECT_NEAR(p, 0.0, 1e-9);
            }
        }
    }
}

TEST(Engine, SamplingIsDeterministicAcrossThreadCounts) {
    std::mt19937_64 rng(7);
    auto ra = random_adaptive(rng, 2);
    auto comp = build_computation(ra.circuit);
    auto backend = derive_vertex_backend(comp, family_stages(comp, ra.family));
    auto one = sample(comp, backend, 20000, 42, 1);
    EXPECT_EQ(one, sample(comp, backend, 20000, 42, 4));
    EXPECT_EQ(one, sample(comp, backend, 20000, 42, 3));
    EXPECT_NE(one, sample(comp, backend, 20000, 43, 1));
    EXPECT_LT(tv_distance(propagate_exact(comp, backend).probabilities, one), 0.03);
    auto probs = evaluate_born(comp).probabilities;
    EXPECT_EQ(sample_distribution(probs, 9000, 5, 1), sample_distribution(probs, 9000, 5, 8));
    EXPECT_THROW(sample(comp, backend, 0, 1, 1), InputError);
}

TEST(Engine, TableauBackendMatchesOracle) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        Circuit c;
        c.model = "clifford";
        c.n = 1 + trial % 3;
        for (int k = 0; k < 12; ++k) {
            auto g = random_gate(rng, c.n);
            CircuitStep st;
            st.kind = CircuitStep::Kind::gate;
            st.gate = std::string(gate_name(g.kind));
            st.qubits = {g.q0};
            if (is_two_qubit(g.kind)) st.qubits.push_back(g.q1);
            c.steps.push_back(st);
            if (k % 4 == 3) {
                CircuitStep m;
                m.kind = CircuitStep::Kind::measure;
                m.cases["*"] = format_pauli(random_hermitian_pauli(rng, c.n));
                c.steps.push_back(m);
            }
        }
        auto oracle = evaluate_born(build_computation(c)).probabilities;
        auto run = run_tableau_fast(c, 20000, 3, 2);
        EXPECT_LT(tv_distance(oracle, run.counts), 0.03) << trial;
        EXPECT_EQ(run.counts, run_tableau_fast(c, 20000, 3, 1).counts);
    }
}

TEST(Engine, BellParityIsExact) {
    Circuit c;
    c.model = "clifford";
    c.n = 2;
    CircuitStep h, cx, m0, m1;
    h.kind = cx.kind = CircuitStep::Kind::gate;
    h.gate = "H";
    h.qubits = {0};
    cx.gate = "CNOT";
    cx.qubits = {0, 1};
    m0.kind = m1.kind = CircuitStep::Kind::measure;
    m0.cases = {{"*", "ZI"}};
    m1.cases = {{"*", "IZ"}};
    c.steps = {h, cx, m0, m1};
    auto run = run_tableau_fast(c, 1000, 7, 1);
    std::uint64_t total = 0;
    for (const auto &[k, v] : run.counts) {
        EXPECT_TRUE(k == "00" || k == "11") << k;
        total += v;
    }
    EXPECT_EQ(total, 1000u);
    EXPECT_EQ(run.timing.measurements, 2000u);
}

TEST(Engine, TableauRejectsNonCliffordSteps) {
    Circuit c;
    c.model = "clifford";
    c.n = 1;
    CircuitStep t;
    t.kind = CircuitStep::Kind::gate;
    t.gate = "T";
    t.qubits = {0};
    c.steps = {t};
    EXPECT_THROW(run_tableau_fast(c, 10, 1, 1), PreconditionError);
    auto m = magic_x();
    EXPECT_THROW(run_tableau_fast(m, 10, 1, 1), PreconditionError);
}

TEST(Estimator, HoeffdingCount) {
    EXPECT_EQ(hoeffding_samples(std::sqrt(2.0), 0.01, 0.05), 147556u);
    EXPECT_EQ(hoeffding_samples(1.0, 0.1, 0.1), static_cast<std::uint64_t>(std::ceil(200.0 * std::log(20.0))));
    EXPECT_THROW(hoeffding_samples(1.0, 0.0, 0.1), InputError);
    EXPECT_THROW(hoeffding_samples(1.0, 0.1, 1.5), InputError);
}

TEST(Estimator, UnbiasedOverManyShortRuns) {
    auto comp = build_computation(magic_x());
    auto stages = family_stages(comp, "sp");
    auto backend = derive_vertex_backend(comp, stages, 1);
    auto rho1 = pauli_coefficients(apply_cp(comp.steps[0], 0, 0, DenseOperator::identity(1)));
    auto dec = robustness(rho1, backend.stages[1]).decomposition;
    const double target = 0.5 * (1 + 1 / std::sqrt(2.0));
    double mean = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        auto rep = estimate_quasi(comp, backend, dec, Event::parse("0"), 0.1, 0.1, 1000 + r, 1, 2000);
        EXPECT_EQ(rep.samples, 2000u);
        mean += rep.estimate / reps;
    }
    // Per-run sd <= sqrt(2)/sqrt(2000); the mean of 200 runs has sd ~0.0022.
    EXPECT_NEAR(mean, target, 0.01);
}

TEST(Estimator, SingleRunMeetsTolerance) {
    auto comp = build_computation(magic_x());
    auto backend = derive_vertex_backend(comp, family_stages(comp, "sp"), 1);
    auto rho1 = pauli_coefficients(apply_cp(comp.steps[0], 0, 0, DenseOperator::identity(1)));
    auto dec = robustness(rho1, backend.stages[1]).decomposition;
    auto rep = estimate_quasi(comp, backend, dec, Event::parse("0"), 0.01, 0.05, 11, 4);
    EXPECT_EQ(rep.samples, 147556u);
    EXPECT_NEAR(rep.negativity, std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(rep.estimate, 0.5 * (1 + 1 / std::sqrt(2.0)), 0.01);
    // Same seed, different thread count: identical estimate.
    EXPECT_EQ(rep.estimate, estimate_quasi(comp, backend, dec, Event::parse("0"), 0.01, 0.05, 11, 1).estimate);
}

TEST(Estimator, EventMasks) {
    auto e = Event::parse("1*0");
    EXPECT_TRUE(e.matches("100"));
    EXPECT_TRUE(e.matches("110"));
    EXPECT_FALSE(e.matches("101"));
    EXPECT_FALSE(e.matches("10"));
    EXPECT_THROW(Event::parse("1x"), InputError);
}

TEST(Backend, TamperedTableIsCaught) {
    auto comp = build_computation(magic_x());
    auto backend = derive_vertex_backend(comp, family_stages(comp, "cube"));
    auto &row = backend.tables[1].rows.front();
    ASSERT_FALSE(row.empty());
    row.front().p += 0.25;
    EXPECT_THROW(check_backend(comp, backend), VerificationError);
}

TEST(Bench, SmallRunCompletes) {
    auto r = bench_tableau(20, 500, 20, 3);
    EXPECT_EQ(r.gates, 500u);
    EXPECT_EQ(r.measurements, 20u);
    EXPECT_LE(r.random_outcomes, 20u);
    EXPECT_GE(r.total_seconds, 0.0);
    EXPECT_THROW(bench_tableau(1, 10, 1, 1), InputError);
}
