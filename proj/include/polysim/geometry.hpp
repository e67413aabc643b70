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
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polysim/cnc.hpp"
#include "polysim/coeffs.hpp"
#include "polysim/dd.hpp"
#include "polysim/errors.hpp"
#include "polysim/instrument.hpp"
#include "polysim/lp.hpp"
#include "polysim/tableau.hpp"

namespace polysim {

/// Labeled trace-one Hermitian operators in Pauli coordinates.
struct VertexSet {
    std::size_t n = 0;
    std::vector<std::string> labels;
    std::vector<CoeffVector> vectors;

    std::size_t size() const {
        return labels.size();
    }
    std::size_t dim() const {
        return std::size_t{1} << n;
    }

    std::size_t index_of(std::string_view label) const {
        for (std::size_t k = 0; k < labels.size(); ++k) {
            if (labels[k] == label) {
                return k;
            }
        }
        throw InputError("vertex set: unknown label '" + std::string(label) + "'");
    }

    void add(std::string label, CoeffVector v) {
        labels.push_back(std::move(label));
        vectors.push_back(std::move(v));
    }

    /// Sizes, normalization, unique labels and vectors.
    void validate(double tol = 1e-9) const {
        if (labels.size() != vectors.size()) {
            throw InputError("vertex set: label/vector count mismatch");
        }
        if (labels.empty()) {
            throw InputError("vertex set: empty");
        }
        const double c0 = 1.0 / static_cast<double>(dim());
        for (std::size_t k = 0; k < vectors.size(); ++k) {
            if (vectors[k].n != n || vectors[k].size() != (std::size_t{1} << (2 * n))) {
                throw InputError("vertex set: vector '" + labels[k] + "' has the wrong size");
            }
            if (std::abs(vectors[k][0] - c0) > tol) {
                throw InputError("vertex set: vector '" + labels[k] + "' is not trace one");
            }
            for (std::size_t j = 0; j < k; ++j) {
                if (labels[j] == labels[k]) {
                    throw InputError("vertex set: duplicate label '" + labels[k] + "'");
                }
                if (vectors[j].max_abs_diff(vectors[k]) <= tol) {
                    throw InputError("vertex set: duplicate vector '" + labels[k] + "'");
                }
            }
        }
    }
};

struct Decomposition {
    std::vector<std::string> labels;
    std::vector<double> weights;
    double negativity = 0.0;
};

namespace detail {

/// Rational nearest a double, snapped to a 2^-24 grid when within 1e-12.
inline Rational to_rational(double v) {
    constexpr double grid = 16777216.0;
    double scaled = std::round(v * grid);
    if (std::abs(scaled / grid - v) <= 1e-12 && std::abs(scaled) < 9e15) {
        return Rational(static_cast<long long>(scaled), static_cast<long long>(grid));
    }
    return Rational(v);
}

template <class Scalar>
Scalar from_double(double v) {
    if constexpr (std::is_same_v<Scalar, double>) {
        return v;
    } else {
        return to_rational(v);
    }
}

template <class Scalar>
double to_double(const Scalar &v) {
    if constexpr (std::is_same_v<Scalar, double>) {
        return v;
    } else {
        return v.template convert_to<double>();
    }
}

/// Coordinates used as LP rows: those where some column or the target is
/// nonzero. Row 0 (identity coefficient) is always kept and scaled by 2^n so
/// it reads as a total-mass constraint.
struct LpRows {
    std::vector<std::size_t> coords;
    double scale0 = 1.0;
};

inline LpRows active_rows(const VertexSet &v, const CoeffVector &target) {
    LpRows rows;
    rows.scale0 = static_cast<double>(v.dim());
    for (std::size_t a = 0; a < target.size(); ++a) {
        bool used = a == 0 || std::abs(target[a]) > 1e-15;
        for (std::size_t k = 0; k < v.size() && !used; ++k) {
            used = std::abs(v.vectors[k][a]) > 1e-15;
        }
        if (used) {
            rows.coords.push_back(a);
        }
    }
    return rows;
}

template <class Scalar>
Scalar coord(const CoeffVector &c, std::size_t a, const LpRows &rows) {
    Scalar v = from_double<Scalar>(c[a]);
    if (a == 0) {
        v *= from_double<Scalar>(rows.scale0);
    }
    return v;
}

inline void require_compatible(const CoeffVector &target, const VertexSet &v) {
    if (target.n != v.n || target.size() != (std::size_t{1} << (2 * v.n))) {
        throw InputError("dimension mismatch between target and vertex set");
    }
}

}  // namespace detail

template <class Scalar>
struct BasicMembership {
    bool feasible = false;
    /// Convex weights per vertex when feasible.
    std::vector<Scalar> weights;
    /// When infeasible: w with <w, v> >= 0 for every vertex v and
    /// <w, target> < 0, in Pauli coordinates.
    std::vector<Scalar> separator;
};
using Membership = BasicMembership<double>;

/// Solve sum_y w_y V_y = target, w >= 0 (target need not be normalized: the
/// weights then sum to its trace).
template <class Scalar>
BasicMembership<Scalar> conic_fit(const CoeffVector &target, const VertexSet &v) {
    detail::require_compatible(target, v);
    auto rows = detail::active_rows(v, target);
    std::vector<std::vector<Scalar>> a(rows.coords.size(), std::vector<Scalar>(v.size()));
    std::vector<Scalar> b(rows.coords.size());
    for (std::size_t r = 0; r < rows.coords.size(); ++r) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            a[r][k] = detail::coord<Scalar>(v.vectors[k], rows.coords[r], rows);
        }
        b[r] = detail::coord<Scalar>(target, rows.coords[r], rows);
    }
    auto lp = solve_lp<Scalar>(a, b, std::vector<Scalar>(v.size(), Scalar(0)));
    BasicMembership<Scalar> out;
    if (lp.status == LpStatus::optimal) {
        out.feasible = true;
        out.weights = std::move(lp.x);
        return out;
    }
    out.separator.assign(target.size(), Scalar(0));
    for (std::size_t r = 0; r < rows.coords.size(); ++r) {
        Scalar w = lp.farkas[r];
        if (rows.coords[r] == 0) {
            w *= detail::from_double<Scalar>(rows.scale0);
        }
        out.separator[rows.coords[r]] = w;
    }
    return out;
}

inline Membership membership(const CoeffVector &target, const VertexSet &v) {
    if (std::abs(target[0] - 1.0 / static_cast<double>(v.dim())) > 1e-9) {
        throw InputError("membership: target is not trace one");
    }
    return conic_fit<double>(target, v);
}

inline BasicMembership<Rational> membership_exact(const CoeffVector &target, const VertexSet &v) {
    return conic_fit<Rational>(target, v);
}

template <class Scalar>
struct BasicRobustness {
    Scalar value{0};
    std::vector<Scalar> weights;
};

/// min sum |r_y| subject to sum r_y V_y = target, via r = r+ - r-.
template <class Scalar>
BasicRobustness<Scalar> robustness_lp(const CoeffVector &target, const VertexSet &v) {
    detail::require_compatible(target, v);
    auto rows = detail::active_rows(v, target);
    const std::size_t m = v.size();
    std::vector<std::vector<Scalar>> a(rows.coords.size(), std::vector<Scalar>(2 * m));
    std::vector<Scalar> b(rows.coords.size());
    for (std::size_t r = 0; r < rows.coords.size(); ++r) {
        for (std::size_t k = 0; k < m; ++k) {
            Scalar c = detail::coord<Scalar>(v.vectors[k], rows.coords[r], rows);
            a[r][k] = c;
            a[r][m + k] = -c;
        }
        b[r] = detail::coord<Scalar>(target, rows.coords[r], rows);
    }
    auto lp = solve_lp<Scalar>(a, b, std::vector<Scalar>(2 * m, Scalar(1)));
    if (lp.status != LpStatus::optimal) {
        throw InputError("robustness: target lies outside the affine span of the vertex set");
    }
    BasicRobustness<Scalar> out;
    out.value = lp.objective;
    for (std::size_t k = 0; k < m; ++k) {
        out.weights.push_back(lp.x[k] - lp.x[m + k]);
    }
    return out;
}

struct RobustnessResult {
    double value = 0.0;
    Decomposition decomposition;
};

inline RobustnessResult robustness(const CoeffVector &target, const VertexSet &v) {
    auto r = robustness_lp<double>(target, v);
    RobustnessResult out;
    out.value = r.value;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (std::abs(r.weights[k]) > 1e-12) {
            out.decomposition.labels.push_back(v.labels[k]);
            out.decomposition.weights.push_back(r.weights[k]);
            out.decomposition.negativity += std::abs(r.weights[k]);
        }
    }
    return out;
}

inline Rational robustness_exact(const CoeffVector &target, const VertexSet &v) {
    return robustness_lp<Rational>(target, v).value;
}

// ---------------------------------------------------------------------------
// Preservation and update maps.

struct PreservationViolation {
    std::string x, a, s;
    /// negative_trace | nonzero_null_image | not_contained
    std::string kind;
    double trace = 0.0;
    /// Normalized image (not_contained) or raw image coefficients.
    CoeffVector image;
    std::vector<double> separator;
};

struct PreservationReport {
    bool ok = true;
    std::size_t checked = 0;
    std::vector<PreservationViolation> violations;
};

namespace detail {

inline void require_instrument_spaces(const DenseInstrument &phi, const VertexSet &a, const VertexSet &b) {
    if (phi.input_dim != a.dim() || phi.output_dim != b.dim()) {
        throw InputError("instrument dimensions do not match the vertex sets");
    }
}

inline CoeffVector image_coeffs(const DenseInstrument &phi, std::size_t a, std::size_t s, const CoeffVector &x) {
    return pauli_coefficients(apply_cp(phi, a, s, from_coeffs(x)));
}

inline CoeffVector scaled(CoeffVector v, double f) {
    for (auto &c : v.c) {
        c *= f;
    }
    return v;
}

}  // namespace detail

/// Every x, a, s: nonnegative trace; zero image when the trace vanishes;
/// otherwise the normalized image lies in conv(B).
inline PreservationReport check_preservation(
    const DenseInstrument &phi, const VertexSet &a_set, const VertexSet &b_set, double tol = 1e-9) {
    detail::require_instrument_spaces(phi, a_set, b_set);
    PreservationReport report;
    for (std::size_t x = 0; x < a_set.size(); ++x) {
        for (std::size_t a = 0; a < phi.num_inputs(); ++a) {
            for (std::size_t s = 0; s < phi.num_outcomes(); ++s) {
                ++report.checked;
                auto img = apply_cp(phi, a, s, from_coeffs(a_set.vectors[x]));
                double tr = img.trace().real();
                PreservationViolation v{a_set.labels[x], phi.input_labels[a], phi.outcome_labels[s], "", tr, {}, {}};
                if (tr < -tol) {
                    v.kind = "negative_trace";
                    v.image = pauli_coefficients(img);
                } else if (tr <= tol) {
                    if (img.max_abs() <= tol) {
                        continue;
                    }
                    v.kind = "nonzero_null_image";
                    v.image = pauli_coefficients(img);
                } else {
                    auto normalized = detail::scaled(pauli_coefficients(img), 1.0 / tr);
                    auto fit = conic_fit<double>(normalized, b_set);
                    if (fit.feasible) {
                        continue;
                    }
                    v.kind = "not_contained";
                    v.image = std::move(normalized);
                    v.separator = std::move(fit.separator);
                }
                report.ok = false;
                report.violations.push_back(std::move(v));
            }
        }
    }
    return report;
}

/// q_{x,a}(y, s): for each (x, a) a list of moves to (y, s) with weight p.
template <class Scalar>
struct BasicUpdateMapTable {
    struct Move {
        std::size_t y = 0;
        std::size_t s = 0;
        Scalar p{0};
    };
    std::vector<std::string> x_labels, a_labels, y_labels, s_labels;
    std::vector<std::vector<Move>> rows;

    const std::vector<Move> &row(std::size_t x, std::size_t a) const {
        if (x >= x_labels.size() || a >= a_labels.size()) {
            throw InputError("update map: missing table entry");
        }
        return rows[x * a_labels.size() + a];
    }
    std::vector<Move> &row(std::size_t x, std::size_t a) {
        if (x >= x_labels.size() || a >= a_labels.size()) {
            throw InputError("update map: missing table entry");
        }
        return rows[x * a_labels.size() + a];
    }

    static BasicUpdateMapTable shaped(
        std::vector<std::string> xs, std::vector<std::string> as, std::vector<std::string> ys,
        std::vector<std::string> ss) {
        BasicUpdateMapTable t;
        t.x_labels = std::move(xs);
        t.a_labels = std::move(as);
        t.y_labels = std::move(ys);
        t.s_labels = std::move(ss);
        t.rows.assign(t.x_labels.size() * t.a_labels.size(), {});
        return t;
    }

    Scalar row_sum(std::size_t x, std::size_t a) const {
        Scalar total{0};
        for (const auto &mv : row(x, a)) {
            total += mv.p;
        }
        return total;
    }
};
using UpdateMapTable = BasicUpdateMapTable<double>;
using ExactUpdateMapTable = BasicUpdateMapTable<Rational>;

template <class Scalar>
BasicUpdateMapTable<Scalar> derive_update_map_as(
    const DenseInstrument &phi, const VertexSet &a_set, const VertexSet &b_set, double tol = 1e-9) {
    detail::require_instrument_spaces(phi, a_set, b_set);
    auto table = BasicUpdateMapTable<Scalar>::shaped(
        a_set.labels, phi.input_labels, b_set.labels, phi.outcome_labels);
    for (std::size_t x = 0; x < a_set.size(); ++x) {
        for (std::size_t a = 0; a < phi.num_inputs(); ++a) {
            auto &row = table.row(x, a);
            for (std::size_t s = 0; s < phi.num_outcomes(); ++s) {
                auto img = apply_cp(phi, a, s, from_coeffs(a_set.vectors[x]));
                double tr = img.trace().real();
                if (tr < -tol || (tr <= tol && img.max_abs() > tol)) {
                    throw PreconditionError(
                        "derive_update_map: preservation fails at x=" + a_set.labels[x] + " s=" +
                        phi.outcome_labels[s]);
                }
                if (tr <= tol) {
                    continue;
                }
                auto fit = conic_fit<Scalar>(pauli_coefficients(img), b_set);
                if (!fit.feasible) {
                    throw PreconditionError(
                        "derive_update_map: image not contained at x=" + a_set.labels[x] + " s=" +
                        phi.outcome_labels[s]);
                }
                for (std::size_t y = 0; y < b_set.size(); ++y) {
                    if (fit.weights[y] > Scalar(0)) {
                        row.push_back({y, s, fit.weights[y]});
                    }
                }
            }
        }
    }
    return table;
}

/// An update map simulating phi with respect to (A, B), by one LP per
/// (x, a, s) on the unnormalized image.
inline UpdateMapTable derive_update_map(
    const DenseInstrument &phi, const VertexSet &a_set, const VertexSet &b_set, double tol = 1e-9) {
    return derive_update_map_as<double>(phi, a_set, b_set, tol);
}

/// Same, in exact rational arithmetic (image coordinates snapped to rationals).
inline ExactUpdateMapTable derive_update_map_exact(
    const DenseInstrument &phi, const VertexSet &a_set, const VertexSet &b_set, double tol = 1e-9) {
    return derive_update_map_as<Rational>(phi, a_set, b_set, tol);
}

inline UpdateMapTable to_double(const ExactUpdateMapTable &t) {
    auto out = UpdateMapTable::shaped(t.x_labels, t.a_labels, t.y_labels, t.s_labels);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (const auto &mv : t.rows[r]) {
            out.rows[r].push_back({mv.y, mv.s, mv.p.convert_to<double>()});
        }
    }
    return out;
}

struct SimulationCheck {
    bool ok = true;
    double max_error = 0.0;
    double max_row_error = 0.0;
    bool nonnegative = true;
};

/// The simulation diagram: sum_y q_{x,a}(y,s) B_y = Phi_a^s(A_x) for all
/// x, a, s, plus row-stochasticity.
inline SimulationCheck check_simulates(
    const DenseInstrument &phi, const UpdateMapTable &q, const VertexSet &a_set, const VertexSet &b_set,
    double tol = 1e-9) {
    detail::require_instrument_spaces(phi, a_set, b_set);
    if (q.x_labels != a_set.labels || q.y_labels != b_set.labels || q.a_labels != phi.input_labels ||
        q.s_labels != phi.outcome_labels) {
        throw InputError("check_simulates: table labels do not match the instrument and vertex sets");
    }
    SimulationCheck out;
    for (std::size_t x = 0; x < a_set.size(); ++x) {
        auto ax = from_coeffs(a_set.vectors[x]);
        for (std::size_t a = 0; a < phi.num_inputs(); ++a) {
            std::vector<DenseOperator> pushed(phi.num_outcomes(), DenseOperator(b_set.dim(), b_set.dim()));
            double total = 0.0;
            for (const auto &mv : q.row(x, a)) {
                if (mv.p < 0) {
                    out.nonnegative = false;
                }
                pushed[mv.s] += from_coeffs(b_set.vectors[mv.y]) * Complex(mv.p);
                total += mv.p;
            }
            out.max_row_error = std::max(out.max_row_error, std::abs(total - 1.0));
            for (std::size_t s = 0; s < phi.num_outcomes(); ++s) {
                out.max_error = std::max(out.max_error, max_abs_diff(pushed[s], apply_cp(phi, a, s, ax)));
            }
        }
    }
    out.ok = out.nonnegative && out.max_error <= tol && out.max_row_error <= tol;
    return out;
}

/// Outcome label of a two-step composite; "*" is the unit.
inline std::string join_labels(const std::string &s, const std::string &r) {
    if (s == "*") {
        return r;
    }
    if (r == "*") {
        return s;
    }
    return s + r;
}

inline std::vector<std::string> product_labels(const std::vector<std::string> &s, const std::vector<std::string> &r) {
    std::vector<std::string> out;
    for (const auto &a : s) {
        for (const auto &b : r) {
            out.push_back(join_labels(a, b));
        }
    }
    auto sorted = out;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InputError("composite outcome labels collide");
    }
    return out;
}

/// (q2 * q1)_{x,a}(z, s r) = sum_y q1_{x,a}(y, s) q2_{y,s}(z, r). q2's input
/// set must be q1's outcome set, or the single wildcard "*".
template <class Scalar>
BasicUpdateMapTable<Scalar> star_compose(const BasicUpdateMapTable<Scalar> &q1, const BasicUpdateMapTable<Scalar> &q2) {
    if (q2.x_labels != q1.y_labels) {
        throw InputError("star_compose: vertex sets do not chain");
    }
    const bool wildcard = q2.a_labels == std::vector<std::string>{"*"};
    if (!wildcard && q2.a_labels != q1.s_labels) {
        throw InputError("star_compose: input set does not match the outcome set");
    }
    auto out = BasicUpdateMapTable<Scalar>::shaped(
        q1.x_labels, q1.a_labels, q2.y_labels, product_labels(q1.s_labels, q2.s_labels));
    const std::size_t nr = q2.s_labels.size();
    for (std::size_t x = 0; x < q1.x_labels.size(); ++x) {
        for (std::size_t a = 0; a < q1.a_labels.size(); ++a) {
            std::map<std::pair<std::size_t, std::size_t>, Scalar> acc;
            for (const auto &m1 : q1.row(x, a)) {
                for (const auto &m2 : q2.row(m1.y, wildcard ? 0 : m1.s)) {
                    acc[{m2.y, m1.s * nr + m2.s}] += m1.p * m2.p;
                }
            }
            auto &row = out.row(x, a);
            for (const auto &[key, p] : acc) {
                row.push_back({key.first, key.second, p});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Builtin vertex sets.

namespace detail {

/// Canonical generator list of a stabilizer group: greedy independent
/// elements in sorted order, rendered as signed Pauli strings.
inline std::string stabilizer_label(const StabilizerTableau &t) {
    const std::size_t n = t.num_qubits();
    auto group = t.stabilizer_group();
    std::vector<std::uint64_t> basis;
    std::vector<std::size_t> lead;
    std::string out;
    for (const auto &[code, sign] : group) {
        if (code == 0) {
            continue;
        }
        std::uint64_t v = code;
        for (std::size_t k = 0; k < basis.size(); ++k) {
            if ((v >> lead[k]) & 1) {
                v ^= basis[k];
            }
        }
        if (v == 0) {
            continue;
        }
        basis.push_back(v);
        lead.push_back(static_cast<std::size_t>(std::bit_width(v) - 1));
        for (std::size_t k = 0; k + 1 < basis.size(); ++k) {
            if ((basis[k] >> lead.back()) & 1) {
                basis[k] ^= v;
            }
        }
        PhasedPauli p{static_cast<std::uint8_t>(sign ? 2 : 0), PauliIndex::from_code(n, code)};
        if (!out.empty()) {
            out += ',';
        }
        out += format_pauli(p);
    }
    return out;
}

inline CoeffVector stabilizer_coeffs(const StabilizerTableau &t) {
    const std::size_t n = t.num_qubits();
    auto out = CoeffVector::zeros(n);
    const double scale = 1.0 / static_cast<double>(std::size_t{1} << n);
    for (const auto &[code, sign] : t.stabilizer_group()) {
        out[code] = sign ? -scale : scale;
    }
    return out;
}

inline CoeffVector tensor(const CoeffVector &a, const CoeffVector &b) {
    // Code layout: bit j = x_j, bit n+j = z_j, qubit 0 first.
    const std::size_t n = a.n + b.n;
    auto out = CoeffVector::zeros(n);
    for (std::uint64_t ca = 0; ca < a.size(); ++ca) {
        if (a[ca] == 0.0) {
            continue;
        }
        std::uint64_t ax = ca & ((std::uint64_t{1} << a.n) - 1), az = ca >> a.n;
        for (std::uint64_t cb = 0; cb < b.size(); ++cb) {
            if (b[cb] == 0.0) {
                continue;
            }
            std::uint64_t bx = cb & ((std::uint64_t{1} << b.n) - 1), bz = cb >> b.n;
            std::uint64_t x = ax | (bx << a.n), z = az | (bz << a.n);
            out[x | (z << n)] = a[ca] * b[cb];
        }
    }
    return out;
}

}  // namespace detail

inline VertexSet scalar_vertex_set() {
    VertexSet v;
    v.n = 0;
    auto one = CoeffVector::zeros(0);
    one[0] = 1.0;
    v.add("1", one);
    return v;
}

/// All stabilizer states, n <= 3.
inline VertexSet stabilizer_vertex_set(std::size_t n) {
    VertexSet v;
    v.n = n;
    for (const auto &t : enumerate_stabilizer_states(n)) {
        v.add(detail::stabilizer_label(t), detail::stabilizer_coeffs(t));
    }
    return v;
}

/// Tensor products of per-qubit vertex sets; labels joined with "|".
inline VertexSet product_vertex_set(const VertexSet &single, std::size_t n) {
    if (n == 0) {
        return scalar_vertex_set();
    }
    VertexSet out = single;
    for (std::size_t k = 1; k < n; ++k) {
        VertexSet next;
        next.n = out.n + single.n;
        for (std::size_t i = 0; i < out.size(); ++i) {
            for (std::size_t j = 0; j < single.size(); ++j) {
                next.add(out.labels[i] + "|" + single.labels[j], detail::tensor(out.vectors[i], single.vectors[j]));
            }
        }
        out = std::move(next);
    }
    return out;
}

/// The 8 operators (1 +-X +-Y +-Z)/2.
inline VertexSet cube_vertex_set() {
    VertexSet v;
    v.n = 1;
    for (int mask = 0; mask < 8; ++mask) {
        auto c = CoeffVector::zeros(1);
        c[0] = 0.5;
        std::string label;
        const char *letters = "XYZ";
        const std::uint64_t codes[3] = {1, 3, 2};
        for (int k = 0; k < 3; ++k) {
            bool neg = (mask >> (2 - k)) & 1;
            c[codes[k]] = neg ? -0.5 : 0.5;
            label += neg ? '-' : '+';
            label += letters[k];
        }
        v.add(label, c);
    }
    return v;
}

inline VertexSet cnc_vertex_set(std::size_t n) {
    VertexSet v;
    v.n = n;
    std::size_t k = 0;
    for (const auto &label : enumerate_maximal_cnc(n)) {
        v.add("cnc" + std::to_string(k++), cnc_coeffs(label));
    }
    return v;
}

/// Vertices of {A in Herm_1 : Tr(A V_y) >= 0 for all y}. n = 1 always; n = 2
/// only with allow_large (slow).
inline VertexSet dual_vertices(const VertexSet &v, bool allow_large = false) {
    v.validate();
    if (v.n == 0 || v.n > 2 || (v.n == 2 && !allow_large)) {
        throw InputError("dual_vertices supports n = 1 (n = 2 with the override flag)");
    }
    const std::size_t d = std::size_t{1} << (2 * v.n);
    std::vector<RationalVector> h;
    for (const auto &vec : v.vectors) {
        RationalVector row(d);
        for (std::size_t a = 0; a < d; ++a) {
            row[a] = detail::to_rational(vec[a]);
        }
        h.push_back(std::move(row));
    }
    RationalVector bound(d, Rational(0));
    bound[0] = 1;
    h.push_back(bound);
    auto rays = extreme_rays(h);
    const Rational c0(1, static_cast<long long>(std::size_t{1} << v.n));
    std::vector<CoeffVector> verts;
    for (auto &ray : rays) {
        if (ray[0] <= 0) {
            throw VerificationError("dual_vertices: dual body is unbounded");
        }
        auto c = CoeffVector::zeros(v.n);
        for (std::size_t a = 0; a < d; ++a) {
            c[a] = Rational(ray[a] / ray[0] * c0).convert_to<double>();
        }
        verts.push_back(std::move(c));
    }
    std::sort(verts.begin(), verts.end(), [](const CoeffVector &a, const CoeffVector &b) { return a.c > b.c; });
    VertexSet out;
    out.n = v.n;
    for (std::size_t k = 0; k < verts.size(); ++k) {
        out.add("d" + std::to_string(k), std::move(verts[k]));
    }
    return out;
}

/// Named sets: lp0 | spN | local_spN | cubeN (cube = cube1) | p1 | lp1 | cncN.
inline std::optional<VertexSet> builtin_vertex_set(std::string_view name) {
    auto suffix_n = [&](std::string_view prefix) -> std::optional<std::size_t> {
        if (name.substr(0, prefix.size()) != prefix) {
            return std::nullopt;
        }
        auto rest = name.substr(prefix.size());
        if (rest.empty()) {
            return std::size_t{1};
        }
        if (rest.size() != 1 || rest[0] < '0' || rest[0] > '9') {
            return std::nullopt;
        }
        return static_cast<std::size_t>(rest[0] - '0');
    };
    if (name == "lp0" || name == "scalar") {
        return scalar_vertex_set();
    }
    if (name == "p1") {
        return dual_vertices(stabilizer_vertex_set(1));
    }
    if (name == "lp1") {
        return dual_vertices(product_vertex_set(stabilizer_vertex_set(1), 1));
    }
    if (auto n = suffix_n("local_sp")) {
        if (*n == 0 || *n > 3) {
            throw InputError("local_sp supports n = 1..3");
        }
        return product_vertex_set(stabilizer_vertex_set(1), *n);
    }
    if (auto n = suffix_n("sp")) {
        return *n == 0 ? scalar_vertex_set() : stabilizer_vertex_set(*n);
    }
    if (auto n = suffix_n("cube")) {
        if (*n > 3) {
            throw InputError("cube products support n <= 3");
        }
        return product_vertex_set(cube_vertex_set(), *n);
    }
    if (auto n = suffix_n("cnc")) {
        return cnc_vertex_set(*n);
    }
    return std::nullopt;
}

/// Stage set for a family ("sp", "local_sp", "cube") at n qubits; n = 0 is
/// always the scalar set.
inline VertexSet family_vertex_set(std::string_view family, std::size_t n) {
    if (n == 0) {
        return scalar_vertex_set();
    }
    if (family == "sp" || family == "local_sp" || family == "cube") {
        return *builtin_vertex_set(std::string(family) + std::to_string(n));
    }
    throw InputError("unknown vertex family '" + std::string(family) + "'");
}

}  // namespace polysim
