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
#include <set>
#include <utility>
#include <vector>

#include "polysim/coeffs.hpp"
#include "polysim/dense.hpp"
#include "polysim/errors.hpp"
#include "polysim/pauli.hpp"

namespace polysim {

/// A phase-space point (Omega, gamma): a closed non-contextual set with a
/// value assignment; gamma[k] is the value on omega[k].
struct CncLabel {
    std::vector<PauliIndex> omega;
    std::vector<std::uint8_t> gamma;

    std::size_t num_qubits() const {
        return omega.empty() ? 0 : omega.front().num_qubits();
    }
};

struct ClosureCheck {
    bool closed = true;
    /// A commuting pair whose sum is missing, when not closed.
    std::optional<std::pair<PauliIndex, PauliIndex>> witness;
};

namespace detail {

inline std::vector<PauliIndex> canonical_set(std::vector<PauliIndex> omega) {
    std::sort(omega.begin(), omega.end());
    omega.erase(std::unique(omega.begin(), omega.end()), omega.end());
    return omega;
}

inline void require_uniform_size(const std::vector<PauliIndex> &omega) {
    for (const auto &a : omega) {
        omega.front().require_same_size(a);
    }
}

}  // namespace detail

inline ClosureCheck is_closed(const std::vector<PauliIndex> &omega_in) {
    auto omega = detail::canonical_set(omega_in);
    if (omega.empty() || !omega.front().is_identity()) {
        throw InputError("is_closed: set must contain the zero index");
    }
    detail::require_uniform_size(omega);
    std::set<PauliIndex> members(omega.begin(), omega.end());
    for (std::size_t i = 0; i < omega.size(); ++i) {
        for (std::size_t j = i + 1; j < omega.size(); ++j) {
            if (polysim::omega(omega[i], omega[j])) {
                continue;
            }
            if (!members.count(omega[i] + omega[j])) {
                return {false, std::make_pair(omega[i], omega[j])};
            }
        }
    }
    return {};
}

/// Solution set of gamma(a+b) + gamma(a) + gamma(b) = beta(a, b) over all
/// commuting pairs of Omega, with gamma(0) = 0: a particular solution plus a
/// kernel basis, or nothing when Omega is contextual.
struct AffineAssignmentSpace {
    std::vector<PauliIndex> domain;
    std::vector<std::uint8_t> particular;
    std::vector<std::vector<std::uint8_t>> kernel;
};

inline std::optional<AffineAssignmentSpace> solve_value_assignments(const std::vector<PauliIndex> &omega_in) {
    auto omega = detail::canonical_set(omega_in);
    auto closure = is_closed(omega);
    if (!closure.closed) {
        throw InputError("value_assignments: set is not closed");
    }
    const std::size_t m = omega.size();
    std::map<PauliIndex, std::size_t> position;
    for (std::size_t k = 0; k < m; ++k) {
        position[omega[k]] = k;
    }
    // Variables are gamma on omega[1..m-1]; omega[0] is the identity.
    const std::size_t vars = m - 1;
    const std::size_t w = bits::words_for(vars + 1);
    std::vector<std::vector<std::uint64_t>> rows;
    for (std::size_t i = 1; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if (!polysim::omega(omega[i], omega[j])) {
                std::vector<std::uint64_t> row(w);
                std::size_t k = position.at(omega[i] + omega[j]);
                bits::set(row, i - 1, true);
                bits::set(row, j - 1, true);
                if (k != 0) {
                    bits::set(row, k - 1, !bits::get(row, k - 1));
                }
                bits::set(row, vars, beta(omega[i], omega[j]));
                rows.push_back(std::move(row));
            }
        }
    }
    std::vector<std::size_t> pivot_cols;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < vars && rank < rows.size(); ++col) {
        std::size_t sel = rank;
        while (sel < rows.size() && !bits::get(rows[sel], col)) {
            ++sel;
        }
        if (sel == rows.size()) {
            continue;
        }
        std::swap(rows[rank], rows[sel]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && bits::get(rows[r], col)) {
                for (std::size_t k = 0; k < w; ++k) {
                    rows[r][k] ^= rows[rank][k];
                }
            }
        }
        pivot_cols.push_back(col);
        ++rank;
    }
    for (std::size_t r = rank; r < rows.size(); ++r) {
        if (bits::get(rows[r], vars)) {
            return std::nullopt;
        }
    }
    std::vector<bool> is_pivot(vars);
    for (auto c : pivot_cols) {
        is_pivot[c] = true;
    }
    AffineAssignmentSpace out;
    out.domain = omega;
    out.particular.assign(m, 0);
    for (std::size_t r = 0; r < rank; ++r) {
        out.particular[pivot_cols[r] + 1] = bits::get(rows[r], vars);
    }
    for (std::size_t free = 0; free < vars; ++free) {
        if (is_pivot[free]) {
            continue;
        }
        std::vector<std::uint8_t> v(m, 0);
        v[free + 1] = 1;
        for (std::size_t r = 0; r < rank; ++r) {
            if (bits::get(rows[r], free)) {
                v[pivot_cols[r] + 1] = 1;
            }
        }
        out.kernel.push_back(std::move(v));
    }
    return out;
}

/// Every value assignment on a closed set; empty iff the set is contextual.
inline std::vector<ValueAssignment> value_assignments(const std::vector<PauliIndex> &omega) {
    auto space = solve_value_assignments(omega);
    if (!space) {
        return {};
    }
    if (space->kernel.size() > 24) {
        throw InputError("value_assignments: solution space too large to enumerate");
    }
    std::vector<ValueAssignment> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << space->kernel.size()); ++mask) {
        ValueAssignment g{space->domain, space->particular};
        for (std::size_t k = 0; k < space->kernel.size(); ++k) {
            if ((mask >> k) & 1) {
                for (std::size_t v = 0; v < g.values.size(); ++v) {
                    g.values[v] ^= space->kernel[k][v];
                }
            }
        }
        out.push_back(std::move(g));
    }
    return out;
}

/// Checks gamma(0) = 0 and the cocycle relation on every commuting pair whose
/// sum is in the domain.
inline bool is_value_assignment(const ValueAssignment &g) {
    if (g.domain.size() != g.values.size()) {
        return false;
    }
    std::map<PauliIndex, std::uint8_t> value;
    for (std::size_t k = 0; k < g.domain.size(); ++k) {
        value[g.domain[k]] = g.values[k] & 1;
    }
    for (const auto &[a, v] : value) {
        if (a.is_identity() && v != 0) {
            return false;
        }
    }
    for (const auto &[a, va] : value) {
        for (const auto &[b, vb] : value) {
            if (!omega(a, b)) {
                auto it = value.find(a + b);
                if (it != value.end() && (it->second ^ va ^ vb ^ beta(a, b)) != 0) {
                    return false;
                }
            }
        }
    }
    return true;
}

inline bool is_valid_label(const CncLabel &label) {
    if (label.omega.size() != label.gamma.size() || label.omega.empty()) {
        return false;
    }
    auto closure = is_closed(label.omega);
    return closure.closed && is_value_assignment({label.omega, label.gamma});
}

namespace detail {

/// Closure of a code set under addition of commuting pairs (small n).
inline std::vector<std::uint32_t> close_codes(std::vector<std::uint32_t> set, std::size_t n) {
    std::vector<bool> member(std::size_t{1} << (2 * n));
    for (auto c : set) {
        member[c] = true;
    }
    auto commute = [n](std::uint32_t a, std::uint32_t b) {
        std::uint32_t mask = (1u << n) - 1;
        return (std::popcount(((a & mask) & (b >> n)) ^ ((b & mask) & (a >> n))) & 1) == 0;
    };
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (commute(set[i], set[j])) {
                std::uint32_t s = set[i] ^ set[j];
                if (!member[s]) {
                    member[s] = true;
                    set.push_back(s);
                }
            }
        }
    }
    std::sort(set.begin(), set.end());
    return set;
}

inline std::vector<PauliIndex> from_codes(const std::vector<std::uint32_t> &codes, std::size_t n) {
    std::vector<PauliIndex> out;
    for (auto c : codes) {
        out.push_back(PauliIndex::from_code(n, c));
    }
    return out;
}

}  // namespace detail

/// All maximal closed non-contextual sets of E_n (n <= 2), by depth-first
/// closure-completion from {0}: a closed non-contextual set is maximal iff no
/// single added element has a non-contextual closure.
inline std::vector<std::vector<PauliIndex>> enumerate_maximal_cnc_sets(std::size_t n) {
    if (n == 0 || n > 2) {
        throw InputError("enumerate_maximal_cnc supports n = 1 or 2");
    }
    const std::uint32_t points = 1u << (2 * n);
    std::set<std::vector<std::uint32_t>> visited;
    std::map<std::vector<std::uint32_t>, bool> noncontextual;
    auto is_nc = [&](const std::vector<std::uint32_t> &s) {
        auto it = noncontextual.find(s);
        if (it != noncontextual.end()) {
            return it->second;
        }
        bool ok = solve_value_assignments(detail::from_codes(s, n)).has_value();
        noncontextual.emplace(s, ok);
        return ok;
    };
    std::vector<std::vector<std::uint32_t>> maximal;
    std::vector<std::vector<std::uint32_t>> stack{{0}};
    visited.insert({0});
    while (!stack.empty()) {
        auto cur = std::move(stack.back());
        stack.pop_back();
        bool extendable = false;
        for (std::uint32_t e = 1; e < points; ++e) {
            if (std::binary_search(cur.begin(), cur.end(), e)) {
                continue;
            }
            auto grown = cur;
            grown.push_back(e);
            grown = detail::close_codes(std::move(grown), n);
            if (!is_nc(grown)) {
                continue;
            }
            extendable = true;
            if (visited.insert(grown).second) {
                stack.push_back(std::move(grown));
            }
        }
        if (!extendable) {
            maximal.push_back(std::move(cur));
        }
    }
    std::sort(maximal.begin(), maximal.end());
    std::vector<std::vector<PauliIndex>> out;
    for (const auto &m : maximal) {
        out.push_back(detail::from_codes(m, n));
    }
    return out;
}

/// Every (Omega, gamma) with Omega maximal closed non-contextual, n <= 2.
inline std::vector<CncLabel> enumerate_maximal_cnc(std::size_t n) {
    std::vector<CncLabel> out;
    for (const auto &omega : enumerate_maximal_cnc_sets(n)) {
        for (auto &g : value_assignments(omega)) {
            out.push_back({std::move(g.domain), std::move(g.values)});
        }
    }
    return out;
}

/// Coordinates of A = 2^-n sum_{a in Omega} (-1)^{gamma(a)} T_a.
inline CoeffVector cnc_coeffs(const CncLabel &label) {
    if (!is_valid_label(label)) {
        throw InputError("cnc_operator: invalid label");
    }
    const std::size_t n = label.num_qubits();
    if (n > 4) {
        throw InputError("cnc_operator supports n <= 4");
    }
    auto out = CoeffVector::zeros(n);
    const double scale = 1.0 / static_cast<double>(std::size_t{1} << n);
    for (std::size_t k = 0; k < label.omega.size(); ++k) {
        out[label.omega[k].code()] = label.gamma[k] ? -scale : scale;
    }
    return out;
}

inline DenseOperator cnc_operator(const CncLabel &label) {
    return from_coeffs(cnc_coeffs(label));
}

}  // namespace polysim
