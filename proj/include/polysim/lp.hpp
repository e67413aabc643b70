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
#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "polysim/errors.hpp"

namespace polysim {

using Rational = boost::multiprecision::cpp_rational;

enum class LpStatus { optimal, infeasible, unbounded };

/// Numeric policy for the simplex: pivot/feasibility tolerance and cleanup.
template <class Scalar>
struct LpTraits;

template <>
struct LpTraits<double> {
    static double tol() {
        return 1e-9;
    }
    static double clean(double v) {
        return std::abs(v) < 1e-13 ? 0.0 : v;
    }
};

template <>
struct LpTraits<Rational> {
    static Rational tol() {
        return Rational(0);
    }
    static Rational clean(const Rational &v) {
        return v;
    }
};

template <class Scalar>
struct LpResult {
    LpStatus status = LpStatus::infeasible;
    std::vector<Scalar> x;
    Scalar objective{0};
    /// When infeasible: y with y^T A >= 0 and y^T b < 0 (Farkas).
    std::vector<Scalar> farkas;
};

namespace detail {

template <class Scalar>
class SimplexTableau {
   public:
    SimplexTableau(const std::vector<std::vector<Scalar>> &a, const std::vector<Scalar> &b)
        : m_(b.size()), n_(a.empty() ? 0 : a.front().size()), width_(n_ + m_ + 1), t_(m_ * width_), flip_(m_) {
        for (std::size_t r = 0; r < m_; ++r) {
            if (a[r].size() != n_) {
                throw InputError("lp: ragged constraint matrix");
            }
            flip_[r] = b[r] < Scalar(0);
            for (std::size_t j = 0; j < n_; ++j) {
                at(r, j) = flip_[r] ? Scalar(-a[r][j]) : a[r][j];
            }
            at(r, n_ + r) = Scalar(1);
            at(r, width_ - 1) = flip_[r] ? Scalar(-b[r]) : b[r];
            basis_.push_back(n_ + r);
        }
    }

    Scalar &at(std::size_t r, std::size_t c) {
        return t_[r * width_ + c];
    }
    const Scalar &at(std::size_t r, std::size_t c) const {
        return t_[r * width_ + c];
    }

    /// Bland's rule over columns [0, allowed). Returns false if unbounded.
    bool optimize(const std::vector<Scalar> &cost, std::size_t allowed) {
        const Scalar tol = LpTraits<Scalar>::tol();
        std::vector<bool> in_basis(width_);
        for (std::size_t iter = 0;; ++iter) {
            if (iter > 200000) {
                throw VerificationError("lp: iteration limit reached");
            }
            std::fill(in_basis.begin(), in_basis.end(), false);
            for (auto b : basis_) {
                in_basis[b] = true;
            }
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j) {
                if (in_basis[j]) {
                    continue;
                }
                Scalar d = cost[j];
                for (std::size_t r = 0; r < m_; ++r) {
                    if (at(r, j) != Scalar(0)) {
                        d -= cost[basis_[r]] * at(r, j);
                    }
                }
                if (d < -tol) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed) {
                return true;
            }
            std::size_t leave = m_;
            Scalar best{0};
            for (std::size_t r = 0; r < m_; ++r) {
                if (at(r, enter) > tol) {
                    Scalar ratio = at(r, width_ - 1) / at(r, enter);
                    if (leave == m_ || ratio < best - tol ||
                        (!(best + tol < ratio) && basis_[r] < basis_[leave])) {
                        leave = r;
                        best = ratio;
                    }
                }
            }
            if (leave == m_) {
                return false;
            }
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        Scalar p = at(r, c);
        for (std::size_t k = 0; k < width_; ++k) {
            at(r, k) = LpTraits<Scalar>::clean(at(r, k) / p);
        }
        for (std::size_t o = 0; o < m_; ++o) {
            if (o == r || at(o, c) == Scalar(0)) {
                continue;
            }
            Scalar f = at(o, c);
            for (std::size_t k = 0; k < width_; ++k) {
                if (at(r, k) != Scalar(0)) {
                    at(o, k) = LpTraits<Scalar>::clean(at(o, k) - f * at(r, k));
                }
            }
        }
        basis_[r] = c;
    }

    Scalar value(const std::vector<Scalar> &cost) const {
        Scalar v{0};
        for (std::size_t r = 0; r < m_; ++r) {
            v += cost[basis_[r]] * at(r, width_ - 1);
        }
        return v;
    }

    /// Pivot artificial variables out of the basis where possible.
    void drive_out_artificials() {
        const Scalar tol = LpTraits<Scalar>::tol();
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_) {
                continue;
            }
            for (std::size_t j = 0; j < n_; ++j) {
                if (at(r, j) > tol || at(r, j) < -tol) {
                    pivot(r, j);
                    break;
                }
            }
        }
    }

    std::vector<Scalar> primal() const {
        std::vector<Scalar> x(n_, Scalar(0));
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_) {
                x[basis_[r]] = at(r, width_ - 1);
            }
        }
        return x;
    }

    /// Farkas vector from the phase-one duals, in the caller's row signs.
    std::vector<Scalar> farkas(const std::vector<Scalar> &cost) const {
        std::vector<Scalar> y(m_, Scalar(0));
        for (std::size_t i = 0; i < m_; ++i) {
            Scalar d{0};
            for (std::size_t r = 0; r < m_; ++r) {
                d += cost[basis_[r]] * at(r, n_ + i);
            }
            y[i] = flip_[i] ? d : Scalar(-d);
        }
        return y;
    }

    std::size_t rows() const {
        return m_;
    }
    std::size_t cols() const {
        return n_;
    }

   private:
    std::size_t m_, n_, width_;
    std::vector<Scalar> t_;
    std::vector<bool> flip_;
    std::vector<std::size_t> basis_;
};

}  // namespace detail

/// minimize c^T x subject to A x = b, x >= 0. Two-phase dense simplex with
/// Bland's anti-cycling rule.
template <class Scalar>
LpResult<Scalar> solve_lp(
    const std::vector<std::vector<Scalar>> &a, const std::vector<Scalar> &b, const std::vector<Scalar> &c) {
    if (a.size() != b.size()) {
        throw InputError("lp: row count mismatch");
    }
    const std::size_t n = c.size();
    if (!a.empty() && a.front().size() != n) {
        throw InputError("lp: column count mismatch");
    }
    detail::SimplexTableau<Scalar> tab(a, b);
    const std::size_t m = b.size();
    std::vector<Scalar> phase1(n + m, Scalar(0));
    for (std::size_t i = 0; i < m; ++i) {
        phase1[n + i] = Scalar(1);
    }
    tab.optimize(phase1, n + m);
    LpResult<Scalar> out;
    if (tab.value(phase1) > LpTraits<Scalar>::tol()) {
        out.status = LpStatus::infeasible;
        out.farkas = tab.farkas(phase1);
        return out;
    }
    tab.drive_out_artificials();
    std::vector<Scalar> phase2(n + m, Scalar(0));
    for (std::size_t j = 0; j < n; ++j) {
        phase2[j] = c[j];
    }
    if (!tab.optimize(phase2, n)) {
        out.status = LpStatus::unbounded;
        return out;
    }
    out.status = LpStatus::optimal;
    out.x = tab.primal();
    out.objective = tab.value(phase2);
    return out;
}

}  // namespace polysim
