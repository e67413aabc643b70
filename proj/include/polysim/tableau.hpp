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
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "polysim/dense.hpp"
#include "polysim/errors.hpp"
#include "polysim/pauli.hpp"
#include "polysim/rng.hpp"

namespace polysim {

struct MeasurementOutcome {
    bool outcome = false;
    bool deterministic = true;
    double probability = 1.0;
};

/// Destabilizer/stabilizer tableau of an n-qubit stabilizer state.
///
/// Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers. Each row is a
/// word-packed (x|z) index plus a phase exponent of i. Stabilizer phases are
/// always 0 or 2 and encode the value assignment gamma on the generators.
/// Destabilizer signs carry no state information and are reset to + when a
/// measurement rewrites the row.
class StabilizerTableau {
   public:
    StabilizerTableau() = default;

    static StabilizerTableau init_zero(std::size_t n) {
        if (n == 0) {
            throw InputError("tableau needs at least one qubit");
        }
        StabilizerTableau t(n);
        for (std::size_t q = 0; q < n; ++q) {
            bits::set(t.row_x(q), q, true);
            bits::set(t.row_z(n + q), q, true);
        }
        return t;
    }

    std::size_t num_qubits() const {
        return n_;
    }

    PhasedPauli destabilizer(std::size_t i) const {
        return row(i);
    }
    PhasedPauli stabilizer(std::size_t i) const {
        return row(n_ + i);
    }

    void apply(const CliffordGate &g) {
        g.check_range(n_);
        const std::size_t wa = g.q0 / 64, wb = g.q1 / 64;
        const unsigned ba = g.q0 % 64, bb = g.q1 % 64;
        const std::size_t stride = 2 * w_;
        std::uint64_t *base = bits_.data();
        std::uint8_t *ph = phase_.data();
        const std::size_t rows = 2 * n_;
        // Word-level versions of detail::conjugate_bits, one per gate kind.
        switch (g.kind) {
            case GateKind::H:
                for (std::size_t r = 0; r < rows; ++r) {
                    std::uint64_t *x = base + r * stride, *z = x + w_;
                    std::uint64_t xa = (x[wa] >> ba) & 1, za = (z[wa] >> ba) & 1, d = (xa ^ za) << ba;
                    ph[r] ^= static_cast<std::uint8_t>((xa & za) << 1);
                    x[wa] ^= d;
                    z[wa] ^= d;
                }
                break;
            case GateKind::S:
                for (std::size_t r = 0; r < rows; ++r) {
                    std::uint64_t *x = base + r * stride, *z = x + w_;
                    std::uint64_t xa = (x[wa] >> ba) & 1, za = (z[wa] >> ba) & 1;
                    ph[r] ^= static_cast<std::uint8_t>((xa & za) << 1);
                    z[wa] ^= xa << ba;
                }
                break;
            case GateKind::X:
            case GateKind::Y:
            case GateKind::Z: {
                const bool use_x = g.kind != GateKind::X, use_z = g.kind != GateKind::Z;
                for (std::size_t r = 0; r < rows; ++r) {
                    std::uint64_t *x = base + r * stride, *z = x + w_;
                    std::uint64_t flip = ((use_x ? x[wa] : 0) ^ (use_z ? z[wa] : 0)) >> ba;
                    ph[r] ^= static_cast<std::uint8_t>((flip & 1) << 1);
                }
                break;
            }
            case GateKind::CNOT:
                for (std::size_t r = 0; r < rows; ++r) {
                    std::uint64_t *x = base + r * stride, *z = x + w_;
                    std::uint64_t xc = (x[wa] >> ba) & 1, zc = (z[wa] >> ba) & 1;
                    std::uint64_t xt = (x[wb] >> bb) & 1, zt = (z[wb] >> bb) & 1;
                    ph[r] ^= static_cast<std::uint8_t>((xc & zt & ~(xt ^ zc) & 1) << 1);
                    x[wb] ^= xc << bb;
                    z[wa] ^= zt << ba;
                }
                break;
            case GateKind::CZ:
                for (std::size_t r = 0; r < rows; ++r) {
                    std::uint64_t *x = base + r * stride, *z = x + w_;
                    std::uint64_t xc = (x[wa] >> ba) & 1, zc = (z[wa] >> ba) & 1;
                    std::uint64_t xt = (x[wb] >> bb) & 1, zt = (z[wb] >> bb) & 1;
                    ph[r] ^= static_cast<std::uint8_t>((xc & xt & (zc ^ zt)) << 1);
                    z[wa] ^= xt << ba;
                    z[wb] ^= xc << bb;
                }
                break;
        }
    }

    /// Sign bit gamma(b) when +-T_b is in the stabilizer group, found from
    /// the destabilizer pairing; nullopt when b anticommutes with a generator.
    std::optional<bool> stabilizer_value(const PauliIndex &b) const {
        check_index(b);
        for (std::size_t i = 0; i < n_; ++i) {
            if (anticommutes(n_ + i, b)) {
                return std::nullopt;
            }
        }
        PhasedPauli acc = PhasedPauli::identity(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            if (anticommutes(i, b)) {
                acc = multiply(acc, row(n_ + i));
            }
        }
        if (acc.index != b || !acc.is_hermitian()) {
            throw VerificationError("tableau: destabilizer decomposition failed; invariants broken");
        }
        return acc.sign();
    }

    /// Same membership test by Z2 Gaussian elimination over the generators.
    std::optional<bool> stabilizer_value_by_elimination(const PauliIndex &b) const {
        check_index(b);
        const std::size_t w = bits::words_for(2 * n_);
        const std::size_t cw = bits::words_for(n_);
        struct Row {
            std::vector<std::uint64_t> v;
            std::vector<std::uint64_t> combo;
        };
        auto pack = [&](const PauliIndex &a) {
            std::vector<std::uint64_t> v(w);
            for (std::size_t q = 0; q < n_; ++q) {
                bits::set(v, q, a.x(q));
                bits::set(v, n_ + q, a.z(q));
            }
            return v;
        };
        std::vector<Row> rows;
        for (std::size_t i = 0; i < n_; ++i) {
            Row r{pack(row(n_ + i).index), std::vector<std::uint64_t>(cw)};
            bits::set(r.combo, i, true);
            rows.push_back(std::move(r));
        }
        std::vector<std::size_t> pivots;
        std::size_t rank = 0;
        for (std::size_t col = 0; col < 2 * n_ && rank < rows.size(); ++col) {
            std::size_t sel = rank;
            while (sel < rows.size() && !bits::get(rows[sel].v, col)) {
                ++sel;
            }
            if (sel == rows.size()) {
                continue;
            }
            std::swap(rows[rank], rows[sel]);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (r != rank && bits::get(rows[r].v, col)) {
                    for (std::size_t k = 0; k < w; ++k) {
                        rows[r].v[k] ^= rows[rank].v[k];
                    }
                    for (std::size_t k = 0; k < cw; ++k) {
                        rows[r].combo[k] ^= rows[rank].combo[k];
                    }
                }
            }
            pivots.push_back(col);
            ++rank;
        }
        auto target = pack(b);
        std::vector<std::uint64_t> combo(cw);
        for (std::size_t r = 0; r < rank; ++r) {
            if (bits::get(target, pivots[r])) {
                for (std::size_t k = 0; k < w; ++k) {
                    target[k] ^= rows[r].v[k];
                }
                for (std::size_t k = 0; k < cw; ++k) {
                    combo[k] ^= rows[r].combo[k];
                }
            }
        }
        for (auto x : target) {
            if (x) {
                return std::nullopt;
            }
        }
        PhasedPauli acc = PhasedPauli::identity(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            if (bits::get(combo, i)) {
                acc = multiply(acc, row(n_ + i));
            }
        }
        return acc.sign();
    }

    /// Measures (-1)^sign T_b. With `forced` set, that outcome is taken (it
    /// must have nonzero probability); otherwise a random branch is drawn.
    template <class Coin>
    MeasurementOutcome measure_with(const PauliIndex &b, bool sign, std::optional<bool> forced, Coin &&coin) {
        check_index(b);
        if (b.is_identity()) {
            throw InputError("cannot measure the identity");
        }
        std::size_t pivot = n_;
        for (std::size_t i = 0; i < n_; ++i) {
            if (anticommutes(n_ + i, b)) {
                pivot = i;
                break;
            }
        }
        if (pivot == n_) {
            bool outcome = *stabilizer_value(b) ^ sign;
            if (forced && *forced != outcome) {
                throw PreconditionError("forced measurement outcome has probability zero");
            }
            return {outcome, true, 1.0};
        }

        bool outcome = forced ? *forced : static_cast<bool>(coin());
        const std::size_t p = n_ + pivot;
        for (std::size_t r = 0; r < 2 * n_; ++r) {
            if (r != p && anticommutes(r, b)) {
                multiply_row_into(r, p);
            }
        }
        copy_row(pivot, p);
        phase_[pivot] = 0;
        auto xs = row_x(p);
        auto zs = row_z(p);
        std::copy(b.xs().begin(), b.xs().end(), xs.begin());
        std::copy(b.zs().begin(), b.zs().end(), zs.begin());
        phase_[p] = (outcome ^ sign) ? 2 : 0;
        return {outcome, false, 0.5};
    }

    MeasurementOutcome measure(const PauliIndex &b, bool sign, Rng &rng) {
        return measure_with(b, sign, std::nullopt, [&] {
            return coin_flip(rng);
        });
    }

    MeasurementOutcome measure_forced(const PauliIndex &b, bool sign, bool outcome) {
        return measure_with(b, sign, outcome, [] {
            return false;
        });
    }

    /// Throws VerificationError naming the first broken tableau invariant.
    void validate() const {
        for (std::size_t i = 0; i < n_; ++i) {
            if (phase_[n_ + i] & 1) {
                throw VerificationError("stabilizer row " + std::to_string(i) + " is not Hermitian");
            }
            for (std::size_t j = 0; j < n_; ++j) {
                if (omega_rows(n_ + i, n_ + j)) {
                    throw VerificationError(
                        "stabilizer rows " + std::to_string(i) + "," + std::to_string(j) + " anticommute");
                }
                if (omega_rows(i, n_ + j) != (i == j)) {
                    throw VerificationError(
                        "destabilizer " + std::to_string(i) + " / stabilizer " + std::to_string(j) +
                        " pairing broken");
                }
            }
        }
        // Full rank of the 2n index rows.
        const std::size_t w = bits::words_for(2 * n_);
        std::vector<std::vector<std::uint64_t>> m;
        for (std::size_t r = 0; r < 2 * n_; ++r) {
            std::vector<std::uint64_t> v(w);
            for (std::size_t q = 0; q < n_; ++q) {
                bits::set(v, q, bits::get(row_x(r), q));
                bits::set(v, n_ + q, bits::get(row_z(r), q));
            }
            m.push_back(std::move(v));
        }
        std::size_t rank = 0;
        for (std::size_t col = 0; col < 2 * n_; ++col) {
            std::size_t sel = rank;
            while (sel < m.size() && !bits::get(m[sel], col)) {
                ++sel;
            }
            if (sel == m.size()) {
                continue;
            }
            std::swap(m[rank], m[sel]);
            for (std::size_t r = rank + 1; r < m.size(); ++r) {
                if (bits::get(m[r], col)) {
                    for (std::size_t k = 0; k < w; ++k) {
                        m[r][k] ^= m[rank][k];
                    }
                }
            }
            ++rank;
        }
        if (rank != 2 * n_) {
            throw VerificationError("tableau rows are not of full rank");
        }
    }

    /// The projector prod_i (1 + (-1)^{r_i} T_{a_i}) / 2.
    DenseOperator to_state() const {
        DenseOperator::check_dense_qubits(n_);
        const std::size_t dim = std::size_t{1} << n_;
        DenseOperator out = DenseOperator::identity(dim);
        DenseOperator id = DenseOperator::identity(dim);
        for (std::size_t i = 0; i < n_; ++i) {
            out = out * ((id + materialize(stabilizer(i))) * 0.5);
        }
        return out;
    }

    /// All 2^n signed elements of the stabilizer group, sorted; two tableaux
    /// describe the same state iff these agree.
    std::vector<std::pair<std::uint64_t, bool>> stabilizer_group() const {
        if (n_ > 16) {
            throw InputError("stabilizer_group: too many qubits to enumerate");
        }
        std::vector<std::pair<std::uint64_t, bool>> out;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n_); ++mask) {
            PhasedPauli acc = PhasedPauli::identity(n_);
            for (std::size_t i = 0; i < n_; ++i) {
                if ((mask >> i) & 1) {
                    acc = multiply(acc, stabilizer(i));
                }
            }
            out.emplace_back(acc.index.code(), acc.sign());
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// One line per row: "D"/"S" tag, sign, Pauli letters.
    std::string dump() const {
        std::ostringstream os;
        for (std::size_t r = 0; r < 2 * n_; ++r) {
            os << (r < n_ ? 'D' : 'S') << ' ' << format_pauli(row(r)) << '\n';
        }
        return os.str();
    }

   private:
    explicit StabilizerTableau(std::size_t n)
        : n_(n), w_(bits::words_for(n)), bits_(2 * n * 2 * w_), phase_(2 * n) {
    }

    std::span<std::uint64_t> row_x(std::size_t r) {
        return std::span(bits_).subspan(r * 2 * w_, w_);
    }
    std::span<std::uint64_t> row_z(std::size_t r) {
        return std::span(bits_).subspan(r * 2 * w_ + w_, w_);
    }
    std::span<const std::uint64_t> row_x(std::size_t r) const {
        return std::span(bits_).subspan(r * 2 * w_, w_);
    }
    std::span<const std::uint64_t> row_z(std::size_t r) const {
        return std::span(bits_).subspan(r * 2 * w_ + w_, w_);
    }

    PhasedPauli row(std::size_t r) const {
        PauliIndex a(n_);
        std::copy(row_x(r).begin(), row_x(r).end(), a.xs().begin());
        std::copy(row_z(r).begin(), row_z(r).end(), a.zs().begin());
        return PhasedPauli(phase_[r], std::move(a));
    }

    bool anticommutes(std::size_t r, const PauliIndex &b) const {
        return bits::omega(row_x(r), row_z(r), b.xs(), b.zs());
    }
    bool omega_rows(std::size_t r, std::size_t s) const {
        return bits::omega(row_x(r), row_z(r), row_x(s), row_z(s));
    }

    /// row r := row r * row p.
    void multiply_row_into(std::size_t r, std::size_t p) {
        unsigned t = phase_[r] + phase_[p] + bits::product_exponent(row_x(r), row_z(r), row_x(p), row_z(p));
        auto rx = row_x(r);
        auto rz = row_z(r);
        auto px = row_x(p);
        auto pz = row_z(p);
        for (std::size_t k = 0; k < w_; ++k) {
            rx[k] ^= px[k];
            rz[k] ^= pz[k];
        }
        phase_[r] = r < n_ ? 0 : static_cast<std::uint8_t>(t & 3);
    }

    void copy_row(std::size_t dst, std::size_t src) {
        std::copy(row_x(src).begin(), row_x(src).end(), row_x(dst).begin());
        std::copy(row_z(src).begin(), row_z(src).end(), row_z(dst).begin());
        phase_[dst] = phase_[src];
    }

    void check_index(const PauliIndex &b) const {
        if (b.num_qubits() != n_) {
            throw InputError(
                "Pauli has " + std::to_string(b.num_qubits()) + " qubits, tableau has " + std::to_string(n_));
        }
    }

    std::size_t n_ = 0;
    std::size_t w_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<std::uint8_t> phase_;
};

inline StabilizerTableau init_zero(std::size_t n) {
    return StabilizerTableau::init_zero(n);
}

inline StabilizerTableau apply_gate(StabilizerTableau t, const CliffordGate &g) {
    t.apply(g);
    return t;
}

inline std::pair<StabilizerTableau, MeasurementOutcome> measure(
    StabilizerTableau t, const PauliIndex &b, bool sign, Rng &rng) {
    auto m = t.measure(b, sign, rng);
    return {std::move(t), m};
}

inline std::pair<StabilizerTableau, MeasurementOutcome> measure_forced(
    StabilizerTableau t, const PauliIndex &b, bool sign, bool outcome) {
    auto m = t.measure_forced(b, sign, outcome);
    return {std::move(t), m};
}

inline DenseOperator to_state(const StabilizerTableau &t) {
    return t.to_state();
}

/// Every n-qubit stabilizer state exactly once, found by breadth-first search
/// of the H/S/CNOT orbit of |0...0>.
inline std::vector<StabilizerTableau> enumerate_stabilizer_states(std::size_t n) {
    if (n == 0 || n > 3) {
        throw InputError("enumerate_stabilizer_states supports 1 <= n <= 3");
    }
    std::vector<CliffordGate> gates;
    for (std::size_t q = 0; q < n; ++q) {
        gates.push_back(CliffordGate::single(GateKind::H, q));
        gates.push_back(CliffordGate::single(GateKind::S, q));
        for (std::size_t t = 0; t < n; ++t) {
            if (t != q) {
                gates.push_back(CliffordGate::pair(GateKind::CNOT, q, t));
            }
        }
    }
    std::vector<StabilizerTableau> out{StabilizerTableau::init_zero(n)};
    std::set<std::vector<std::pair<std::uint64_t, bool>>> seen{out.front().stabilizer_group()};
    for (std::size_t head = 0; head < out.size(); ++head) {
        for (const auto &g : gates) {
            auto next = apply_gate(out[head], g);
            if (seen.insert(next.stabilizer_group()).second) {
                out.push_back(std::move(next));
            }
        }
    }
    return out;
}

}  // namespace polysim
