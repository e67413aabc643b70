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
#include <vector>

#include "polysim/errors.hpp"
#include "polysim/lp.hpp"

namespace polysim {

using RationalVector = std::vector<Rational>;

namespace detail {

inline RationalVector normalized_ray(RationalVector r) {
    Rational scale(0);
    for (const auto &v : r) {
        if (v != 0) {
            scale = abs(v);
            break;
        }
    }
    if (scale != 0) {
        for (auto &v : r) {
            v /= scale;
        }
    }
    return r;
}

inline Rational dot(const RationalVector &a, const RationalVector &b) {
    Rational s(0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] != 0 && b[k] != 0) {
            s += a[k] * b[k];
        }
    }
    return s;
}

struct Ray {
    RationalVector v;
    std::vector<std::uint64_t> tight;
};

inline bool subset_of(const std::vector<std::uint64_t> &a, const std::vector<std::uint64_t> &b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] & ~b[k]) {
            return false;
        }
    }
    return true;
}

inline std::size_t count_bits(const std::vector<std::uint64_t> &a) {
    std::size_t c = 0;
    for (auto w : a) {
        c += static_cast<std::size_t>(std::popcount(w));
    }
    return c;
}

}  // namespace detail

/// Extreme rays of the pointed cone {x : H x >= 0} by the double description
/// method with the combinatorial adjacency test. H must have full column rank.
inline std::vector<RationalVector> extreme_rays(const std::vector<RationalVector> &h) {
    if (h.empty()) {
        throw InputError("extreme_rays: no constraints");
    }
    const std::size_t d = h.front().size();
    const std::size_t m = h.size();
    const std::size_t words = (m + 63) / 64;

    // Pick d independent rows by elimination.
    std::vector<std::size_t> chosen;
    std::vector<RationalVector> reduced;
    std::vector<std::size_t> pivots;
    for (std::size_t r = 0; r < m && chosen.size() < d; ++r) {
        RationalVector v = h[r];
        for (std::size_t k = 0; k < reduced.size(); ++k) {
            if (v[pivots[k]] != 0) {
                Rational f = v[pivots[k]] / reduced[k][pivots[k]];
                for (std::size_t j = 0; j < d; ++j) {
                    v[j] -= f * reduced[k][j];
                }
            }
        }
        std::size_t p = d;
        for (std::size_t j = 0; j < d; ++j) {
            if (v[j] != 0) {
                p = j;
                break;
            }
        }
        if (p == d) {
            continue;
        }
        chosen.push_back(r);
        reduced.push_back(std::move(v));
        pivots.push_back(p);
    }
    if (chosen.size() < d) {
        throw InputError("extreme_rays: constraint matrix is rank deficient (cone not pointed)");
    }

    // Initial simplicial cone: columns of the inverse of the chosen rows.
    std::vector<RationalVector> aug(d, RationalVector(2 * d, Rational(0)));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            aug[i][j] = h[chosen[i]][j];
        }
        aug[i][d + i] = 1;
    }
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t sel = col;
        while (aug[sel][col] == 0) {
            ++sel;
        }
        std::swap(aug[sel], aug[col]);
        Rational p = aug[col][col];
        for (auto &v : aug[col]) {
            v /= p;
        }
        for (std::size_t r = 0; r < d; ++r) {
            if (r != col && aug[r][col] != 0) {
                Rational f = aug[r][col];
                for (std::size_t j = 0; j < 2 * d; ++j) {
                    aug[r][j] -= f * aug[col][j];
                }
            }
        }
    }
    std::vector<bool> processed(m, false);
    for (auto r : chosen) {
        processed[r] = true;
    }
    std::vector<detail::Ray> rays;
    for (std::size_t k = 0; k < d; ++k) {
        detail::Ray ray{RationalVector(d), std::vector<std::uint64_t>(words, 0)};
        for (std::size_t i = 0; i < d; ++i) {
            ray.v[i] = aug[i][d + k];
        }
        ray.v = detail::normalized_ray(std::move(ray.v));
        for (std::size_t i = 0; i < d; ++i) {
            if (i != k) {
                ray.tight[chosen[i] / 64] |= std::uint64_t{1} << (chosen[i] % 64);
            }
        }
        rays.push_back(std::move(ray));
    }

    for (std::size_t row = 0; row < m; ++row) {
        if (processed[row]) {
            continue;
        }
        processed[row] = true;
        std::vector<Rational> val(rays.size());
        std::vector<std::size_t> pos, neg;
        std::vector<detail::Ray> next;
        for (std::size_t k = 0; k < rays.size(); ++k) {
            val[k] = detail::dot(h[row], rays[k].v);
            if (val[k] > 0) {
                pos.push_back(k);
            } else if (val[k] < 0) {
                neg.push_back(k);
            }
        }
        for (auto p : pos) {
            for (auto q : neg) {
                std::vector<std::uint64_t> common(words);
                for (std::size_t w = 0; w < words; ++w) {
                    common[w] = rays[p].tight[w] & rays[q].tight[w];
                }
                if (detail::count_bits(common) + 2 < d) {
                    continue;
                }
                bool adjacent = true;
                for (std::size_t k = 0; k < rays.size() && adjacent; ++k) {
                    if (k != p && k != q && detail::subset_of(common, rays[k].tight)) {
                        adjacent = false;
                    }
                }
                if (!adjacent) {
                    continue;
                }
                detail::Ray ray{RationalVector(d), common};
                for (std::size_t j = 0; j < d; ++j) {
                    ray.v[j] = val[p] * rays[q].v[j] - val[q] * rays[p].v[j];
                }
                ray.v = detail::normalized_ray(std::move(ray.v));
                ray.tight[row / 64] |= std::uint64_t{1} << (row % 64);
                next.push_back(std::move(ray));
            }
        }
        for (std::size_t k = 0; k < rays.size(); ++k) {
            if (val[k] > 0) {
                next.push_back(std::move(rays[k]));
            } else if (val[k] == 0) {
                rays[k].tight[row / 64] |= std::uint64_t{1} << (row % 64);
                next.push_back(std::move(rays[k]));
            }
        }
        rays = std::move(next);
    }
    std::vector<RationalVector> out;
    for (auto &r : rays) {
        out.push_back(std::move(r.v));
    }
    return out;
}

}  // namespace polysim
