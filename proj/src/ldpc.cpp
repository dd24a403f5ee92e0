// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/ldpc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>

#include "sebcom/error.hpp"
#include "sebcom/rng.hpp"

namespace sebcom {

namespace {

constexpr int kColumnDegree = 3;
constexpr int kResamplePasses = 100;
constexpr int kSwapTriesPerEdge = 8;
constexpr int kSeedAttempts = 32;
constexpr double kMinSumScale = 0.75;

/// Bipartite graph under construction, with O(1) membership tests.
class TannerGraph {
  public:
    TannerGraph(std::size_t m, std::size_t n) : m_(m), n_(n), count_(m * n, 0), row_cols_(m), col_rows_(n) {}

    void add(std::uint32_t r, std::uint32_t c) {
        ++count_[idx(r, c)];
        row_cols_[r].push_back(c);
        col_rows_[c].push_back(r);
    }

    void remove(std::uint32_t r, std::uint32_t c) {
        --count_[idx(r, c)];
        erase_one(row_cols_[r], c);
        erase_one(col_rows_[c], r);
    }

    std::uint8_t count(std::uint32_t r, std::uint32_t c) const { return count_[idx(r, c)]; }

    bool in_four_cycle(std::uint32_t r, std::uint32_t c) const {
        for (std::uint32_t c2 : row_cols_[r]) {
            if (c2 == c) continue;
            for (std::uint32_t r2 : col_rows_[c]) {
                if (r2 == r) continue;
                if (count(r2, c2)) return true;
            }
        }
        return false;
    }

    bool bad(std::uint32_t r, std::uint32_t c) const { return count(r, c) > 1 || in_four_cycle(r, c); }

    std::size_t duplicates() const {
        return static_cast<std::size_t>(std::count_if(count_.begin(), count_.end(), [](auto v) { return v > 1; }));
    }

    std::size_t four_cycles() const {
        std::vector<std::uint32_t> shared(m_ * m_, 0);
        for (const auto& rows : col_rows_)
            for (std::size_t a = 0; a < rows.size(); ++a)
                for (std::size_t b = a + 1; b < rows.size(); ++b) {
                    const auto lo = std::min(rows[a], rows[b]);
                    const auto hi = std::max(rows[a], rows[b]);
                    if (lo != hi) ++shared[lo * m_ + hi];
                }
        std::size_t cycles = 0;
        for (auto t : shared) cycles += static_cast<std::size_t>(t) * (t > 0 ? t - 1 : 0) / 2;
        return cycles;
    }

    const std::vector<std::uint32_t>& row(std::size_t r) const { return row_cols_[r]; }

  private:
    std::size_t idx(std::uint32_t r, std::uint32_t c) const { return static_cast<std::size_t>(r) * n_ + c; }

    static void erase_one(std::vector<std::uint32_t>& v, std::uint32_t x) {
        auto it = std::find(v.begin(), v.end(), x);
        if (it != v.end()) v.erase(it);
    }

    std::size_t m_, n_;
    std::vector<std::uint8_t> count_;
    std::vector<std::vector<std::uint32_t>> row_cols_;
    std::vector<std::vector<std::uint32_t>> col_rows_;
};

struct RandomGraph {
    TannerGraph graph;
    std::size_t four_cycles = 0;
};

std::optional<RandomGraph> random_regular_graph(std::size_t m, std::size_t n, std::uint64_t seed) {
    Xoshiro256ss rng(seed);
    const std::size_t edges = n * kColumnDegree;
    const std::size_t row_degree = edges / m;

    std::vector<std::uint32_t> edge_row(edges);
    for (std::size_t e = 0; e < edges; ++e) edge_row[e] = static_cast<std::uint32_t>(e / row_degree);
    for (std::size_t i = edges - 1; i > 0; --i) std::swap(edge_row[i], edge_row[rng.below(i + 1)]);
    auto edge_col = [](std::size_t e) { return static_cast<std::uint32_t>(e / kColumnDegree); };

    TannerGraph g(m, n);
    for (std::size_t e = 0; e < edges; ++e) g.add(edge_row[e], edge_col(e));

    for (int pass = 0; pass < kResamplePasses; ++pass) {
        bool any_bad = false;
        for (std::size_t e = 0; e < edges; ++e) {
            if (!g.bad(edge_row[e], edge_col(e))) continue;
            any_bad = true;
            for (int t = 0; t < kSwapTriesPerEdge; ++t) {
                const std::size_t f = rng.below(edges);
                const std::uint32_t r1 = edge_row[e], c1 = edge_col(e);
                const std::uint32_t r2 = edge_row[f], c2 = edge_col(f);
                if (r1 == r2 || c1 == c2 || g.count(r1, c2) || g.count(r2, c1)) continue;
                g.remove(r1, c1);
                g.remove(r2, c2);
                g.add(r1, c2);
                g.add(r2, c1);
                if (g.in_four_cycle(r1, c2) || g.in_four_cycle(r2, c1)) {
                    g.remove(r1, c2);
                    g.remove(r2, c1);
                    g.add(r1, c1);
                    g.add(r2, c2);
                    continue;
                }
                edge_row[e] = r2;
                edge_row[f] = r1;
                break;
            }
        }
        if (!any_bad) break;
    }
    if (g.duplicates() != 0) return std::nullopt;
    const std::size_t cycles = g.four_cycles();
    return RandomGraph{std::move(g), cycles};
}

}  // namespace

const char* code_rate_name(CodeRate r) noexcept { return r == CodeRate::Half ? "1/2" : "2/3"; }

LdpcCode LdpcCode::construct(CodeRate rate, std::size_t n, std::uint64_t seed) {
    require(n > 0 && n % 24 == 0, "LDPC block length must be a positive multiple of 24");
    const std::size_t m = rate == CodeRate::Half ? n / 2 : n / 3;
    const std::size_t words = (n + 63) / 64;

    for (int attempt = 0; attempt < kSeedAttempts; ++attempt) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
        auto rg = random_regular_graph(m, n, s);
        if (!rg) continue;

        std::vector<std::vector<std::uint64_t>> mat(m, std::vector<std::uint64_t>(words, 0));
        for (std::size_t r = 0; r < m; ++r)
            for (std::uint32_t c : rg->graph.row(r)) mat[r][c / 64] |= std::uint64_t{1} << (c % 64);

        // Reduced row echelon form, scanning columns left to right.
        std::vector<std::uint32_t> pivots;
        std::size_t prow = 0;
        for (std::uint32_t col = 0; col < n && prow < m; ++col) {
            const std::uint64_t bit = std::uint64_t{1} << (col % 64);
            std::size_t r = prow;
            while (r < m && !(mat[r][col / 64] & bit)) ++r;
            if (r == m) continue;
            std::swap(mat[r], mat[prow]);
            for (std::size_t o = 0; o < m; ++o) {
                if (o == prow || !(mat[o][col / 64] & bit)) continue;
                for (std::size_t w = 0; w < words; ++w) mat[o][w] ^= mat[prow][w];
            }
            pivots.push_back(col);
            ++prow;
        }
        if (pivots.size() != m) continue;  // rank deficient

        LdpcCode code;
        code.rate_ = rate;
        code.n_ = n;
        code.k_ = n - m;
        code.seed_ = s;
        code.four_cycles_ = rg->four_cycles;

        std::vector<bool> is_pivot(n, false);
        for (auto p : pivots) is_pivot[p] = true;
        std::vector<std::uint32_t> new_pos(n);
        for (std::uint32_t c = 0; c < n; ++c)
            if (!is_pivot[c]) {
                new_pos[c] = static_cast<std::uint32_t>(code.perm_.size());
                code.perm_.push_back(c);
            }
        for (auto p : pivots) {
            new_pos[p] = static_cast<std::uint32_t>(code.perm_.size());
            code.perm_.push_back(p);
        }

        code.rows_.resize(m);
        for (std::size_t r = 0; r < m; ++r) {
            for (std::uint32_t c : rg->graph.row(r)) code.rows_[r].push_back(new_pos[c]);
            std::sort(code.rows_[r].begin(), code.rows_[r].end());
        }

        const std::size_t kwords = (code.k_ + 63) / 64;
        code.parity_.assign(m, std::vector<std::uint64_t>(kwords, 0));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t t = 0; t < code.k_; ++t) {
                const std::uint32_t c = code.perm_[t];
                if (mat[i][c / 64] & (std::uint64_t{1} << (c % 64)))
                    code.parity_[i][t / 64] |= std::uint64_t{1} << (t % 64);
            }
        return code;
    }
    fail(ErrorCode::Construction, "LDPC construction failed after 32 seeds");
}

std::size_t LdpcCode::ones() const noexcept {
    std::size_t s = 0;
    for (const auto& r : rows_) s += r.size();
    return s;
}

Bits LdpcCode::encode(std::span<const std::uint8_t> message) const {
    require(message.size() == k_, "LDPC message must have exactly k bits");
    std::vector<std::uint64_t> packed((k_ + 63) / 64, 0);
    for (std::size_t t = 0; t < k_; ++t)
        if (message[t] & 1u) packed[t / 64] |= std::uint64_t{1} << (t % 64);

    Bits cw(n_);
    for (std::size_t t = 0; t < k_; ++t) cw[t] = message[t] & 1u;
    for (std::size_t i = 0; i < parity_.size(); ++i) {
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < packed.size(); ++w) acc ^= parity_[i][w] & packed[w];
        cw[k_ + i] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
    }
    return cw;
}

Bits LdpcCode::syndrome(std::span<const std::uint8_t> word) const {
    require(word.size() == n_, "syndrome needs an n-bit word");
    Bits s(rows_.size(), 0);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        std::uint8_t acc = 0;
        for (auto c : rows_[r]) acc ^= word[c] & 1u;
        s[r] = acc;
    }
    return s;
}

DecodeResult ldpc_decode(const LdpcCode& code, std::span<const double> llrs, int max_iters) {
    require(llrs.size() == code.n(), "LDPC decoder needs n LLRs");
    require(max_iters >= 1, "max_iters must be >= 1");
    const auto& rows = code.check_rows();
    const std::size_t n = code.n();

    std::vector<std::size_t> offset(rows.size() + 1, 0);
    for (std::size_t r = 0; r < rows.size(); ++r) offset[r + 1] = offset[r] + rows[r].size();
    std::vector<std::uint32_t> var(offset.back());
    for (std::size_t r = 0; r < rows.size(); ++r)
        std::copy(rows[r].begin(), rows[r].end(), var.begin() + static_cast<std::ptrdiff_t>(offset[r]));

    std::vector<double> post(llrs.begin(), llrs.end());
    std::vector<double> msg(var.size(), 0.0);  // check -> variable
    std::vector<double> q(var.size(), 0.0);
    Bits hard(n, 0);

    auto decided = [&]() {
        bool all_decided = true;
        for (std::size_t v = 0; v < n; ++v) {
            hard[v] = post[v] < 0 ? 1 : 0;
            if (post[v] == 0) all_decided = false;
        }
        if (!all_decided) return false;
        for (const auto& row : rows) {
            std::uint8_t acc = 0;
            for (auto c : row) acc ^= hard[c];
            if (acc) return false;
        }
        return true;
    };

    DecodeResult res;
    res.converged = decided();
    for (int it = 1; it <= max_iters && !res.converged; ++it) {
        res.iterations = it;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            double min1 = INFINITY, min2 = INFINITY;
            std::size_t arg = offset[r];
            int sign = 1;
            for (std::size_t e = offset[r]; e < offset[r + 1]; ++e) {
                q[e] = post[var[e]] - msg[e];
                const double a = std::abs(q[e]);
                if (q[e] < 0) sign = -sign;
                if (a < min1) {
                    min2 = min1;
                    min1 = a;
                    arg = e;
                } else if (a < min2) {
                    min2 = a;
                }
            }
            for (std::size_t e = offset[r]; e < offset[r + 1]; ++e) {
                const int s = q[e] < 0 ? -sign : sign;
                msg[e] = kMinSumScale * s * (e == arg ? min2 : min1);
            }
        }
        std::copy(llrs.begin(), llrs.end(), post.begin());
        for (std::size_t e = 0; e < var.size(); ++e) post[var[e]] += msg[e];
        res.converged = decided();
    }
    res.message.assign(hard.begin(), hard.begin() + static_cast<std::ptrdiff_t>(code.k()));
    return res;
}

}  // namespace sebcom
