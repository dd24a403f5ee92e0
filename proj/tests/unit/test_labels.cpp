// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <bit>
#include <numeric>
#include <set>

#include "doctest.h"
#include "sebcom/error.hpp"
#include "sebcom/labels.hpp"
#include "testgen.hpp"

using namespace sebcom;

namespace {

// Straightforward rerun of the greedy rule, recomputing every distance.
std::vector<std::uint32_t> naive_greedy(const std::vector<double>& imp, unsigned bits) {
    std::vector<std::size_t> order(imp.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return imp[a] != imp[b] ? imp[a] > imp[b] : a < b;
    });
    std::vector<std::uint32_t> out(imp.size());
    std::vector<std::uint32_t> taken;
    for (std::size_t pos : order) {
        int best_d = -1;
        std::uint32_t best = 0;
        for (std::uint32_t l = 0; l < (1u << bits); ++l) {
            if (std::find(taken.begin(), taken.end(), l) != taken.end()) continue;
            int d = 1000;
            for (auto t : taken) d = std::min(d, std::popcount(l ^ t));
            if (d > best_d) {
                best_d = d;
                best = l;
            }
        }
        taken.push_back(best);
        out[pos] = best;
    }
    return out;
}

std::vector<std::uint32_t> top_labels(const std::vector<double>& imp, const std::vector<std::uint32_t>& labels,
                                      std::size_t q) {
    std::vector<std::size_t> order(imp.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return imp[a] > imp[b]; });
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < q; ++i) out.push_back(labels[order[i]]);
    return out;
}

}  // namespace

TEST_SUITE("labels") {
    TEST_CASE("two entries in three bits take complementary labels") {
        const std::vector<double> imp{0.2, 0.9};
        const auto l = greedy_labels(imp, 3);
        CHECK(l[1] == 0b000);
        CHECK(l[0] == 0b111);
        CHECK(min_hamming_distance(l) == 3);
    }

    TEST_CASE("four entries fill a two-bit space") {
        const std::vector<double> imp{0.4, 0.3, 0.2, 0.1};
        const auto l = greedy_labels(imp, 2);
        CHECK(std::set<std::uint32_t>(l.begin(), l.end()).size() == 4);
        CHECK(min_hamming_distance(l) == 1);
        CHECK(l[0] == 0);
        CHECK(l[1] == 3);
    }

    TEST_CASE("matches an independent greedy rerun") {
        Xoshiro256ss rng(21);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> imp(8);
            for (auto& v : imp) v = static_cast<double>(rng.below(5)) / 4.0;  // force ties
            const auto l = greedy_labels(imp, 6);
            CHECK(l == naive_greedy(imp, 6));
            const auto top = top_labels(imp, l, 4);
            const auto ref = top_labels(imp, naive_greedy(imp, 6), 4);
            CHECK(min_hamming_distance(top) >= min_hamming_distance(ref));
        }
        CHECK_THROWS_AS(greedy_labels(std::vector<double>(9, 0.5), 3), Error);
    }

    TEST_CASE("important entries sit farther apart than with identity labels") {
        Xoshiro256ss rng(22);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 3 + rng.below(60);
            KnowledgeBase kb = testgen::random_kb(rng, n, 2);
            const Codebook cb = kb.codebook(Granularity::Coarse);
            std::vector<double> imp;
            for (SebId id : cb.ids) imp.push_back(kb.at(id).importance);
            std::vector<std::uint32_t> identity(n);
            std::iota(identity.begin(), identity.end(), 0u);
            const std::size_t q = (n + 3) / 4;
            CHECK(min_hamming_distance(top_labels(imp, cb.labels, q)) >=
                  min_hamming_distance(top_labels(imp, identity, q)));
            CHECK(std::set<std::uint32_t>(cb.labels.begin(), cb.labels.end()).size() == n);
        }
    }
}
