// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>

#include "doctest.h"
#include "sebcom/error.hpp"
#include "sebcom/kb.hpp"
#include "sebcom/syncproto.hpp"
#include "testgen.hpp"

using namespace sebcom;

namespace {

Seb make_seb(SebId id, Granularity g, double fill, double importance = 0.5) {
    Seb s;
    s.id = id;
    s.granularity = g;
    s.centroid.assign(patch_area(g), fill);
    s.importance = importance;
    return s;
}

double oracle_mi(const std::vector<std::vector<std::uint64_t>>& t) {
    double n = 0;
    std::vector<double> px(t.size(), 0), ps(t[0].size(), 0);
    for (std::size_t x = 0; x < t.size(); ++x)
        for (std::size_t s = 0; s < t[x].size(); ++s) {
            n += t[x][s];
            px[x] += t[x][s];
            ps[s] += t[x][s];
        }
    double mi = 0;
    for (std::size_t x = 0; x < t.size(); ++x)
        for (std::size_t s = 0; s < t[x].size(); ++s)
            if (t[x][s]) {
                const double p = t[x][s] / n;
                mi += p * std::log2(p / ((px[x] / n) * (ps[s] / n)));
            }
    return mi;
}

JointCounts table(const std::vector<std::vector<std::uint64_t>>& t) {
    JointCounts j(t.size(), t[0].size());
    for (std::size_t x = 0; x < t.size(); ++x)
        for (std::size_t s = 0; s < t[x].size(); ++s) j.at(x, s) = t[x][s];
    return j;
}

double euclid(std::span<const double> a, std::span<const double> b) { return std::sqrt(squared_distance(a, b)); }

}  // namespace

TEST_SUITE("kb") {
    TEST_CASE("poset axioms") {
        KnowledgeBase kb;
        for (SebId i = 0; i < 2; ++i) kb.sebs.emplace(i, make_seb(i, Granularity::Coarse, 0.1 * i));
        for (SebId i = 2; i < 4; ++i) kb.sebs.emplace(i, make_seb(i, Granularity::Fine, 0.1 * i));
        CHECK(check_poset_axioms(kb).valid);

        kb.relation.edges = {{2, 0}, {3, 0}};
        CHECK(check_poset_axioms(kb).valid);

        kb.relation.edges = {{0, 1}};
        const auto rep = check_poset_axioms(kb);
        CHECK_FALSE(rep.valid);
        REQUIRE(rep.violations.size() == 1);
        CHECK(rep.violations[0].find("edge within granularity") != std::string::npos);

        kb.relation.edges = {{0, 2}};
        CHECK_FALSE(check_poset_axioms(kb).valid);
    }

    TEST_CASE("refine tiles, ties and nearest neighbours") {
        Xoshiro256ss rng(31);
        KnowledgeBase kb;
        for (SebId i = 0; i < 4; ++i) {
            Seb f = testgen::random_seb(rng, Granularity::Fine);
            f.id = i;
            kb.sebs.emplace(i, f);
        }
        Seb c = make_seb(10, Granularity::Coarse, 0);
        const SebId order[4] = {2, 0, 3, 1};
        for (int q = 0; q < 4; ++q)
            for (int y = 0; y < 16; ++y)
                for (int x = 0; x < 16; ++x)
                    c.centroid[(q / 2 * 16 + y) * 32 + q % 2 * 16 + x] = kb.at(order[q]).centroid[y * 16 + x];
        kb.sebs.emplace(10, c);
        const auto ids = refine(kb, 10);
        for (int q = 0; q < 4; ++q) CHECK(ids[q] == order[q]);
        CHECK(kb.relation.edges.size() == 4);

        KnowledgeBase tie;
        tie.sebs.emplace(0, make_seb(0, Granularity::Coarse, 0.5));
        tie.sebs.emplace(1, make_seb(1, Granularity::Fine, 1.0));
        tie.sebs.emplace(2, make_seb(2, Granularity::Fine, 0.0));
        for (SebId id : refine(tie, 0)) CHECK(id == 1);
        CHECK_THROWS_AS(refine(tie, 1), Error);
        CHECK_THROWS_AS(refine(tie, 99), Error);

        for (int trial = 0; trial < 50; ++trial) {
            KnowledgeBase r = testgen::random_kb(rng, 1, 8);
            const auto got = refine(r, 0);
            for (int q = 0; q < 4; ++q) {
                std::vector<double> block;
                for (int y = 0; y < 16; ++y)
                    for (int x = 0; x < 16; ++x)
                        block.push_back(r.at(0).centroid[(q / 2 * 16 + y) * 32 + q % 2 * 16 + x]);
                SebId best = 0;
                double bd = std::numeric_limits<double>::infinity();
                for (const auto& [id, s] : r.sebs) {
                    if (s.granularity != Granularity::Fine) continue;
                    const double d = squared_distance(block, s.centroid);
                    if (d < bd) {
                        bd = d;
                        best = id;
                    }
                }
                CHECK(got[q] == best);
            }
        }
    }

    TEST_CASE("mutual information") {
        const std::vector<std::vector<std::uint64_t>> t{{3, 1}, {1, 3}};
        const auto r = empirical_mutual_information(table(t));
        // Direct four-cell sum: 2 * (3/8) log2(3/2) + 2 * (1/8) log2(1/2).
        const double direct = 0.75 * std::log2(1.5) - 0.25;
        CHECK(r.mutual_information == doctest::Approx(direct).epsilon(1e-14));
        CHECK(r.entropy_x == doctest::Approx(1.0));

        const auto prod = empirical_mutual_information(table({{2, 4, 6}, {1, 2, 3}}));
        CHECK(prod.mutual_information == doctest::Approx(0.0));

        const auto diag = empirical_mutual_information(table({{5, 0, 0, 0}, {0, 5, 0, 0}, {0, 0, 5, 0}, {0, 0, 0, 5}}));
        CHECK(diag.mutual_information == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(diag.conditional_entropy == doctest::Approx(0.0));

        Xoshiro256ss rng(32);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<std::vector<std::uint64_t>> rt(1 + rng.below(6), std::vector<std::uint64_t>(1 + rng.below(6)));
            for (auto& row : rt)
                for (auto& v : row) v = rng.below(4) ? rng.below(20) : 0;
            rt[0][0] += 1;
            const auto m = empirical_mutual_information(table(rt));
            CHECK(m.mutual_information >= 0);
            CHECK(m.mutual_information <= std::min(m.entropy_x, m.entropy_s) + 1e-15);
            CHECK(m.mutual_information == doctest::Approx(oracle_mi(rt)).epsilon(1e-12).scale(1));
            CHECK(std::abs(m.conditional_entropy - (m.entropy_x - m.mutual_information)) <= 1e-12);
        }
        CHECK_THROWS_AS(empirical_mutual_information(table({{0, 0}})), Error);
        CHECK_THROWS_AS(empirical_mutual_information(JointCounts{}), Error);
    }

    TEST_CASE("candidate admission") {
        Xoshiro256ss rng(33);
        KnowledgeBase kb;
        FeatureMatrix training(256);
        for (SebId i = 0; i < 8; ++i) {
            Seb s = make_seb(i, Granularity::Fine, 0.1 + 0.1 * i);
            kb.sebs.emplace(i, s);
            for (int rep = 0; rep < 3; ++rep) training.push_back(s.centroid);
        }
        kb.sebs.emplace(8, make_seb(8, Granularity::Coarse, 0.5));
        const std::vector<double> imp(training.rows(), 0.4);
        CHECK(generate_candidates(kb, training, imp, Granularity::Fine, {8, 100, 1e-9, 1}).empty());

        // Oracle: nearest neighbour spacing is 0.1 * sqrt(256) = 1.6, so delta = 0.8.
        CHECK(admission_radius(kb, Granularity::Fine) == doctest::Approx(0.8));

        FeatureMatrix novel(256);
        const int pattern_count = 3;
        for (int p = 0; p < pattern_count; ++p)
            for (int rep = 0; rep < 4; ++rep) {
                std::vector<double> v(256);
                for (int i = 0; i < 256; ++i) v[i] = ((i / 16 + i % 16 + p) % 2) ? 1.0 : 0.0;
                if (p == 2) std::fill(v.begin(), v.begin() + 128, 0.0);
                novel.push_back(v);
            }
        const auto cands = generate_candidates(kb, novel, std::vector<double>(novel.rows(), 0.9), Granularity::Fine,
                                               {3, 100, 1e-9, 2});
        REQUIRE(cands.size() == 3);
        for (const auto& c : cands) {
            for (const auto& [id, s] : kb.sebs)
                if (s.granularity == Granularity::Fine) CHECK(euclid(c.centroid, s.centroid) > 0.8);
            CHECK(c.importance == doctest::Approx(0.9));
        }

        FeatureMatrix one(256);
        std::vector<double> near(256, 0.52);
        one.push_back(near);
        CHECK(generate_candidates(kb, one, std::vector<double>{0.3}, Granularity::Fine, {1, 10, 1e-9, 0}).empty());
        FeatureMatrix far(256);
        std::vector<double> v(256);
        for (auto& x : v) x = rng.below(2) ? 1.0 : 0.0;
        far.push_back(v);
        const auto single = generate_candidates(kb, far, std::vector<double>{0.3}, Granularity::Fine, {1, 10, 1e-9, 0});
        REQUIRE(single.size() == 1);
        CHECK(single[0].centroid == v);

        CHECK_THROWS_AS(generate_candidates(kb, FeatureMatrix(256), {}, Granularity::Fine, {}), Error);
        CHECK_THROWS_AS(generate_candidates(kb, far, std::vector<double>{0.3}, Granularity::Coarse, {}), Error);
    }

    TEST_CASE("decay and refresh") {
        KnowledgeBase kb;
        kb.sebs.emplace(0, make_seb(0, Granularity::Coarse, 0.5, 1.0));
        kb.sebs.emplace(1, make_seb(1, Granularity::Coarse, 0.6, 0.0));
        kb.sebs.emplace(2, make_seb(2, Granularity::Fine, 0.5, 0.2));
        for (int i = 0; i < 100; ++i) decay_and_refresh(kb, {{2, 0.1}});
        CHECK(kb.at(0).importance == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
        CHECK(kb.at(0).age == 100);
        CHECK(kb.at(1).importance == 0.0);
        CHECK(kb.at(2).age == 0);
        CHECK(kb.at(2).importance == 0.2);
        decay_and_refresh(kb, {{2, 0.7}});
        CHECK(kb.at(2).importance == 0.7);
    }

    TEST_CASE("prune keeps one survivor per granularity") {
        KnowledgeBase kb;
        kb.sebs.emplace(0, make_seb(0, Granularity::Coarse, 0.5, 0.5));
        kb.sebs.emplace(1, make_seb(1, Granularity::Coarse, 0.2, 0.01));
        kb.sebs.emplace(2, make_seb(2, Granularity::Fine, 0.5, 0.02));
        kb.sebs.emplace(3, make_seb(3, Granularity::Fine, 0.2, 0.03));
        kb.sebs.emplace(4, make_seb(4, Granularity::Fine, 0.9, 0.03));
        rebuild_relation(kb);
        CHECK(plan_prune(kb) == std::vector<SebId>{1, 2, 4});
        CHECK(prune(kb) == std::vector<SebId>{1, 2, 4});
        CHECK(kb.sebs.size() == 2);
        for (const auto& [f, c] : kb.relation.edges) CHECK((f == 3 && c == 0));

        KnowledgeBase healthy;
        healthy.sebs.emplace(0, make_seb(0, Granularity::Coarse, 0.5, 0.05));
        CHECK(prune(healthy).empty());
    }

    TEST_CASE("apply_update") {
        Xoshiro256ss rng(34);
        KnowledgeBase kb = testgen::random_kb(rng, 4, 4);
        KnowledgeBase same = kb;
        CHECK(apply_update(same, {}, {}) == kb.version + 1);
        same.version = kb.version;
        CHECK(same == kb);

        KnowledgeBase grown = kb;
        apply_update(grown, {testgen::random_seb(rng, Granularity::Fine)}, {});
        CHECK(grown.count(Granularity::Fine) == 5);
        CHECK(grown.contains(8));
        CHECK(check_poset_axioms(grown).valid);
        grown.validate();

        KnowledgeBase a = kb, b = kb;
        const std::vector<Seb> cands{testgen::random_seb(rng, Granularity::Coarse), testgen::random_seb(rng, Granularity::Fine)};
        apply_update(a, cands, {1, 5});
        apply_update(b, cands, {1, 5});
        CHECK(kb_hash(a) == kb_hash(b));
        CHECK_FALSE(a.contains(1));

        KnowledgeBase bad = kb;
        CHECK_THROWS_AS(apply_update(bad, {}, {42}), Error);
        CHECK_THROWS_AS(apply_update(bad, {}, {0, 1, 2, 3}), Error);
    }

    TEST_CASE("random mutation sequences keep the order valid") {
        Xoshiro256ss rng(35);
        for (int seq = 0; seq < 30; ++seq) {
            KnowledgeBase kb = testgen::random_kb(rng, 3, 3);
            for (int step = 0; step < 10; ++step) {
                std::vector<Seb> cands;
                for (std::size_t i = rng.below(3); i > 0; --i)
                    cands.push_back(testgen::random_seb(rng, rng.below(2) ? Granularity::Fine : Granularity::Coarse));
                std::map<SebId, double> usage;
                for (const auto& [id, s] : kb.sebs)
                    if (rng.below(3) == 0) usage[id] = rng.uniform();
                decay_and_refresh(kb, usage);
                apply_update(kb, cands, plan_prune(kb));
                CHECK(check_poset_axioms(kb).valid);
                kb.validate();
            }
        }
    }
}
