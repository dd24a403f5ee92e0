// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include <limits>

#include "doctest.h"
#include "sebcom/error.hpp"
#include "sebcom/kmeans.hpp"
#include "sebcom/rng.hpp"

using namespace sebcom;

namespace {

FeatureMatrix random_points(Xoshiro256ss& rng, std::size_t n, std::size_t dim) {
    FeatureMatrix f(dim, n);
    for (auto& v : f.data) v = rng.uniform();
    return f;
}

// Exhaustive search over all 2-partitions of a small set.
double best_two_partition(const FeatureMatrix& f) {
    const std::size_t n = f.rows();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        double total = 0;
        for (int side = 0; side < 2; ++side) {
            std::vector<double> mean(f.dim, 0.0);
            std::size_t m = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (((mask >> i) & 1u) == static_cast<unsigned>(side)) {
                    for (std::size_t d = 0; d < f.dim; ++d) mean[d] += f.row(i)[d];
                    ++m;
                }
            for (auto& v : mean) v /= static_cast<double>(m);
            for (std::size_t i = 0; i < n; ++i)
                if (((mask >> i) & 1u) == static_cast<unsigned>(side)) total += squared_distance(f.row(i), mean);
        }
        best = std::min(best, total);
    }
    return best;
}

}  // namespace

TEST_SUITE("kmeans") {
    TEST_CASE("k = 1 converges to the mean") {
        Xoshiro256ss rng(1);
        const FeatureMatrix f = random_points(rng, 50, 3);
        const auto r = train_codebook(f, {1, 100, 1e-9, 7});
        for (std::size_t d = 0; d < 3; ++d) {
            double m = 0;
            for (std::size_t i = 0; i < 50; ++i) m += f.row(i)[d];
            CHECK(r.centroids.row(0)[d] == doctest::Approx(m / 50).epsilon(1e-12));
        }
        CHECK_FALSE(r.duplicate_centroids);
    }

    TEST_CASE("planted clusters reach the optimal 2-partition") {
        Xoshiro256ss rng(2);
        for (int trial = 0; trial < 20; ++trial) {
            FeatureMatrix f(2);
            for (int i = 0; i < 12; ++i) {
                const double cx = i < 6 ? 0.1 : 0.9;
                const double p[2] = {cx + rng.uniform(-0.05, 0.05), 0.5 + rng.uniform(-0.05, 0.05)};
                f.push_back(p);
            }
            const auto r = train_codebook(f, {2, 100, 1e-12, static_cast<std::uint64_t>(trial)});
            CHECK(r.distortion == doctest::Approx(best_two_partition(f)).epsilon(1e-9));
            for (int i = 1; i < 6; ++i) CHECK(r.assignment[i] == r.assignment[0]);
            CHECK(r.assignment[6] != r.assignment[0]);
        }
    }

    TEST_CASE("distortion is the sum of squared distances to assigned centroids") {
        Xoshiro256ss rng(3);
        const FeatureMatrix f = random_points(rng, 80, 4);
        const auto r = train_codebook(f, {5, 100, 1e-9, 3});
        double s = 0;
        for (std::size_t i = 0; i < f.rows(); ++i) {
            s += squared_distance(f.row(i), r.centroids.row(r.assignment[i]));
            CHECK(r.assignment[i] == nearest_row(r.centroids, f.row(i)));
        }
        CHECK(r.distortion == doctest::Approx(s).epsilon(1e-9));
    }

    TEST_CASE("deterministic for a fixed seed; more clusters lower distortion") {
        Xoshiro256ss rng(4);
        const FeatureMatrix f = random_points(rng, 200, 8);
        const auto a = train_codebook(f, {8, 100, 1e-9, 11});
        const auto b = train_codebook(f, {8, 100, 1e-9, 11});
        CHECK(a.centroids == b.centroids);
        CHECK(a.assignment == b.assignment);
        const auto c = train_codebook(f, {16, 100, 1e-9, 11});
        CHECK(c.distortion < a.distortion);
    }

    TEST_CASE("k above the distinct count is flagged") {
        FeatureMatrix f(1);
        for (double v : {0.2, 0.2, 0.7}) f.push_back(std::span<const double>(&v, 1));
        const auto r = train_codebook(f, {3, 10, 1e-9, 0});
        CHECK(r.duplicate_centroids);
        CHECK(r.distortion == doctest::Approx(0.0));
        CHECK_THROWS_AS(train_codebook(FeatureMatrix(2), {1, 10, 1e-9, 0}), Error);
    }
}
