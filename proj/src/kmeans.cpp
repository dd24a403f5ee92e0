// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/kmeans.hpp"

#include <algorithm>
#include <limits>

#include "sebcom/error.hpp"
#include "sebcom/rng.hpp"

namespace sebcom {

namespace {

std::size_t count_distinct_rows(const FeatureMatrix& f, std::size_t cap) {
    std::vector<std::size_t> reps;
    for (std::size_t i = 0; i < f.rows() && reps.size() < cap; ++i) {
        const auto r = f.row(i);
        const bool seen = std::any_of(reps.begin(), reps.end(), [&](std::size_t j) {
            return std::equal(r.begin(), r.end(), f.row(j).begin());
        });
        if (!seen) reps.push_back(i);
    }
    return reps.size();
}

FeatureMatrix seed_plus_plus(const FeatureMatrix& f, std::size_t k, Xoshiro256ss& rng) {
    const std::size_t n = f.rows();
    FeatureMatrix centers(f.dim);
    centers.push_back(f.row(rng.below(n)));

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(f.row(i), centers.row(0));

    while (centers.rows() < k) {
        double total = 0;
        for (double v : d2) total += v;
        std::size_t pick = 0;
        if (total > 0) {
            const double target = rng.uniform() * total;
            double acc = 0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target && d2[i] > 0) {
                    pick = i;
                    break;
                }
            }
        } else {
            rng();  // keep the stream position independent of degeneracy
        }
        centers.push_back(f.row(pick));
        const auto c = centers.row(centers.rows() - 1);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(f.row(i), c));
    }
    return centers;
}

}  // namespace

KMeansResult train_codebook(const FeatureMatrix& features, const KMeansOptions& opts) {
    require(!features.empty() && features.dim > 0, "k-means needs at least one feature vector");
    require(opts.k >= 1, "k-means needs k >= 1");
    require(opts.max_iters >= 1, "k-means needs max_iters >= 1");

    const std::size_t n = features.rows();
    const std::size_t dim = features.dim;
    const std::size_t k = opts.k;

    Xoshiro256ss rng(opts.seed);
    KMeansResult res;
    res.duplicate_centroids = count_distinct_rows(features, k) < k;
    res.centroids = seed_plus_plus(features, k, rng);
    res.assignment.assign(n, 0);

    std::vector<double> dist(n);
    std::vector<double> sums(k * dim);
    std::vector<std::size_t> counts(k);
    double prev = std::numeric_limits<double>::infinity();

    for (int it = 1; it <= opts.max_iters; ++it) {
        res.iterations = it;
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            res.assignment[i] = nearest_row(res.centroids, features.row(i), &dist[i]);
            total += dist[i];
        }
        res.distortion = total;

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = res.assignment[i];
            ++counts[c];
            const auto r = features.row(i);
            for (std::size_t d = 0; d < dim; ++d) sums[c * dim + d] += r[d];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            auto row = res.centroids.row(c);
            for (std::size_t d = 0; d < dim; ++d) row[d] = sums[c * dim + d] / static_cast<double>(counts[c]);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            // Farthest point from its own centroid; lowest index on ties.
            std::size_t far = 0;
            for (std::size_t i = 1; i < n; ++i)
                if (dist[i] > dist[far]) far = i;
            const auto src = features.row(far);
            std::copy(src.begin(), src.end(), res.centroids.row(c).begin());
            dist[far] = 0;
        }

        const bool converged = total == 0 || (prev - total) / prev < opts.tol;
        prev = total;
        if (converged) break;
    }
    return res;
}

}  // namespace sebcom
