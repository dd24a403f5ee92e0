// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "sebcom/features.hpp"

namespace sebcom {

struct KMeansOptions {
    std::size_t k = 1;
    int max_iters = 100;
    double tol = 1e-6;
    std::uint64_t seed = 0;
};

struct KMeansResult {
    FeatureMatrix centroids;
    std::vector<std::size_t> assignment;  // per input row
    double distortion = 0;                // sum of squared distances
    int iterations = 0;
    /// k exceeded the number of distinct points; some centroids coincide.
    bool duplicate_centroids = false;
};

/// Lloyd's k-means with k-means++ seeding from xoshiro256**(seed).
/// Ties go to the lowest centroid index; an empty cluster is re-seeded with
/// the point farthest from its current centroid. Stops after max_iters or
/// when the relative distortion improvement drops below tol.
KMeansResult train_codebook(const FeatureMatrix& features, const KMeansOptions& opts);

}  // namespace sebcom
