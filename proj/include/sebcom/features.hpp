// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sebcom {

/// Dense row-major matrix of feature vectors (one patch per row).
struct FeatureMatrix {
    std::size_t dim = 0;
    std::vector<double> data;

    FeatureMatrix() = default;
    explicit FeatureMatrix(std::size_t d) : dim(d) {}
    FeatureMatrix(std::size_t d, std::size_t rows) : dim(d), data(d * rows, 0.0) {}

    std::size_t rows() const noexcept { return dim == 0 ? 0 : data.size() / dim; }
    bool empty() const noexcept { return data.empty(); }

    std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * dim, dim}; }

    void push_back(std::span<const double> v) { data.insert(data.end(), v.begin(), v.end()); }
    void append(const FeatureMatrix& other) { data.insert(data.end(), other.data.begin(), other.data.end()); }

    bool operator==(const FeatureMatrix&) const = default;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// Index of the nearest row (squared Euclidean); lowest index wins ties.
inline std::size_t nearest_row(const FeatureMatrix& centroids, std::span<const double> x,
                               double* best_distance = nullptr) noexcept {
    std::size_t best = 0;
    double best_d = 0;
    const std::size_t dim = centroids.dim;
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double* row = centroids.data.data() + c * dim;
        double d = 0;
        bool pruned = false;
        // Partial sums only grow, so a row can be abandoned once it reaches
        // the incumbent; the result is identical to the full scan.
        for (std::size_t i = 0; i < dim; i += 16) {
            const std::size_t end = i + 16 < dim ? i + 16 : dim;
            for (std::size_t j = i; j < end; ++j) {
                const double t = row[j] - x[j];
                d += t * t;
            }
            if (c != 0 && d >= best_d) {
                pruned = true;
                break;
            }
        }
        if (!pruned && (c == 0 || d < best_d)) {
            best = c;
            best_d = d;
        }
    }
    if (best_distance) *best_distance = best_d;
    return best;
}

}  // namespace sebcom
