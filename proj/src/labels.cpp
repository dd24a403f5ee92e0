// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/labels.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "sebcom/error.hpp"

namespace sebcom {

std::vector<std::uint32_t> greedy_labels(std::span<const double> importance, unsigned bits) {
    require(bits <= 20, "label width too large");
    const std::size_t space = std::size_t{1} << bits;
    require(importance.size() <= space, "too many Sebs for the label width");

    std::vector<std::size_t> order(importance.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });

    constexpr unsigned kUnbounded = ~0u;
    std::vector<unsigned> min_dist(space, kUnbounded);
    std::vector<bool> used(space, false);
    std::vector<std::uint32_t> labels(importance.size(), 0);

    for (std::size_t pos : order) {
        std::size_t best = space;
        for (std::size_t l = 0; l < space; ++l) {
            if (used[l]) continue;
            if (best == space || min_dist[l] > min_dist[best]) best = l;
        }
        used[best] = true;
        labels[pos] = static_cast<std::uint32_t>(best);
        for (std::size_t l = 0; l < space; ++l) {
            const auto d = static_cast<unsigned>(std::popcount(static_cast<std::uint32_t>(l ^ best)));
            min_dist[l] = std::min(min_dist[l], d);
        }
    }
    return labels;
}

void assign_labels(KnowledgeBase& kb, Granularity g) {
    std::vector<Seb*> members;
    for (auto& [id, seb] : kb.sebs)
        if (seb.granularity == g) members.push_back(&seb);
    std::vector<double> imp(members.size());
    std::transform(members.begin(), members.end(), imp.begin(), [](const Seb* s) { return s->importance; });
    const auto labels = greedy_labels(imp, bits_for_count(members.size()));
    for (std::size_t i = 0; i < members.size(); ++i) members[i]->label = labels[i];
}

unsigned min_hamming_distance(std::span<const std::uint32_t> labels) noexcept {
    unsigned best = ~0u;
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i + 1; j < labels.size(); ++j)
            best = std::min(best, static_cast<unsigned>(std::popcount(labels[i] ^ labels[j])));
    return labels.size() < 2 ? 0 : best;
}

}  // namespace sebcom
