// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Seb-wise unequal error protection: index labels are chosen so that the
// most important Sebs sit far apart in Hamming space and a few bit errors
// cannot turn one of them into another.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sebcom/kb.hpp"

namespace sebcom {

/// Greedy max-min Hamming assignment. Entries are visited by importance
/// descending (position ascending on ties); each takes the unused label that
/// maximizes its minimum distance to the labels already taken, smallest
/// label on ties. Returns the label for each position.
std::vector<std::uint32_t> greedy_labels(std::span<const double> importance, unsigned bits);

/// Relabel every Seb of granularity g with bits_per_index(g)-bit labels.
void assign_labels(KnowledgeBase& kb, Granularity g);

/// Minimum pairwise Hamming distance; 0 for fewer than two labels.
unsigned min_hamming_distance(std::span<const std::uint32_t> labels) noexcept;

}  // namespace sebcom
