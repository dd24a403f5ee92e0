// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Explicit knowledge base: semantic bases (Sebs) at two granularities, the
// refinement partial order between them, and the importance / age-of-
// information lifecycle that drives KB updates.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sebcom/features.hpp"

namespace sebcom {

using SebId = std::uint32_t;

enum class Granularity : std::uint8_t { Coarse = 0, Fine = 1 };

inline constexpr Granularity kGranularities[] = {Granularity::Coarse, Granularity::Fine};

constexpr std::size_t patch_area(Granularity g) noexcept { return g == Granularity::Coarse ? 1024 : 256; }
const char* granularity_name(Granularity g) noexcept;

/// Width of an index field for `count` entries: ceil(log2(count)), 0 for a
/// single entry.
unsigned bits_for_count(std::size_t count) noexcept;

struct Seb {
    SebId id = 0;
    Granularity granularity = Granularity::Coarse;
    std::vector<double> centroid;
    double importance = 0;
    std::uint32_t age = 0;
    std::uint32_t label = 0;

    bool operator==(const Seb&) const = default;
};

/// Hasse edges (fine_id, coarse_id) of the semantic-refinement order.
struct RefinementRelation {
    std::set<std::pair<SebId, SebId>> edges;

    bool operator==(const RefinementRelation&) const = default;
};

struct KbParams {
    double decay_lambda = 0.01;
    double prune_threshold = 0.05;
    double admission_factor = 0.5;
    double trigger_factor = 1.5;
    std::uint32_t trigger_window = 10;

    void validate() const;
    bool operator==(const KbParams&) const = default;
};

/// Read-only snapshot of one granularity, in ascending id order.
struct Codebook {
    Granularity granularity = Granularity::Coarse;
    std::vector<SebId> ids;
    std::vector<std::uint32_t> labels;
    FeatureMatrix centroids;
    unsigned bits = 0;
    std::vector<int> position_of_label;  // size 2^bits, -1 when unassigned

    std::size_t size() const noexcept { return ids.size(); }

    /// Codebook position that a received index field decodes to. Unassigned
    /// or out-of-range values clamp to position min(value, size-1).
    std::size_t resolve(std::uint64_t index) const noexcept;
};

class KnowledgeBase {
  public:
    std::uint32_t version = 0;
    std::map<SebId, Seb> sebs;
    RefinementRelation relation;
    KbParams params;
    double baseline_distortion = 0;

    std::size_t count(Granularity g) const noexcept;
    unsigned bits_per_index(Granularity g) const noexcept { return bits_for_count(count(g)); }
    Codebook codebook(Granularity g) const;
    const Seb& at(SebId id) const;
    Seb& at(SebId id);
    bool contains(SebId id) const noexcept { return sebs.count(id) != 0; }
    SebId next_id() const noexcept { return sebs.empty() ? 0 : sebs.rbegin()->first + 1; }

    /// Throws Error(InvalidArgument) describing the first broken invariant.
    void validate() const;

    bool operator==(const KnowledgeBase&) const = default;
};

struct PosetReport {
    bool valid = true;
    std::vector<std::string> violations;
};

/// Antisymmetry (no cycle of length >= 2 in the closure) plus granularity
/// direction of every edge. Reflexivity and transitivity hold by closure.
PosetReport check_poset_axioms(const KnowledgeBase& kb);

/// Quantize the four 16x16 quadrants (TL, TR, BL, BR) of a coarse Seb to
/// their nearest fine Sebs and record the refinement edges.
std::array<SebId, 4> refine(KnowledgeBase& kb, SebId coarse_id);

/// Rebuild all Hasse edges from scratch via refine().
void rebuild_relation(KnowledgeBase& kb);

struct JointCounts {
    std::size_t rows = 0;  // |X|
    std::size_t cols = 0;  // |S|
    std::vector<std::uint64_t> counts;

    JointCounts() = default;
    JointCounts(std::size_t r, std::size_t c) : rows(r), cols(c), counts(r * c, 0) {}
    std::uint64_t& at(std::size_t x, std::size_t s) { return counts[x * cols + s]; }
    std::uint64_t at(std::size_t x, std::size_t s) const { return counts[x * cols + s]; }
};

struct InformationTerms {
    double entropy_x = 0;
    double entropy_s = 0;
    double mutual_information = 0;
    double conditional_entropy = 0;  // H(X|S) = H(X) - I(X;S)
};

/// Plug-in estimates in bits. Throws on an empty table.
InformationTerms empirical_mutual_information(const JointCounts& joint);

struct CandidateOptions {
    std::size_t k = 1;
    int max_iters = 100;
    double tol = 1e-6;
    std::uint64_t seed = 0;
};

/// Cluster a window of recent patches and keep clusters whose centroid lies
/// farther than admission_factor * (mean nearest-neighbour distance among
/// existing centroids) from every existing Seb of that granularity.
/// Returned Sebs carry centroid and importance; ids are assigned on insert.
std::vector<Seb> generate_candidates(const KnowledgeBase& kb, const FeatureMatrix& recent,
                                     std::span<const double> patch_importance, Granularity g,
                                     const CandidateOptions& opts);

/// Admission radius used by generate_candidates.
double admission_radius(const KnowledgeBase& kb, Granularity g);

/// Per-message lifecycle step. `usage` maps each used Seb to the mean
/// importance of the patches it encoded.
void decay_and_refresh(KnowledgeBase& kb, const std::map<SebId, double>& usage);

/// Ids prune() would remove, without mutating.
std::vector<SebId> plan_prune(const KnowledgeBase& kb);
std::vector<SebId> prune(KnowledgeBase& kb);

/// Insert candidates under fresh ids, remove `removals`, relabel, rebuild
/// the relation, and bump the version. Returns the new version.
std::uint32_t apply_update(KnowledgeBase& kb, const std::vector<Seb>& candidates,
                           const std::vector<SebId>& removals);

}  // namespace sebcom
