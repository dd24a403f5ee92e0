// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/kb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sebcom/error.hpp"
#include "sebcom/image.hpp"
#include "sebcom/kmeans.hpp"
#include "sebcom/labels.hpp"

namespace sebcom {

const char* granularity_name(Granularity g) noexcept { return g == Granularity::Coarse ? "coarse" : "fine"; }

unsigned bits_for_count(std::size_t count) noexcept {
    unsigned bits = 0;
    while ((std::size_t{1} << bits) < count) ++bits;
    return bits;
}

void KbParams::validate() const {
    require(decay_lambda > 0, "decay_lambda must be positive");
    require(prune_threshold > 0 && prune_threshold < 1, "prune_threshold must lie in (0,1)");
    require(admission_factor > 0, "admission_factor must be positive");
    require(trigger_factor > 0, "trigger_factor must be positive");
    require(trigger_window > 0, "trigger_window must be positive");
}

std::size_t Codebook::resolve(std::uint64_t index) const noexcept {
    if (index < position_of_label.size() && position_of_label[index] >= 0)
        return static_cast<std::size_t>(position_of_label[index]);
    return static_cast<std::size_t>(std::min<std::uint64_t>(index, ids.size() - 1));
}

std::size_t KnowledgeBase::count(Granularity g) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(sebs.begin(), sebs.end(), [g](const auto& kv) { return kv.second.granularity == g; }));
}

Codebook KnowledgeBase::codebook(Granularity g) const {
    Codebook cb;
    cb.granularity = g;
    cb.centroids = FeatureMatrix(patch_area(g));
    for (const auto& [id, seb] : sebs) {
        if (seb.granularity != g) continue;
        cb.ids.push_back(id);
        cb.labels.push_back(seb.label);
        cb.centroids.push_back(seb.centroid);
    }
    cb.bits = bits_for_count(cb.ids.size());
    cb.position_of_label.assign(std::size_t{1} << cb.bits, -1);
    for (std::size_t i = 0; i < cb.labels.size(); ++i)
        if (cb.labels[i] < cb.position_of_label.size()) cb.position_of_label[cb.labels[i]] = static_cast<int>(i);
    return cb;
}

const Seb& KnowledgeBase::at(SebId id) const {
    auto it = sebs.find(id);
    if (it == sebs.end()) fail(ErrorCode::InvalidArgument, "unknown Seb id " + std::to_string(id));
    return it->second;
}

Seb& KnowledgeBase::at(SebId id) {
    auto it = sebs.find(id);
    if (it == sebs.end()) fail(ErrorCode::InvalidArgument, "unknown Seb id " + std::to_string(id));
    return it->second;
}

void KnowledgeBase::validate() const {
    params.validate();
    require(baseline_distortion >= 0, "baseline distortion must be non-negative");
    for (Granularity g : kGranularities) {
        std::set<std::uint32_t> labels;
        const unsigned bits = bits_per_index(g);
        for (const auto& [id, seb] : sebs) {
            if (seb.granularity != g) continue;
            require(seb.id == id, "Seb id does not match its key");
            require(seb.centroid.size() == patch_area(g), "centroid length does not match granularity");
            require(std::all_of(seb.centroid.begin(), seb.centroid.end(), [](double v) { return v >= 0 && v <= 1; }),
                    "centroid component outside [0,1]");
            require(seb.importance >= 0 && seb.importance <= 1, "importance outside [0,1]");
            require(seb.label < (std::uint64_t{1} << bits), "label exceeds index width");
            require(labels.insert(seb.label).second, "duplicate label within a granularity");
        }
    }
    for (const auto& [f, c] : relation.edges)
        require(contains(f) && contains(c), "relation edge references an unknown Seb");
}

PosetReport check_poset_axioms(const KnowledgeBase& kb) {
    PosetReport rep;
    auto violate = [&](std::string msg) {
        rep.valid = false;
        rep.violations.push_back(std::move(msg));
    };

    std::map<SebId, std::vector<SebId>> succ;
    for (const auto& [a, b] : kb.relation.edges) {
        const auto ia = kb.sebs.find(a);
        const auto ib = kb.sebs.find(b);
        const std::string tag = "(" + std::to_string(a) + "," + std::to_string(b) + ")";
        if (ia == kb.sebs.end() || ib == kb.sebs.end()) {
            violate("edge " + tag + " references an unknown Seb");
            continue;
        }
        if (ia->second.granularity == ib->second.granularity)
            violate("edge within granularity " + tag);
        else if (ia->second.granularity != Granularity::Fine)
            violate("edge increases granularity " + tag);
        if (a != b) succ[a].push_back(b);
    }

    // Antisymmetry of the reflexive-transitive closure <=> no directed cycle.
    enum class Mark : std::uint8_t { White, Grey, Black };
    std::map<SebId, Mark> mark;
    bool cyclic = false;
    std::function<void(SebId)> visit = [&](SebId v) {
        mark[v] = Mark::Grey;
        for (SebId w : succ[v]) {
            const Mark m = mark[w];
            if (m == Mark::Grey) cyclic = true;
            else if (m == Mark::White) visit(w);
        }
        mark[v] = Mark::Black;
    };
    for (const auto& [v, _] : succ)
        if (mark[v] == Mark::White) visit(v);
    if (cyclic) violate("refinement relation contains a cycle (antisymmetry violated)");
    return rep;
}

std::array<SebId, 4> refine(KnowledgeBase& kb, SebId coarse_id) {
    const Seb& coarse = kb.at(coarse_id);
    require(coarse.granularity == Granularity::Coarse, "refine expects a coarse Seb");
    const Codebook fine = kb.codebook(Granularity::Fine);
    require(fine.size() > 0, "refine needs a nonempty fine codebook");

    std::array<SebId, 4> out{};
    std::vector<double> block(patch_area(Granularity::Fine));
    for (int q = 0; q < 4; ++q) {
        const int ox = (q % 2) * kFinePatch;
        const int oy = (q / 2) * kFinePatch;
        for (int y = 0; y < kFinePatch; ++y)
            for (int x = 0; x < kFinePatch; ++x)
                block[static_cast<std::size_t>(y) * kFinePatch + x] =
                    coarse.centroid[static_cast<std::size_t>(oy + y) * kCoarsePatch + ox + x];
        out[q] = fine.ids[nearest_row(fine.centroids, block)];
    }
    for (SebId f : out) kb.relation.edges.insert({f, coarse_id});
    return out;
}

void rebuild_relation(KnowledgeBase& kb) {
    kb.relation.edges.clear();
    if (kb.count(Granularity::Fine) == 0) return;
    for (const auto& [id, seb] : kb.sebs)
        if (seb.granularity == Granularity::Coarse) refine(kb, id);
}

InformationTerms empirical_mutual_information(const JointCounts& joint) {
    require(joint.rows > 0 && joint.cols > 0 && joint.counts.size() == joint.rows * joint.cols,
            "joint table must be nonempty");
    std::uint64_t total = 0;
    std::vector<std::uint64_t> px(joint.rows, 0), ps(joint.cols, 0);
    for (std::size_t x = 0; x < joint.rows; ++x) {
        for (std::size_t s = 0; s < joint.cols; ++s) {
            const auto c = joint.at(x, s);
            px[x] += c;
            ps[s] += c;
            total += c;
        }
    }
    require(total >= 1, "joint table has zero total count");
    const double n = static_cast<double>(total);

    auto entropy = [n](const std::vector<std::uint64_t>& marg) {
        double h = 0;
        for (auto c : marg)
            if (c > 0) {
                const double p = static_cast<double>(c) / n;
                h -= p * std::log2(p);
            }
        return h;
    };

    InformationTerms t;
    t.entropy_x = entropy(px);
    t.entropy_s = entropy(ps);
    double mi = 0;
    for (std::size_t x = 0; x < joint.rows; ++x) {
        for (std::size_t s = 0; s < joint.cols; ++s) {
            const auto c = joint.at(x, s);
            if (c == 0) continue;
            // p(x,s) / (p(x) p(s)) = c * N / (c_x * c_s)
            const double ratio = static_cast<double>(c) * n / (static_cast<double>(px[x]) * static_cast<double>(ps[s]));
            mi += static_cast<double>(c) / n * std::log2(ratio);
        }
    }
    t.mutual_information = std::clamp(mi, 0.0, std::min(t.entropy_x, t.entropy_s));
    t.conditional_entropy = t.entropy_x - t.mutual_information;
    return t;
}

double admission_radius(const KnowledgeBase& kb, Granularity g) {
    const Codebook cb = kb.codebook(g);
    if (cb.size() < 2) return 0.0;
    double sum = 0;
    for (std::size_t i = 0; i < cb.size(); ++i) {
        double best = -1;
        for (std::size_t j = 0; j < cb.size(); ++j) {
            if (i == j) continue;
            const double d = squared_distance(cb.centroids.row(i), cb.centroids.row(j));
            if (best < 0 || d < best) best = d;
        }
        sum += std::sqrt(best);
    }
    return kb.params.admission_factor * sum / static_cast<double>(cb.size());
}

std::vector<Seb> generate_candidates(const KnowledgeBase& kb, const FeatureMatrix& recent,
                                     std::span<const double> patch_importance, Granularity g,
                                     const CandidateOptions& opts) {
    require(!recent.empty(), "candidate generation needs a nonempty window");
    require(recent.dim == patch_area(g), "window feature dimension does not match granularity");
    require(patch_importance.size() == recent.rows(), "one importance value per window patch required");
    require(opts.k >= 1, "candidate count must be positive");

    const auto km = train_codebook(recent, {std::min(opts.k, recent.rows()), opts.max_iters, opts.tol, opts.seed});
    const std::size_t k = km.centroids.rows();
    std::vector<double> imp_sum(k, 0.0);
    std::vector<std::size_t> members(k, 0);
    for (std::size_t i = 0; i < recent.rows(); ++i) {
        imp_sum[km.assignment[i]] += patch_importance[i];
        ++members[km.assignment[i]];
    }

    const Codebook existing = kb.codebook(g);
    const double delta = admission_radius(kb, g);
    std::vector<Seb> out;
    for (std::size_t c = 0; c < k; ++c) {
        const auto centroid = km.centroids.row(c);
        double nearest = 0;
        if (existing.size() > 0) nearest_row(existing.centroids, centroid, &nearest);
        if (existing.size() > 0 && std::sqrt(nearest) <= delta) continue;
        Seb s;
        s.granularity = g;
        s.centroid.assign(centroid.begin(), centroid.end());
        for (auto& v : s.centroid) v = std::clamp(v, 0.0, 1.0);
        s.importance = members[c] ? std::clamp(imp_sum[c] / static_cast<double>(members[c]), 0.0, 1.0) : 0.0;
        out.push_back(std::move(s));
    }
    return out;
}

void decay_and_refresh(KnowledgeBase& kb, const std::map<SebId, double>& usage) {
    const double factor = std::exp(-kb.params.decay_lambda);
    for (auto& [id, seb] : kb.sebs) {
        auto it = usage.find(id);
        if (it == usage.end()) {
            ++seb.age;
            seb.importance *= factor;
        } else {
            seb.age = 0;
            seb.importance = std::max(seb.importance, std::clamp(it->second, 0.0, 1.0));
        }
    }
}

std::vector<SebId> plan_prune(const KnowledgeBase& kb) {
    std::vector<SebId> removed;
    for (Granularity g : kGranularities) {
        std::vector<const Seb*> members;
        for (const auto& [id, seb] : kb.sebs)
            if (seb.granularity == g) members.push_back(&seb);
        if (members.empty()) continue;
        // Survivor: highest importance, lowest id on ties.
        const Seb* keep = members.front();
        for (const Seb* s : members)
            if (s->importance > keep->importance) keep = s;
        for (const Seb* s : members)
            if (s != keep && s->importance < kb.params.prune_threshold) removed.push_back(s->id);
    }
    std::sort(removed.begin(), removed.end());
    return removed;
}

namespace {

void erase_sebs(KnowledgeBase& kb, const std::vector<SebId>& ids) {
    for (SebId id : ids) kb.sebs.erase(id);
    std::erase_if(kb.relation.edges, [&](const auto& e) {
        return std::binary_search(ids.begin(), ids.end(), e.first) ||
               std::binary_search(ids.begin(), ids.end(), e.second);
    });
}

}  // namespace

std::vector<SebId> prune(KnowledgeBase& kb) {
    auto removed = plan_prune(kb);
    erase_sebs(kb, removed);
    return removed;
}

std::uint32_t apply_update(KnowledgeBase& kb, const std::vector<Seb>& candidates,
                           const std::vector<SebId>& removals) {
    std::vector<SebId> rm(removals);
    std::sort(rm.begin(), rm.end());
    rm.erase(std::unique(rm.begin(), rm.end()), rm.end());
    for (SebId id : rm)
        if (!kb.contains(id)) fail(ErrorCode::InvalidArgument, "removal of nonexistent Seb id " + std::to_string(id));
    for (const Seb& c : candidates) {
        require(c.centroid.size() == patch_area(c.granularity), "candidate centroid length does not match granularity");
        require(c.importance >= 0 && c.importance <= 1, "candidate importance outside [0,1]");
    }
    for (Granularity g : kGranularities) {
        std::size_t remaining = kb.count(g);
        for (SebId id : rm)
            if (kb.at(id).granularity == g) --remaining;
        for (const Seb& c : candidates)
            if (c.granularity == g) ++remaining;
        require(remaining > 0, std::string("update would empty the ") + granularity_name(g) + " codebook");
    }

    SebId next = kb.next_id();
    for (const Seb& c : candidates) {
        Seb s = c;
        s.id = next++;
        s.age = 0;
        s.label = 0;
        kb.sebs.emplace(s.id, std::move(s));
    }
    erase_sebs(kb, rm);
    for (Granularity g : kGranularities) assign_labels(kb, g);
    rebuild_relation(kb);
    return ++kb.version;
}

}  // namespace sebcom
