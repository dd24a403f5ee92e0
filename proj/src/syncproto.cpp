// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/syncproto.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "sebcom/error.hpp"
#include "sebcom/labels.hpp"

namespace sebcom {

namespace {

constexpr char kSyncMagic[4] = {'S', 'E', 'B', 'K'};
constexpr std::uint8_t kSyncFormatVersion = 1;
constexpr std::size_t kMaxParents = 255;

void write_seb(ByteWriter& w, const WireSeb& s) {
    require(s.centroid.size() <= 0xFFFF, "centroid too long for the wire format");
    require(s.parents.size() <= kMaxParents, "too many parents for the wire format");
    w.u32(s.id);
    w.u8(static_cast<std::uint8_t>(s.granularity));
    w.f32(s.importance);
    w.u16(static_cast<std::uint16_t>(s.centroid.size()));
    for (float v : s.centroid) w.f32(v);
    w.u8(static_cast<std::uint8_t>(s.parents.size()));
    for (SebId p : s.parents) w.u32(p);
}

WireSeb read_seb(ByteReader& r) {
    WireSeb s;
    s.id = r.u32();
    const std::uint8_t g = r.u8();
    if (g > 1) fail(ErrorCode::Format, "unknown granularity on the wire");
    s.granularity = static_cast<Granularity>(g);
    s.importance = r.f32();
    s.centroid.resize(r.u16());
    for (auto& v : s.centroid) v = r.f32();
    s.parents.resize(r.u8());
    for (auto& p : s.parents) p = r.u32();
    return s;
}

void write_full_body(ByteWriter& w, const FullBody& f) {
    require(f.sebs.size() <= 0xFFFF, "too many Sebs for the wire format");
    w.u16(static_cast<std::uint16_t>(f.sebs.size()));
    for (const auto& s : f.sebs) write_seb(w, s);
    w.u32(static_cast<std::uint32_t>(f.edges.size()));
    for (const auto& [a, b] : f.edges) {
        w.u32(a);
        w.u32(b);
    }
    w.f32(f.baseline_distortion);
    w.f32(f.decay_lambda);
    w.f32(f.prune_threshold);
    w.f32(f.admission_factor);
    w.f32(f.trigger_factor);
    w.u32(f.trigger_window);
}

FullBody read_full_body(ByteReader& r) {
    FullBody f;
    f.sebs.resize(r.u16());
    for (auto& s : f.sebs) s = read_seb(r);
    const std::uint32_t n_edges = r.u32();
    if (n_edges > r.remaining() / 8) fail(ErrorCode::Format, "truncated edge list");
    f.edges.resize(n_edges);
    for (auto& e : f.edges) {
        e.first = r.u32();
        e.second = r.u32();
    }
    f.baseline_distortion = r.f32();
    f.decay_lambda = r.f32();
    f.prune_threshold = r.f32();
    f.admission_factor = r.f32();
    f.trigger_factor = r.f32();
    f.trigger_window = r.u32();
    return f;
}

WireSeb to_wire(const Seb& s, const RefinementRelation& rel) {
    WireSeb w;
    w.id = s.id;
    w.granularity = s.granularity;
    w.importance = static_cast<float>(s.importance);
    w.centroid.assign(s.centroid.begin(), s.centroid.end());
    if (s.granularity == Granularity::Fine) {
        for (auto it = rel.edges.lower_bound({s.id, 0}); it != rel.edges.end() && it->first == s.id; ++it) {
            if (w.parents.size() == kMaxParents) break;
            w.parents.push_back(it->second);
        }
    }
    return w;
}

Seb from_wire(const WireSeb& w) {
    Seb s;
    s.id = w.id;
    s.granularity = w.granularity;
    s.importance = w.importance;
    s.centroid.assign(w.centroid.begin(), w.centroid.end());
    return s;
}

}  // namespace

const char* message_kind_name(MessageKind k) noexcept {
    switch (k) {
        case MessageKind::Request: return "REQUEST";
        case MessageKind::Delta: return "DELTA";
        case MessageKind::Full: return "FULL";
    }
    return "UNKNOWN";
}

Bytes encode_message(const SyncMessage& msg) {
    ByteWriter w;
    w.raw(std::string_view(kSyncMagic, 4));
    w.u8(kSyncFormatVersion);
    w.u8(static_cast<std::uint8_t>(msg.kind));
    w.u32(msg.kb_version_base);
    switch (msg.kind) {
        case MessageKind::Request:
            w.f32(msg.statistic);
            break;
        case MessageKind::Delta: {
            const auto& d = msg.delta;
            require(d.added.size() <= 0xFFFF && d.removed.size() <= 0xFFFF && d.importance_updates.size() <= 0xFFFF,
                    "DELTA section too large for the wire format");
            w.u16(static_cast<std::uint16_t>(d.added.size()));
            for (const auto& s : d.added) write_seb(w, s);
            w.u16(static_cast<std::uint16_t>(d.removed.size()));
            for (SebId id : d.removed) w.u32(id);
            w.u16(static_cast<std::uint16_t>(d.importance_updates.size()));
            for (const auto& [id, v] : d.importance_updates) {
                w.u32(id);
                w.f32(v);
            }
            break;
        }
        case MessageKind::Full:
            write_full_body(w, msg.full);
            break;
    }
    const std::uint32_t crc = crc32(w.bytes());
    w.u32(crc);
    return w.take();
}

SyncMessage decode_message(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kSyncHeaderBytes + 4) fail(ErrorCode::Format, "truncated sync message");
    const auto body = bytes.first(bytes.size() - 4);
    ByteReader trailer(bytes.last(4));
    if (trailer.u32() != crc32(body)) fail(ErrorCode::Corrupt, "sync message CRC mismatch");

    ByteReader r(body);
    const auto magic = r.raw(4);
    if (!std::equal(magic.begin(), magic.end(), kSyncMagic)) fail(ErrorCode::Format, "bad sync message magic");
    if (r.u8() != kSyncFormatVersion) fail(ErrorCode::Format, "unsupported sync format version");
    const std::uint8_t kind = r.u8();
    if (kind > 2) fail(ErrorCode::Format, "unknown sync message kind " + std::to_string(kind));

    SyncMessage msg;
    msg.kind = static_cast<MessageKind>(kind);
    msg.kb_version_base = r.u32();
    switch (msg.kind) {
        case MessageKind::Request:
            msg.statistic = r.f32();
            break;
        case MessageKind::Delta: {
            auto& d = msg.delta;
            d.added.resize(r.u16());
            for (auto& s : d.added) s = read_seb(r);
            d.removed.resize(r.u16());
            for (auto& id : d.removed) id = r.u32();
            d.importance_updates.resize(r.u16());
            for (auto& [id, v] : d.importance_updates) {
                id = r.u32();
                v = r.f32();
            }
            break;
        }
        case MessageKind::Full:
            msg.full = read_full_body(r);
            break;
    }
    if (r.remaining() != 0) fail(ErrorCode::Format, "trailing bytes in sync message");
    return msg;
}

SyncMessage make_request(const KnowledgeBase& kb, float statistic) {
    SyncMessage m;
    m.kind = MessageKind::Request;
    m.kb_version_base = kb.version;
    m.statistic = statistic;
    return m;
}

SyncMessage make_full(const KnowledgeBase& kb) {
    SyncMessage m;
    m.kind = MessageKind::Full;
    m.kb_version_base = kb.version;
    for (const auto& [id, seb] : kb.sebs) m.full.sebs.push_back(to_wire(seb, kb.relation));
    m.full.edges.assign(kb.relation.edges.begin(), kb.relation.edges.end());
    m.full.baseline_distortion = static_cast<float>(kb.baseline_distortion);
    m.full.decay_lambda = static_cast<float>(kb.params.decay_lambda);
    m.full.prune_threshold = static_cast<float>(kb.params.prune_threshold);
    m.full.admission_factor = static_cast<float>(kb.params.admission_factor);
    m.full.trigger_factor = static_cast<float>(kb.params.trigger_factor);
    m.full.trigger_window = kb.params.trigger_window;
    return m;
}

SyncMessage make_delta(const KnowledgeBase& kb, const std::vector<Seb>& candidates,
                       const std::vector<SebId>& removals) {
    SyncMessage m;
    m.kind = MessageKind::Delta;
    m.kb_version_base = kb.version;

    // Simulate the peer's view to learn the ids and refinement parents the
    // inserted Sebs will end up with.
    std::vector<Seb> wire_candidates;
    for (const Seb& c : candidates) wire_candidates.push_back(from_wire(to_wire(c, {})));
    KnowledgeBase preview = kb;
    const SebId first = preview.next_id();
    apply_update(preview, wire_candidates, removals);
    for (std::size_t i = 0; i < wire_candidates.size(); ++i)
        m.delta.added.push_back(to_wire(preview.at(first + static_cast<SebId>(i)), preview.relation));

    m.delta.removed = removals;
    std::sort(m.delta.removed.begin(), m.delta.removed.end());
    m.delta.removed.erase(std::unique(m.delta.removed.begin(), m.delta.removed.end()), m.delta.removed.end());
    for (const auto& [id, seb] : kb.sebs)
        if (!std::binary_search(m.delta.removed.begin(), m.delta.removed.end(), id))
            m.delta.importance_updates.emplace_back(id, static_cast<float>(seb.importance));
    return m;
}

KnowledgeBase kb_from_full(const SyncMessage& msg) {
    if (msg.kind != MessageKind::Full) fail(ErrorCode::InvalidArgument, "expected a FULL message");
    const FullBody& f = msg.full;
    KnowledgeBase kb;
    kb.version = msg.kb_version_base;
    for (const auto& w : f.sebs) {
        if (kb.sebs.count(w.id)) fail(ErrorCode::Format, "duplicate Seb id in FULL message");
        kb.sebs.emplace(w.id, from_wire(w));
    }
    kb.relation.edges.insert(f.edges.begin(), f.edges.end());
    kb.baseline_distortion = f.baseline_distortion;
    kb.params.decay_lambda = f.decay_lambda;
    kb.params.prune_threshold = f.prune_threshold;
    kb.params.admission_factor = f.admission_factor;
    kb.params.trigger_factor = f.trigger_factor;
    kb.params.trigger_window = f.trigger_window;
    for (Granularity g : kGranularities) assign_labels(kb, g);
    try {
        kb.validate();
    } catch (const Error& e) {
        fail(ErrorCode::Format, std::string("inconsistent FULL message: ") + e.what());
    }
    return kb;
}

Bytes canonical_kb_body(const KnowledgeBase& kb) {
    ByteWriter w;
    write_full_body(w, make_full(kb).full);
    return w.take();
}

std::array<std::uint8_t, 32> kb_hash(const KnowledgeBase& kb) { return sha256(canonical_kb_body(kb)); }

KnowledgeBase canonicalize(const KnowledgeBase& kb) { return kb_from_full(decode_message(encode_message(make_full(kb)))); }

std::uint32_t apply_message(KnowledgeBase& kb, const SyncMessage& msg) {
    switch (msg.kind) {
        case MessageKind::Request:
            return kb.version;
        case MessageKind::Full:
            kb = kb_from_full(msg);
            return kb.version;
        case MessageKind::Delta:
            break;
    }
    if (kb.version != msg.kb_version_base)
        fail(ErrorCode::Stale, "DELTA based on version " + std::to_string(msg.kb_version_base) +
                                   " but local KB is version " + std::to_string(kb.version));

    KnowledgeBase next = kb;
    try {
        for (const auto& [id, v] : msg.delta.importance_updates) {
            if (!(v >= 0.0f && v <= 1.0f)) fail(ErrorCode::Format, "importance update outside [0,1]");
            next.at(id).importance = v;
        }
        std::vector<Seb> candidates;
        for (const auto& w : msg.delta.added) candidates.push_back(from_wire(w));
        const SebId first = next.next_id();
        apply_update(next, candidates, msg.delta.removed);
        for (std::size_t i = 0; i < msg.delta.added.size(); ++i)
            if (msg.delta.added[i].id != first + i) fail(ErrorCode::Format, "DELTA ids do not match the receiver");
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Format) throw;
        fail(ErrorCode::Format, std::string("malformed DELTA payload: ") + e.what());
    }
    kb = std::move(next);
    return kb.version;
}

TriggerState::TriggerState(double baseline, std::size_t window, double factor)
    : baseline_(baseline), capacity_(window), factor_(factor) {
    require(window > 0, "trigger window must be positive");
    require(baseline >= 0, "trigger baseline must be non-negative");
}

bool TriggerState::should_request_update(double distortion) {
    window_.push_back(distortion);
    while (window_.size() > capacity_) window_.pop_front();
    return window_.size() == capacity_ && window_mean() > factor_ * baseline_;
}

double TriggerState::window_mean() const noexcept {
    if (window_.empty()) return 0.0;
    return std::accumulate(window_.begin(), window_.end(), 0.0) / static_cast<double>(window_.size());
}

void TriggerState::rebaseline(double baseline) {
    baseline_ = baseline;
    window_.clear();
}

std::string hex_digest(std::span<const std::uint8_t> digest) {
    std::string s;
    char buf[3];
    for (auto b : digest) {
        std::snprintf(buf, sizeof buf, "%02x", b);
        s += buf;
    }
    return s;
}

}  // namespace sebcom
