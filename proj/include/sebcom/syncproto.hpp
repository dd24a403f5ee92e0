// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
//
// KB synchronization between the access point and user equipment: update
// requests, incremental (DELTA) and complete (FULL) KB messages on the SEBK
// wire format, and the canonical KB digest.
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sebcom/bytes.hpp"
#include "sebcom/kb.hpp"

namespace sebcom {

enum class MessageKind : std::uint8_t { Request = 0, Delta = 1, Full = 2 };

const char* message_kind_name(MessageKind k) noexcept;

/// One Seb as carried on the wire (single-precision values).
struct WireSeb {
    SebId id = 0;
    Granularity granularity = Granularity::Coarse;
    float importance = 0;
    std::vector<float> centroid;
    std::vector<SebId> parents;  // coarse ids a fine Seb refines, at most 255

    bool operator==(const WireSeb&) const = default;
};

struct DeltaBody {
    std::vector<WireSeb> added;
    std::vector<SebId> removed;
    std::vector<std::pair<SebId, float>> importance_updates;

    bool operator==(const DeltaBody&) const = default;
};

struct FullBody {
    std::vector<WireSeb> sebs;                        // ascending id
    std::vector<std::pair<SebId, SebId>> edges;       // ascending (fine, coarse)
    float baseline_distortion = 0;
    float decay_lambda = 0;
    float prune_threshold = 0;
    float admission_factor = 0;
    float trigger_factor = 0;
    std::uint32_t trigger_window = 0;

    bool operator==(const FullBody&) const = default;
};

struct SyncMessage {
    MessageKind kind = MessageKind::Request;
    std::uint32_t kb_version_base = 0;
    float statistic = 0;  // REQUEST only
    DeltaBody delta;      // DELTA only
    FullBody full;        // FULL only

    bool operator==(const SyncMessage&) const = default;
};

inline constexpr std::size_t kSyncHeaderBytes = 10;

Bytes encode_message(const SyncMessage& msg);
/// Throws Error(Corrupt) on CRC mismatch and Error(Format) on unknown kind,
/// truncation or trailing bytes.
SyncMessage decode_message(std::span<const std::uint8_t> bytes);

SyncMessage make_request(const KnowledgeBase& kb, float statistic);
SyncMessage make_full(const KnowledgeBase& kb);
/// DELTA that inserts `candidates` (under the ids apply_update will give
/// them), removes `removals`, and carries the current importance of every
/// surviving Seb so decay applied locally reaches the peer.
SyncMessage make_delta(const KnowledgeBase& kb, const std::vector<Seb>& candidates,
                       const std::vector<SebId>& removals);

/// Rebuild a KB from a FULL body; labels are recomputed, version taken from
/// the message. Throws Error(Format) for an inconsistent body.
KnowledgeBase kb_from_full(const SyncMessage& msg);

/// The FULL body bytes (no header, no CRC).
Bytes canonical_kb_body(const KnowledgeBase& kb);
std::array<std::uint8_t, 32> kb_hash(const KnowledgeBase& kb);

/// Round-trip through the FULL wire form so values are exactly what a peer
/// would hold.
KnowledgeBase canonicalize(const KnowledgeBase& kb);

/// DELTA requires kb.version == kb_version_base (else Error(Stale)); FULL
/// always applies; REQUEST leaves the KB untouched. Returns the KB version.
std::uint32_t apply_message(KnowledgeBase& kb, const SyncMessage& msg);

class TriggerState {
  public:
    TriggerState(double baseline, std::size_t window, double factor);
    explicit TriggerState(const KnowledgeBase& kb)
        : TriggerState(kb.baseline_distortion, kb.params.trigger_window, kb.params.trigger_factor) {}

    /// Push a per-image distortion; true iff the window is full and its mean
    /// exceeds factor * baseline.
    bool should_request_update(double distortion);
    double window_mean() const noexcept;
    std::size_t size() const noexcept { return window_.size(); }
    double baseline() const noexcept { return baseline_; }
    void rebaseline(double baseline);

  private:
    std::deque<double> window_;
    double baseline_;
    std::size_t capacity_;
    double factor_;
};

std::string hex_digest(std::span<const std::uint8_t> digest);

}  // namespace sebcom
