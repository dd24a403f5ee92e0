// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Message-wise unequal error protection. A serialized frame is split into
// class A (header, both bitmaps, indices of protected cells, CRC) sent with
// the rate-1/2 code, and class B (remaining indices) sent with rate 2/3.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sebcom/bytes.hpp"
#include "sebcom/ldpc.hpp"
#include "sebcom/modem.hpp"
#include "sebcom/semcodec.hpp"

namespace sebcom {

struct ChannelConfig {
    double snr_db = kNoiselessSnr;  // Es/N0
    std::uint64_t seed = 0;
    int max_bp_iters = 50;

    void validate() const;
};

struct UepCodes {
    LdpcCode class_a;  // rate 1/2
    LdpcCode class_b;  // rate 2/3

    static UepCodes standard(std::size_t n = 648, std::uint64_t seed = 1);
};

struct ClassStreams {
    Bits class_a;  // payload bits, no length prefix
    Bits class_b;
};

/// Split a serialized frame into its protection classes.
ClassStreams split_classes(std::span<const std::uint8_t> frame_bytes, const SemanticFrame& frame);

/// Rebuild the serialized frame from class payloads; the layout is taken
/// from the header and bitmaps inside class A. Throws Error(Format) when
/// class A is not parseable.
Bytes reassemble_classes(std::span<const std::uint8_t> class_a, std::span<const std::uint8_t> class_b);

struct ClassOutcome {
    Bits sent;       // prefixed, padded message bits
    Bits received;   // decoder output for the same positions
    Bits codewords;  // concatenated transmitted codewords
    std::size_t blocks = 0;
    std::size_t failed_blocks = 0;
    double pre_decode_ber = 0;
    double post_decode_ber = 0;
};

struct ProtectedTransmission {
    ClassOutcome class_a;
    ClassOutcome class_b;
    std::vector<Symbol> symbols;
    std::vector<Symbol> received;
    bool lost = false;
    Bytes reassembled;  // empty when lost

    std::size_t symbol_count() const noexcept { return symbols.size(); }
};

/// u32 LE bit-length prefix, then payload, zero-padded to whole blocks of k.
Bits frame_class_stream(std::span<const std::uint8_t> payload, std::size_t k);

ProtectedTransmission uep_transmit(std::span<const std::uint8_t> frame_bytes, const SemanticFrame& frame,
                                   const UepCodes& codes, const ChannelConfig& cfg);

/// Equal-protection baseline: the whole byte stream through one code.
ProtectedTransmission single_rate_transmit(std::span<const std::uint8_t> bytes, const LdpcCode& code,
                                           const ChannelConfig& cfg);

/// Complex channel symbols per source pixel.
double compute_cbr(const ProtectedTransmission& t, int original_width, int original_height);

/// Diagnostic replay dump: "SEBT", u8 version, u32-length-prefixed sections
/// (class A/B sent bits, class A/B received bits, transmitted and received
/// symbols as f32 I/Q), u32 CRC-32 trailer.
Bytes dump_transmission(const ProtectedTransmission& t);

}  // namespace sebcom
