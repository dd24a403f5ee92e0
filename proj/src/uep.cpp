// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/uep.hpp"

#include <algorithm>

#include "sebcom/error.hpp"

namespace sebcom {

namespace {

constexpr char kDumpMagic[4] = {'S', 'E', 'B', 'T'};

class BitCursor {
  public:
    explicit BitCursor(std::span<const std::uint8_t> bits) : bits_(bits) {}

    std::span<const std::uint8_t> take(std::size_t n) {
        if (bits_.size() - pos_ < n) fail(ErrorCode::Format, "class stream shorter than its frame layout");
        auto s = bits_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

  private:
    std::span<const std::uint8_t> bits_;
    std::size_t pos_ = 0;
};

void append(Bits& dst, std::span<const std::uint8_t> src) { dst.insert(dst.end(), src.begin(), src.end()); }

struct Lane {
    Bits payload;
    const LdpcCode* code;
};

/// Encode each lane into whole codewords, send all symbols through one AWGN
/// realization (lanes in order), and decode.
std::vector<ClassOutcome> run_lanes(const std::vector<Lane>& lanes, const ChannelConfig& cfg,
                                    std::vector<Symbol>& symbols, std::vector<Symbol>& received) {
    std::vector<ClassOutcome> out(lanes.size());
    Bits all_codewords;
    for (std::size_t l = 0; l < lanes.size(); ++l) {
        const LdpcCode& code = *lanes[l].code;
        out[l].sent = frame_class_stream(lanes[l].payload, code.k());
        out[l].blocks = out[l].sent.size() / code.k();
        for (std::size_t b = 0; b < out[l].blocks; ++b) {
            const auto cw = code.encode(std::span(out[l].sent).subspan(b * code.k(), code.k()));
            append(out[l].codewords, cw);
        }
        append(all_codewords, out[l].codewords);
    }
    symbols = qpsk_modulate(all_codewords);
    received = awgn(symbols, cfg.snr_db, cfg.seed);
    const auto llrs = qpsk_llr(received, noise_variance(cfg.snr_db));

    std::size_t offset = 0;
    for (std::size_t l = 0; l < lanes.size(); ++l) {
        const LdpcCode& code = *lanes[l].code;
        ClassOutcome& o = out[l];
        const auto lane_llrs = std::span(llrs).subspan(offset, o.codewords.size());
        o.pre_decode_ber = measure_ber(o.codewords, hard_decision(lane_llrs));
        for (std::size_t b = 0; b < o.blocks; ++b) {
            const auto res = ldpc_decode(code, lane_llrs.subspan(b * code.n(), code.n()), cfg.max_bp_iters);
            if (!res.converged) ++o.failed_blocks;
            append(o.received, res.message);
        }
        o.post_decode_ber = measure_ber(o.sent, o.received);
        offset += o.codewords.size();
    }
    return out;
}

/// Payload bits declared by a received stream's length prefix.
std::span<const std::uint8_t> stream_payload(const Bits& stream) {
    if (stream.size() < 32) fail(ErrorCode::Format, "class stream shorter than its length prefix");
    const Bytes prefix = pack_bits(std::span(stream).first(32));
    ByteReader r(prefix);
    const std::uint32_t len = r.u32();
    if (len > stream.size() - 32) fail(ErrorCode::Format, "class length prefix exceeds stream");
    return std::span(stream).subspan(32, len);
}

}  // namespace

void ChannelConfig::validate() const { require(max_bp_iters >= 1, "max_bp_iters must be >= 1"); }

UepCodes UepCodes::standard(std::size_t n, std::uint64_t seed) {
    return {LdpcCode::construct(CodeRate::Half, n, seed), LdpcCode::construct(CodeRate::TwoThirds, n, seed)};
}

ClassStreams split_classes(std::span<const std::uint8_t> frame_bytes, const SemanticFrame& frame) {
    const FrameLayout layout = frame_layout(frame);
    require(frame_bytes.size() == layout.total_bytes, "serialized frame does not match its layout");
    const Bits bits = unpack_bits(frame_bytes);
    ClassStreams s;
    const std::size_t head_bits = (kFrameHeaderBytes + 2 * layout.bitmap_bytes) * 8;
    append(s.class_a, std::span(bits).first(head_bits));
    std::size_t pos = head_bits;
    for (std::size_t c = 0; c < frame.cell_count(); ++c) {
        const unsigned w = frame.cell_index_bits(c);
        append(frame.class_flags[c] ? s.class_a : s.class_b, std::span(bits).subspan(pos, w));
        pos += w;
    }
    append(s.class_a, std::span(bits).last(32));
    return s;
}

Bytes reassemble_classes(std::span<const std::uint8_t> class_a, std::span<const std::uint8_t> class_b) {
    BitCursor a(class_a);
    BitCursor b(class_b);
    const Bytes header = pack_bits(a.take(kFrameHeaderBytes * 8));
    ByteReader hr(header);
    hr.raw(9);
    hr.u16();
    hr.u16();
    const std::size_t grid_w = hr.u16();
    const std::size_t grid_h = hr.u16();
    const unsigned bits_coarse = hr.u8();
    const unsigned bits_fine = hr.u8();
    if (bits_coarse > 32 || bits_fine > 32) fail(ErrorCode::Format, "index width exceeds 32 bits");
    const std::size_t n = grid_w * grid_h;
    const std::size_t bitmap_bits = (n + 7) / 8 * 8;
    const auto fine_flags = a.take(bitmap_bits);
    const auto class_flags = a.take(bitmap_bits);

    Bits out;
    append(out, unpack_bits(header));
    append(out, fine_flags);
    append(out, class_flags);
    for (std::size_t c = 0; c < n; ++c) {
        const unsigned w = fine_flags[c] ? 4 * bits_fine : bits_coarse;
        append(out, class_flags[c] ? a.take(w) : b.take(w));
    }
    out.resize((out.size() + 7) / 8 * 8, 0);
    append(out, a.take(32));
    return pack_bits(out);
}

Bits frame_class_stream(std::span<const std::uint8_t> payload, std::size_t k) {
    require(payload.size() <= 0xFFFFFFFFu, "class payload too long");
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(payload.size()));
    Bits out = unpack_bits(w.bytes());
    append(out, payload);
    out.resize((out.size() + k - 1) / k * k, 0);
    return out;
}

ProtectedTransmission uep_transmit(std::span<const std::uint8_t> frame_bytes, const SemanticFrame& frame,
                                   const UepCodes& codes, const ChannelConfig& cfg) {
    cfg.validate();
    ClassStreams streams = split_classes(frame_bytes, frame);
    const std::size_t b_len = streams.class_b.size();
    std::vector<Lane> lanes{{std::move(streams.class_a), &codes.class_a}, {std::move(streams.class_b), &codes.class_b}};

    ProtectedTransmission t;
    auto outcomes = run_lanes(lanes, cfg, t.symbols, t.received);
    t.class_a = std::move(outcomes[0]);
    t.class_b = std::move(outcomes[1]);
    t.lost = t.class_a.failed_blocks > 0;
    if (t.lost) return t;
    try {
        // Class B's own prefix may be damaged; its length follows from class A.
        const auto a_payload = stream_payload(t.class_a.received);
        const auto b_payload = std::span(t.class_b.received).subspan(32, b_len);
        t.reassembled = reassemble_classes(a_payload, b_payload);
    } catch (const Error&) {
        t.lost = true;
        t.reassembled.clear();
    }
    return t;
}

ProtectedTransmission single_rate_transmit(std::span<const std::uint8_t> bytes, const LdpcCode& code,
                                           const ChannelConfig& cfg) {
    cfg.validate();
    std::vector<Lane> lanes{{unpack_bits(bytes), &code}};
    ProtectedTransmission t;
    auto outcomes = run_lanes(lanes, cfg, t.symbols, t.received);
    t.class_a = std::move(outcomes[0]);
    t.lost = t.class_a.failed_blocks > 0;
    if (!t.lost) {
        try {
            const auto payload = stream_payload(t.class_a.received);
            if (payload.size() != bytes.size() * 8) fail(ErrorCode::Format, "length prefix mismatch");
            t.reassembled = pack_bits(payload);
        } catch (const Error&) {
            t.lost = true;
        }
    }
    return t;
}

double compute_cbr(const ProtectedTransmission& t, int original_width, int original_height) {
    require(original_width > 0 && original_height > 0, "CBR needs a positive image size");
    return static_cast<double>(t.symbol_count()) / (static_cast<double>(original_width) * original_height);
}

Bytes dump_transmission(const ProtectedTransmission& t) {
    ByteWriter w;
    w.raw(std::string_view(kDumpMagic, 4));
    w.u8(1);
    auto bits_section = [&](const Bits& bits) {
        const Bytes packed = pack_bits(bits);
        w.u32(static_cast<std::uint32_t>(bits.size()));
        w.raw(packed);
    };
    auto symbol_section = [&](const std::vector<Symbol>& syms) {
        w.u32(static_cast<std::uint32_t>(syms.size()));
        for (const auto& s : syms) {
            w.f32(static_cast<float>(s.real()));
            w.f32(static_cast<float>(s.imag()));
        }
    };
    bits_section(t.class_a.sent);
    bits_section(t.class_b.sent);
    bits_section(t.class_a.received);
    bits_section(t.class_b.received);
    symbol_section(t.symbols);
    symbol_section(t.received);
    w.u8(t.lost ? 1 : 0);
    const std::uint32_t crc = crc32(w.bytes());
    w.u32(crc);
    return w.take();
}

}  // namespace sebcom
