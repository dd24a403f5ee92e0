// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "sebcom/uep.hpp"
#include "testgen.hpp"

using namespace sebcom;

namespace {

const UepCodes& codes() {
    static const UepCodes c = UepCodes::standard();
    return c;
}

SemanticFrame sized_frame(Xoshiro256ss& rng, std::uint16_t gw, std::uint16_t gh) {
    SemanticFrame f;
    f.kb_version = 4;
    f.grid_w = gw;
    f.grid_h = gh;
    f.original_width = static_cast<std::uint16_t>(gw * 32);
    f.original_height = static_cast<std::uint16_t>(gh * 32);
    f.bits_coarse = 8;
    f.bits_fine = 6;
    for (std::size_t c = 0; c < f.cell_count(); ++c) {
        f.fine_flags.push_back(rng.below(5) == 0);
        f.class_flags.push_back(rng.below(2));
        std::vector<std::uint32_t> idx(f.fine_flags[c] ? 4 : 1);
        for (auto& v : idx) v = static_cast<std::uint32_t>(rng.below(f.fine_flags[c] ? 64 : 256));
        f.indices.push_back(idx);
    }
    return f;
}

}  // namespace

TEST_SUITE("uep") {
    TEST_CASE("class split follows the cell accounting") {
        Xoshiro256ss rng(81);
        for (int trial = 0; trial < 20; ++trial) {
            const SemanticFrame f = sized_frame(rng, static_cast<std::uint16_t>(1 + rng.below(8)),
                                                static_cast<std::uint16_t>(1 + rng.below(8)));
            const Bytes bytes = serialize_frame(f);
            const ClassStreams s = split_classes(bytes, f);
            const std::size_t n = f.cell_count();
            std::size_t a = (19 + 2 * ((n + 7) / 8)) * 8 + 32, b = 0;
            for (std::size_t c = 0; c < n; ++c) {
                const std::size_t w = f.fine_flags[c] ? 24 : 8;
                (f.class_flags[c] ? a : b) += w;
            }
            CHECK(s.class_a.size() == a);
            CHECK(s.class_b.size() == b);
            CHECK(reassemble_classes(s.class_a, s.class_b) == bytes);
        }
        const Bits stream = frame_class_stream(Bits(10, 1), 324);
        CHECK(stream.size() == 324);
        // u32 LE prefix 10: low byte 0b00001010 goes first, MSB first.
        CHECK(stream[4] == 1);
        CHECK(stream[5] == 0);
        CHECK(stream[6] == 1);
        CHECK(stream[32] == 1);
    }

    TEST_CASE("noiseless link is the identity and CBR counts symbols") {
        Xoshiro256ss rng(82);
        const SemanticFrame f = sized_frame(rng, 8, 8);
        const Bytes bytes = serialize_frame(f);
        const ProtectedTransmission t = uep_transmit(bytes, f, codes(), {});
        CHECK_FALSE(t.lost);
        CHECK(t.reassembled == bytes);
        CHECK(t.class_a.post_decode_ber == 0.0);

        const ClassStreams s = split_classes(bytes, f);
        auto blocks = [](std::size_t bits, std::size_t k) { return (bits + 32 + k - 1) / k; };
        const std::size_t symbols = (blocks(s.class_a.size(), 324) + blocks(s.class_b.size(), 432)) * 648 / 2;
        CHECK(t.symbol_count() == symbols);
        CHECK(compute_cbr(t, 256, 256) == doctest::Approx(static_cast<double>(symbols) / 65536));

        ProtectedTransmission fake;
        fake.symbols.resize(2048);
        CHECK(compute_cbr(fake, 256, 256) == 0.03125);

        const ProtectedTransmission single = single_rate_transmit(bytes, codes().class_b, {});
        CHECK(single.reassembled == bytes);
        CHECK(dump_transmission(t) == dump_transmission(t));
    }

    TEST_CASE("between the two thresholds only class B is damaged") {
        Xoshiro256ss rng(83);
        const SemanticFrame f = sized_frame(rng, 8, 8);
        const Bytes bytes = serialize_frame(f);
        bool found = false;
        for (double snr = 0.0; snr <= 4.0 && !found; snr += 0.25) {
            for (std::uint64_t seed = 0; seed < 4 && !found; ++seed) {
                const ProtectedTransmission t = uep_transmit(bytes, f, codes(), {snr, seed, 50});
                if (t.lost || t.class_b.post_decode_ber == 0.0) continue;
                found = true;
                CHECK(t.class_a.post_decode_ber == 0.0);
                const FrameParse p = deserialize_frame(t.reassembled);
                CHECK_FALSE(p.crc_ok);
                CHECK(p.frame.fine_flags == f.fine_flags);
                CHECK(p.frame.class_flags == f.class_flags);
                for (std::size_t c = 0; c < f.cell_count(); ++c)
                    if (f.class_flags[c]) CHECK(p.frame.indices[c] == f.indices[c]);
            }
        }
        CHECK(found);
    }
}
