// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include <string_view>

#include "doctest.h"
#include "sebcom/bytes.hpp"
#include "sebcom/error.hpp"
#include "sebcom/rng.hpp"

using namespace sebcom;

namespace {

Bytes ascii(std::string_view s) { return Bytes(s.begin(), s.end()); }

}  // namespace

TEST_SUITE("bytes") {
    TEST_CASE("crc32 check value") {
        CHECK(crc32(ascii("123456789")) == 0xCBF43926u);
        CHECK(crc32({}) == 0u);
    }

    TEST_CASE("sha256 of abc") {
        const auto d = sha256(ascii("abc"));
        CHECK(d[0] == 0xba);
        CHECK(d[1] == 0x78);
        CHECK(d[31] == 0xad);
    }

    TEST_CASE("little-endian writer and reader") {
        ByteWriter w;
        w.u8(0x01);
        w.u16(0x0203);
        w.u32(0x04050607);
        w.f32(1.5f);
        const Bytes b = w.take();
        REQUIRE(b.size() == 11);
        CHECK(b[1] == 0x03);
        CHECK(b[2] == 0x02);
        CHECK(b[3] == 0x07);
        CHECK(b[6] == 0x04);
        ByteReader r(b);
        CHECK(r.u8() == 0x01);
        CHECK(r.u16() == 0x0203);
        CHECK(r.u32() == 0x04050607u);
        CHECK(r.f32() == 1.5f);
        CHECK(r.remaining() == 0);
        CHECK_THROWS_AS(r.u8(), Error);
    }

    TEST_CASE("bit writer is MSB first") {
        BitWriter w;
        w.bits(0xAB, 8);
        w.bits(0b101, 3);
        w.align();
        const Bytes b = w.take();
        REQUIRE(b.size() == 2);
        CHECK(b[0] == 0xAB);
        CHECK(b[1] == 0xA0);
        BitReader r(b);
        CHECK(r.bits(8) == 0xAB);
        CHECK(r.bits(3) == 0b101);
        r.align();
        CHECK(r.bit_position() == 16);
        CHECK_THROWS_AS(r.bit(), Error);
    }

    TEST_CASE("pack and unpack bits round-trip") {
        Xoshiro256ss rng(5);
        Bytes b(37);
        for (auto& v : b) v = static_cast<std::uint8_t>(rng());
        CHECK(pack_bits(unpack_bits(b)) == b);
        CHECK(unpack_bits(Bytes{0x80}) == Bits{1, 0, 0, 0, 0, 0, 0, 0});
    }
}
