// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include <string>

#include "doctest.h"
#include "sebcom/error.hpp"
#include "sebcom/image.hpp"

using namespace sebcom;

namespace {

Bytes pnm(const std::string& header, const Bytes& body) {
    Bytes out(header.begin(), header.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

}  // namespace

TEST_SUITE("image") {
    TEST_CASE("64x64 P5 is not padded") {
        const ImageGray img = decode_pnm(pnm("P5\n64 64\n255\n", Bytes(64 * 64, 9)));
        CHECK(img.width == 64);
        CHECK(img.height == 64);
        CHECK(img.original_width == 64);
        CHECK(img.original_height == 64);
    }

    TEST_CASE("50x40 P5 pads to 64x64 by edge replication") {
        Bytes body(50 * 40);
        for (int y = 0; y < 40; ++y)
            for (int x = 0; x < 50; ++x) body[y * 50 + x] = static_cast<std::uint8_t>(x + y);
        const ImageGray img = decode_pnm(pnm("P5\n# comment\n50 40\n255\n", body));
        CHECK(img.width == 64);
        CHECK(img.height == 64);
        CHECK(img.original_width == 50);
        CHECK(img.original_height == 40);
        CHECK(img.at(63, 10) == img.at(49, 10));
        CHECK(img.at(20, 63) == img.at(20, 39));
        CHECK(img.at(63, 63) == 49 + 39);
        CHECK(crop_to_original(img).pixels == body);
    }

    TEST_CASE("P6 red pixel maps to BT.601 luma 76") {
        const ImageGray img = decode_pnm_unpadded(pnm("P6\n1 1\n255\n", Bytes{255, 0, 0}));
        CHECK(img.at(0, 0) == 76);
        CHECK(luma601(255, 255, 255) == 255);
        CHECK(luma601(0, 255, 0) == 150);
    }

    TEST_CASE("malformed inputs") {
        CHECK_THROWS_AS(decode_pnm(pnm("P2\n1 1\n255\n", Bytes{1})), Error);
        CHECK_THROWS_AS(decode_pnm(pnm("P5\n2 2\n255\n", Bytes{1, 2, 3})), Error);
        CHECK_THROWS_AS(decode_pnm(pnm("P5\n1 1\n65535\n", Bytes{1, 2})), Error);
    }

    TEST_CASE("PGM encode round-trip") {
        const ImageGray img = make_image(3, 2, {1, 2, 3, 4, 5, 6});
        CHECK(decode_pnm_unpadded(encode_pgm(img)) == img);
    }
}
