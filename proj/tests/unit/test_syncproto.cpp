// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "sebcom/error.hpp"
#include "sebcom/syncproto.hpp"
#include "testgen.hpp"

using namespace sebcom;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

}  // namespace

TEST_SUITE("syncproto") {
    TEST_CASE("wire round trip") {
        Xoshiro256ss rng(71);
        for (int i = 0; i < 100; ++i) {
            const SyncMessage m = testgen::random_message(rng);
            const Bytes b = encode_message(m);
            CHECK(std::string(b.begin(), b.begin() + 4) == "SEBK");
            CHECK(decode_message(b) == m);
        }
    }

    TEST_CASE("layout and corruption") {
        SyncMessage empty;
        empty.kind = MessageKind::Delta;
        empty.kb_version_base = 7;
        const Bytes b = encode_message(empty);
        CHECK(b.size() == kSyncHeaderBytes + 6 + 4);
        CHECK(b[5] == 1);
        CHECK(b[6] == 7);

        Xoshiro256ss rng(72);
        for (int i = 0; i < 50; ++i) {
            Bytes m = encode_message(testgen::random_message(rng));
            const std::size_t bit = rng.below(m.size() * 8);
            m[bit / 8] ^= static_cast<std::uint8_t>(0x80 >> (bit % 8));
            const ErrorCode c = code_of([&] { decode_message(m); });
            // Damage to the header fields can surface as a format error first.
            CHECK((c == ErrorCode::Corrupt || c == ErrorCode::Format));
        }
        Bytes tail = b;
        tail[tail.size() - 1] ^= 1;
        CHECK(code_of([&] { decode_message(tail); }) == ErrorCode::Corrupt);
        CHECK(code_of([&] { decode_message(Bytes(b.begin(), b.begin() + 8)); }) == ErrorCode::Format);
    }

    TEST_CASE("replicas stay in step") {
        Xoshiro256ss rng(73);
        KnowledgeBase ap = canonicalize(testgen::random_kb(rng, 6, 6));
        KnowledgeBase ue = kb_from_full(decode_message(encode_message(make_full(ap))));
        CHECK(kb_hash(ap) == kb_hash(ue));
        CHECK(ue == ap);

        const SyncMessage d =
            make_delta(ap, {testgen::random_seb(rng, Granularity::Coarse), testgen::random_seb(rng, Granularity::Fine)}, {2});
        const SyncMessage wire = decode_message(encode_message(d));
        CHECK(apply_message(ap, wire) == 1);
        CHECK(apply_message(ue, wire) == 1);
        CHECK(kb_hash(ap) == kb_hash(ue));
        CHECK(hex_digest(kb_hash(ap)).size() == 64);

        CHECK(code_of([&] { apply_message(ue, wire); }) == ErrorCode::Stale);

        KnowledgeBase fresh;
        fresh.version = 99;
        SyncMessage full = make_full(ap);
        CHECK(apply_message(fresh, full) == ap.version);
        CHECK(kb_hash(fresh) == kb_hash(ap));

        const float before = static_cast<float>(ue.at(0).importance);
        CHECK(apply_message(ue, make_request(ue, 0.5f)) == ue.version);
        CHECK(static_cast<float>(ue.at(0).importance) == before);
    }

    TEST_CASE("update trigger") {
        TriggerState flat(0.1, 10, 1.5);
        for (int i = 0; i < 30; ++i) CHECK_FALSE(flat.should_request_update(0.1));

        TriggerState high(0.1, 10, 1.5);
        for (int i = 0; i < 9; ++i) CHECK_FALSE(high.should_request_update(0.2));
        CHECK(high.should_request_update(0.2));
        CHECK(high.window_mean() == doctest::Approx(0.2));
        high.rebaseline(0.3);
        CHECK(high.size() == 0);
        CHECK(high.baseline() == 0.3);
    }
}
