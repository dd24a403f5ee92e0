// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include <limits>

#include "doctest.h"
#include "sebcom/corpus.hpp"
#include "sebcom/error.hpp"
#include "sebcom/semcodec.hpp"
#include "testgen.hpp"

using namespace sebcom;

namespace {

Heatmap uniform_heatmap(const ImageGray& img, double v = 0.5) {
    return Heatmap{img.width, img.height, std::vector<double>(img.pixels.size(), v)};
}

HeatmapSource builtin() {
    return [](const ImageGray& img, std::size_t) { return builtin_saliency(img); };
}

// A KB whose coarse codebook is `patches` and whose fine codebook is the
// quadrants of those patches.
KnowledgeBase planted_kb(const std::vector<std::vector<double>>& patches) {
    KnowledgeBase kb;
    SebId id = 0;
    for (const auto& p : patches) {
        Seb s;
        s.id = id++;
        s.centroid = p;
        s.importance = 0.5;
        kb.sebs.emplace(s.id, s);
    }
    for (const auto& p : patches)
        for (int q = 0; q < 4; ++q) {
            Seb s;
            s.id = id++;
            s.granularity = Granularity::Fine;
            s.importance = 0.5;
            for (int y = 0; y < 16; ++y)
                for (int x = 0; x < 16; ++x) s.centroid.push_back(p[(q / 2 * 16 + y) * 32 + q % 2 * 16 + x]);
            kb.sebs.emplace(s.id, s);
        }
    for (Granularity g : kGranularities) assign_labels(kb, g);
    rebuild_relation(kb);
    return kb;
}

}  // namespace

TEST_SUITE("semcodec") {
    TEST_CASE("patch extraction") {
        const ImageGray c = make_image(64, 64, std::vector<std::uint8_t>(64 * 64, 128));
        const FeatureMatrix p = extract_patches(c, 32);
        CHECK(p.rows() == 4);
        CHECK(p.dim == 1024);
        for (double v : p.data) CHECK(v == doctest::Approx(128.0 / 255));

        std::vector<std::uint8_t> px(32 * 32);
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x) px[y * 32 + x] = static_cast<std::uint8_t>((y / 16) * 2 + x / 16);
        const FeatureMatrix q = extract_patches(make_image(32, 32, px), 16);
        for (std::size_t i = 0; i < 4; ++i) CHECK(q.row(i)[0] == doctest::Approx(i / 255.0));
        CHECK_THROWS_AS(extract_patches(make_image(48, 32, std::vector<std::uint8_t>(48 * 32)), 32), Error);
    }

    TEST_CASE("build_kb") {
        const std::vector<ImageGray> one{make_image(64, 64, std::vector<std::uint8_t>(64 * 64, 51))};
        CodecConfig cfg;
        cfg.k_coarse = 1;
        cfg.k_fine = 1;
        const KnowledgeBase kb = build_kb(one, cfg, builtin());
        CHECK(kb.count(Granularity::Coarse) == 1);
        CHECK(kb.count(Granularity::Fine) == 1);
        CHECK(kb.relation.edges.size() == 1);
        CHECK(kb.baseline_distortion == doctest::Approx(0.0));
        CHECK(kb.at(0).centroid[5] == doctest::Approx(0.2));
        CHECK(kb.version == 0);

        const auto corpus = std::vector<ImageGray>{generate_image(TextureFamily::Blobs, 128, 3),
                                                   generate_image(TextureFamily::Gradients, 128, 4)};
        CodecConfig small;
        small.k_coarse = 8;
        small.k_fine = 8;
        const KnowledgeBase a = build_kb(corpus, small, builtin());
        const KnowledgeBase b = build_kb(corpus, small, builtin());
        CHECK(kb_hash(a) == kb_hash(b));
        CHECK(check_poset_axioms(a).valid);
        a.validate();
        CHECK_THROWS_AS(build_kb(std::span<const ImageGray>{}, small, builtin()), Error);
    }

    TEST_CASE("encode selects fine and protected cells by rank") {
        Xoshiro256ss rng(41);
        const KnowledgeBase kb = testgen::random_kb(rng, 4, 4);
        const ImageGray img = make_image(320, 320, std::vector<std::uint8_t>(320 * 320, 90));
        CodecConfig cfg;
        cfg.p_fine = 0;
        const SemanticFrame none = encode(img, kb, uniform_heatmap(img), cfg);
        CHECK(std::count(none.fine_flags.begin(), none.fine_flags.end(), 1) == 0);

        cfg.p_fine = 0.2;
        cfg.p_protect = 0.5;
        const SemanticFrame f = encode(img, kb, uniform_heatmap(img), cfg);
        REQUIRE(f.cell_count() == 100);
        for (std::size_t c = 0; c < 100; ++c) {
            CHECK(f.fine_flags[c] == (c < 20 ? 1 : 0));
            CHECK(f.class_flags[c] == (c < 50 ? 1 : 0));
        }
        CHECK(selected_cells(0.25, 2) == 1);
        CHECK(selected_cells(0.2, 7) == 1);
        CHECK(selected_cells(0.5, 7) == 4);
        CHECK(rank_cells(std::vector<double>{0.1, 0.5, 0.5, 0.9}) == std::vector<std::size_t>{3, 1, 2, 0});
        CHECK_THROWS_AS(encode(img, kb, Heatmap{32, 32, std::vector<double>(1024)}, cfg), Error);
    }

    TEST_CASE("planted images encode to their planted Sebs and decode exactly") {
        Xoshiro256ss rng(42);
        std::vector<std::vector<double>> patches;
        for (int i = 0; i < 8; ++i) patches.push_back(testgen::grid_patch(rng));
        const KnowledgeBase kb = planted_kb(patches);
        const Codebook coarse = kb.codebook(Granularity::Coarse);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<std::size_t> choice(12);
            for (auto& c : choice) c = rng.below(8);
            const ImageGray img = testgen::tiled_image(patches, choice, 4, 3);
            CodecConfig cfg;
            cfg.p_fine = 0.25;
            const Heatmap h = builtin_saliency(img);
            const SemanticFrame f = encode(img, kb, h, cfg);
            for (std::size_t c = 0; c < 12; ++c) {
                if (f.fine_flags[c]) continue;
                // Exhaustive nearest neighbour over the coarse codebook.
                std::size_t best = 0;
                double bd = std::numeric_limits<double>::infinity();
                const FeatureMatrix cells = extract_patches(img, 32);
                for (std::size_t k = 0; k < 8; ++k) {
                    const double d = squared_distance(cells.row(c), patches[k]);
                    if (d < bd) {
                        bd = d;
                        best = k;
                    }
                }
                CHECK(best == choice[c]);
                CHECK(f.indices[c][0] == coarse.labels[choice[c]]);
            }
            CHECK(decode(f, kb) == img);
            CHECK(quantization_distortion(img, kb) == doctest::Approx(0.0));
            CHECK(encode(img, kb, h, cfg) == f);
        }
    }

    TEST_CASE("decode clamps out-of-range indices and checks the version") {
        Xoshiro256ss rng(43);
        std::vector<std::vector<double>> patches;
        for (int i = 0; i < 4; ++i) patches.push_back(testgen::grid_patch(rng));
        KnowledgeBase kb = planted_kb(patches);
        const Codebook coarse = kb.codebook(Granularity::Coarse);
        SemanticFrame f;
        f.grid_w = f.grid_h = 1;
        f.original_width = f.original_height = 32;
        f.bits_coarse = 4;
        f.bits_fine = 4;
        f.fine_flags = {0};
        f.class_flags = {1};
        f.indices = {{4 + 5}};
        const ImageGray out = decode(f, kb);
        CHECK(out == testgen::tiled_image(patches, {3}, 1, 1));
        kb.version = 3;
        CHECK_THROWS_AS(decode(f, kb), Error);
        try {
            decode(f, kb);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::KbMismatch);
        }
        (void)coarse;
    }

    TEST_CASE("frame serialization") {
        Xoshiro256ss rng(44);
        for (int i = 0; i < 100; ++i) {
            const SemanticFrame f = testgen::random_frame(rng);
            const Bytes b = serialize_frame(f);
            const FrameParse p = deserialize_frame(b);
            CHECK(p.crc_ok);
            CHECK(p.frame == f);
            CHECK(b.size() == frame_layout(f).total_bytes);
            std::size_t bits = 0;
            for (std::size_t c = 0; c < f.cell_count(); ++c) bits += f.fine_flags[c] ? 4u * f.bits_fine : f.bits_coarse;
            CHECK(frame_layout(f).payload_bits == bits);
        }

        SemanticFrame one;
        one.grid_w = one.grid_h = 1;
        one.original_width = one.original_height = 32;
        one.bits_coarse = 8;
        one.bits_fine = 6;
        one.fine_flags = {0};
        one.class_flags = {1};
        one.indices = {{0xAB}};
        Bytes b = serialize_frame(one);
        REQUIRE(b.size() == 19 + 2 + 1 + 4);
        CHECK(b[19] == 0x00);
        CHECK(b[20] == 0x80);
        CHECK(b[21] == 0xAB);
        CHECK(std::string(b.begin(), b.begin() + 4) == "SEBF");

        b[21] ^= 0x01;
        const FrameParse bad = deserialize_frame(b);
        CHECK_FALSE(bad.crc_ok);
        CHECK(bad.frame.indices[0][0] == 0xAA);
        b[0] = 'X';
        CHECK_THROWS_AS(deserialize_frame(b), Error);
        CHECK_THROWS_AS(deserialize_frame(Bytes(b.begin(), b.begin() + 10)), Error);
    }

    TEST_CASE("quantization distortion") {
        KnowledgeBase kb;
        Seb s;
        s.centroid.assign(1024, 0.2);
        kb.sebs.emplace(0, s);
        const ImageGray img = make_image(64, 32, std::vector<std::uint8_t>(64 * 32, 153));
        CHECK(quantization_distortion(img, kb) == doctest::Approx(0.16).epsilon(1e-12));

        Xoshiro256ss rng(45);
        const KnowledgeBase r = testgen::random_kb(rng, 6, 2);
        std::vector<std::uint8_t> px(96 * 64);
        for (auto& v : px) v = static_cast<std::uint8_t>(rng.below(256));
        const ImageGray rimg = make_image(96, 64, px);
        double total = 0;
        const FeatureMatrix cells = extract_patches(rimg, 32);
        for (std::size_t c = 0; c < cells.rows(); ++c) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [id, seb] : r.sebs)
                if (seb.granularity == Granularity::Coarse) best = std::min(best, squared_distance(cells.row(c), seb.centroid));
            total += best / 1024;
        }
        CHECK(quantization_distortion(rimg, r) == doctest::Approx(total / cells.rows()).epsilon(1e-12));
    }

    TEST_CASE("mixed granularity lowers importance-weighted error") {
        const auto corpus = generate_corpus(TextureFamily::Blobs, 4, 128, 46);
        CodecConfig cfg;
        cfg.k_coarse = 16;
        cfg.k_fine = 64;
        const KnowledgeBase kb = build_kb(corpus, cfg, builtin());
        double mixed = 0, coarse_only = 0;
        for (const auto& img : corpus) {
            const Heatmap h = builtin_saliency(img);
            auto weighted = [&](const ImageGray& rec) {
                double num = 0, den = 0;
                for (std::size_t i = 0; i < img.pixels.size(); ++i) {
                    const double d = static_cast<double>(img.pixels[i]) - rec.pixels[i];
                    num += h.values[i] * d * d;
                    den += h.values[i];
                }
                return num / den;
            };
            cfg.p_fine = 0.2;
            mixed += weighted(decode(encode(img, kb, h, cfg), kb));
            cfg.p_fine = 0;
            coarse_only += weighted(decode(encode(img, kb, h, cfg), kb));
        }
        CHECK(mixed < coarse_only);
    }
}
