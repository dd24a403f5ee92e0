// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>
#include <vector>

#include "json.hpp"

#include "sebcom/corpus.hpp"
#include "sebcom/error.hpp"
#include "sebcom/metrics.hpp"
#include "sebcom/rng.hpp"
#include "sebcom/scenario.hpp"
#include "sebcom/syncproto.hpp"

struct sebcom_kb {
    sebcom::KnowledgeBase kb;
};

namespace {

using namespace sebcom;
using nlohmann::json;

thread_local std::string g_last_error;

sebcom_status to_status(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidArgument: return SEBCOM_E_INVALID_ARGUMENT;
        case ErrorCode::Io: return SEBCOM_E_IO;
        case ErrorCode::Format: return SEBCOM_E_FORMAT;
        case ErrorCode::Corrupt: return SEBCOM_E_CORRUPT;
        case ErrorCode::KbMismatch: return SEBCOM_E_KB_MISMATCH;
        case ErrorCode::Stale: return SEBCOM_E_STALE;
        case ErrorCode::Construction: return SEBCOM_E_CONSTRUCTION;
        case ErrorCode::Internal: return SEBCOM_E_INTERNAL;
    }
    return SEBCOM_E_INTERNAL;
}

template <typename F>
sebcom_status guarded(F&& body) noexcept {
    try {
        body();
        g_last_error.clear();
        return SEBCOM_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        g_last_error = e.what();
        return SEBCOM_E_IO;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return SEBCOM_E_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SEBCOM_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return SEBCOM_E_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void need(const void* p, const char* what) {
    if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

CodecConfig codec_from(const sebcom_codec_config* c) {
    CodecConfig out;
    if (c) {
        out.p_fine = c->p_fine;
        out.p_protect = c->p_protect;
        out.k_coarse = c->k_coarse;
        out.k_fine = c->k_fine;
        out.kmeans_max_iters = c->kmeans_max_iters;
        out.kmeans_tol = c->kmeans_tol;
        out.seed = c->seed;
    }
    out.validate();
    return out;
}

ImportanceProvider provider_from(const char* importance) {
    return ImportanceProvider::parse(importance ? importance : "builtin");
}

std::vector<std::string> paths_from(const char* const* paths, std::size_t n) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "at least one image is required");
    need(paths, "image_paths");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        need(paths[i], "image path");
        out.emplace_back(paths[i]);
    }
    return out;
}

void write_bytes(const char* path, const Bytes& b) { write_file(path, b); }

json number_or_inf(double v) { return std::isinf(v) ? json(v > 0 ? "inf" : "-inf") : json(v); }

json class_json(const ClassOutcome& o) {
    return {{"blocks", o.blocks},
            {"failed_blocks", o.failed_blocks},
            {"pre_decode_ber", o.pre_decode_ber},
            {"post_decode_ber", o.post_decode_ber}};
}

SemanticFrame load_frame(const char* path) {
    const FrameParse parsed = deserialize_frame(read_file(path));
    if (!parsed.crc_ok) fail(ErrorCode::Corrupt, std::string("frame CRC mismatch in ") + path);
    return parsed.frame;
}

}  // namespace

extern "C" {

const char* sebcom_version(void) { return "1.0.0"; }

const char* sebcom_status_name(sebcom_status status) {
    switch (status) {
        case SEBCOM_OK: return "OK";
        case SEBCOM_E_INVALID_ARGUMENT: return "INVALID_ARGUMENT";
        case SEBCOM_E_IO: return "IO";
        case SEBCOM_E_FORMAT: return "FORMAT";
        case SEBCOM_E_CORRUPT: return "CORRUPT";
        case SEBCOM_E_KB_MISMATCH: return "KB_MISMATCH";
        case SEBCOM_E_STALE: return "STALE";
        case SEBCOM_E_CONSTRUCTION: return "CONSTRUCTION";
        case SEBCOM_E_INTERNAL: return "INTERNAL";
    }
    return "UNKNOWN";
}

const char* sebcom_last_error(void) { return g_last_error.c_str(); }

void sebcom_string_free(char* s) { std::free(s); }

void sebcom_codec_config_default(sebcom_codec_config* config) {
    if (!config) return;
    const CodecConfig d;
    *config = {d.p_fine, d.p_protect, static_cast<std::uint32_t>(d.k_coarse), static_cast<std::uint32_t>(d.k_fine),
               d.kmeans_max_iters, d.kmeans_tol, d.seed};
}

void sebcom_channel_config_default(sebcom_channel_config* config) {
    if (!config) return;
    *config = {kNoiselessSnr, 0, 50, SEBCOM_UEP_IMPORTANCE};
}

void sebcom_update_config_default(sebcom_update_config* config) {
    if (!config) return;
    const ScenarioConfig d;
    *config = {static_cast<std::uint32_t>(d.candidates_coarse), static_cast<std::uint32_t>(d.candidates_fine),
               d.codec.kmeans_max_iters, d.codec.kmeans_tol, 0};
}

sebcom_status sebcom_kb_train(const char* const* image_paths, size_t n_images, const sebcom_codec_config* config,
                              const char* importance, sebcom_kb** out) {
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        const auto paths = paths_from(image_paths, n_images);
        const CodecConfig codec = codec_from(config);
        const ImportanceProvider provider = provider_from(importance);
        std::vector<ImageGray> images;
        for (const auto& p : paths) images.push_back(load_image(p));
        auto kb = std::make_unique<sebcom_kb>();
        kb->kb = canonicalize(build_kb(
            images, codec, [&](const ImageGray& img, std::size_t i) { return provider.heatmap_for(img, paths[i]); }));
        *out = kb.release();
    });
}

sebcom_status sebcom_kb_load(const char* path, sebcom_kb** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        const SyncMessage msg = decode_message(read_file(path));
        if (msg.kind != MessageKind::Full) fail(ErrorCode::Format, std::string(path) + " does not hold a FULL KB");
        auto kb = std::make_unique<sebcom_kb>();
        kb->kb = kb_from_full(msg);
        *out = kb.release();
    });
}

sebcom_status sebcom_kb_save(const sebcom_kb* kb, const char* path) {
    return guarded([&] {
        need(kb, "kb");
        need(path, "path");
        write_bytes(path, encode_message(make_full(kb->kb)));
    });
}

void sebcom_kb_free(sebcom_kb* kb) { delete kb; }

uint32_t sebcom_kb_version(const sebcom_kb* kb) { return kb ? kb->kb.version : 0; }

size_t sebcom_kb_count(const sebcom_kb* kb, sebcom_granularity granularity) {
    if (!kb || (granularity != SEBCOM_COARSE && granularity != SEBCOM_FINE)) return 0;
    return kb->kb.count(static_cast<Granularity>(granularity));
}

sebcom_status sebcom_kb_hash(const sebcom_kb* kb, char out_hex[65]) {
    return guarded([&] {
        need(kb, "kb");
        need(out_hex, "out_hex");
        const std::string hex = hex_digest(kb_hash(kb->kb));
        std::memcpy(out_hex, hex.c_str(), 65);
    });
}

sebcom_status sebcom_kb_describe(const sebcom_kb* kb, char** out_json) {
    return guarded([&] {
        need(kb, "kb");
        need(out_json, "out_json");
        const KnowledgeBase& k = kb->kb;
        const PosetReport poset = check_poset_axioms(k);
        json j{{"version", k.version},
               {"coarse", {{"count", k.count(Granularity::Coarse)}, {"bits", k.bits_per_index(Granularity::Coarse)}}},
               {"fine", {{"count", k.count(Granularity::Fine)}, {"bits", k.bits_per_index(Granularity::Fine)}}},
               {"edges", k.relation.edges.size()},
               {"baseline_distortion", k.baseline_distortion},
               {"poset_valid", poset.valid},
               {"poset_violations", poset.violations},
               {"kb_hash", hex_digest(kb_hash(k))}};
        *out_json = dup_string(j.dump(2));
    });
}

sebcom_status sebcom_encode_file(const sebcom_kb* kb, const char* image_path, const char* importance,
                                 const sebcom_codec_config* config, const char* frame_path) {
    return guarded([&] {
        need(kb, "kb");
        need(image_path, "image_path");
        need(frame_path, "frame_path");
        const CodecConfig codec = codec_from(config);
        const ImageGray img = load_image(image_path);
        const Heatmap h = provider_from(importance).heatmap_for(img, image_path);
        write_bytes(frame_path, serialize_frame(encode(img, kb->kb, h, codec)));
    });
}

sebcom_status sebcom_decode_file(const sebcom_kb* kb, const char* frame_path, const char* image_path, int* crc_ok) {
    return guarded([&] {
        need(kb, "kb");
        need(frame_path, "frame_path");
        need(image_path, "image_path");
        const FrameParse parsed = deserialize_frame(read_file(frame_path));
        write_pgm(image_path, decode(parsed.frame, kb->kb));
        if (crc_ok) *crc_ok = parsed.crc_ok ? 1 : 0;
    });
}

sebcom_status sebcom_transmit_file(const sebcom_kb* kb, const char* frame_path, const sebcom_channel_config* channel,
                                   const char* image_out, const char* frame_out, const char* dump_out,
                                   char** out_json) {
    return guarded([&] {
        need(kb, "kb");
        need(frame_path, "frame_path");
        sebcom_channel_config cc;
        sebcom_channel_config_default(&cc);
        if (channel) cc = *channel;
        if (cc.uep < SEBCOM_UEP_IMPORTANCE || cc.uep > SEBCOM_UEP_NONE)
            fail(ErrorCode::InvalidArgument, "unknown UEP mode");
        if (std::isnan(cc.snr_db)) fail(ErrorCode::InvalidArgument, "SNR must not be NaN");

        SemanticFrame frame = load_frame(frame_path);
        if (frame.kb_version != kb->kb.version)
            fail(ErrorCode::KbMismatch, "frame was encoded against KB version " + std::to_string(frame.kb_version) +
                                            ", KB is version " + std::to_string(kb->kb.version));
        const auto mode = static_cast<UepMode>(cc.uep);
        if (mode == UepMode::Random) randomize_class_flags(frame, derive_seed(cc.seed, 1));
        const ImageGray local = decode(frame, kb->kb);
        const UepCodes codes = UepCodes::standard();
        const LinkResult link = transmit_frame(frame, kb->kb, codes, {cc.snr_db, cc.seed, cc.max_bp_iters}, mode);

        if (image_out) write_pgm(image_out, link.reconstruction);
        if (frame_out && !link.lost) write_bytes(frame_out, link.tx.reassembled);
        if (dump_out) write_bytes(dump_out, dump_transmission(link.tx));
        if (out_json) {
            json j{{"snr_db", number_or_inf(cc.snr_db)},
                   {"seed", cc.seed},
                   {"uep", uep_mode_name(mode)},
                   {"lost", link.lost},
                   {"crc_ok", link.crc_ok},
                   {"symbols", link.tx.symbol_count()},
                   {"cbr", compute_cbr(link.tx, frame.original_width, frame.original_height)},
                   {"class_a", class_json(link.tx.class_a)},
                   {"psnr_vs_local_decode", psnr(local, link.reconstruction)}};
            if (mode != UepMode::None) j["class_b"] = class_json(link.tx.class_b);
            *out_json = dup_string(j.dump(2));
        }
    });
}

sebcom_status sebcom_sync_write_full(const sebcom_kb* kb, const char* path) { return sebcom_kb_save(kb, path); }

sebcom_status sebcom_sync_write_request(const sebcom_kb* kb, float statistic, const char* path) {
    return guarded([&] {
        need(kb, "kb");
        need(path, "path");
        write_bytes(path, encode_message(make_request(kb->kb, statistic)));
    });
}

sebcom_status sebcom_sync_write_delta(sebcom_kb* kb, const char* const* image_paths, size_t n_images,
                                      const char* importance, const sebcom_update_config* config, const char* path) {
    return guarded([&] {
        need(kb, "kb");
        need(path, "path");
        const auto paths = paths_from(image_paths, n_images);
        sebcom_update_config uc;
        sebcom_update_config_default(&uc);
        if (config) uc = *config;
        const ImportanceProvider provider = provider_from(importance);

        std::vector<ImageGray> images;
        std::vector<Heatmap> heat;
        for (const auto& p : paths) {
            images.push_back(load_image(p));
            heat.push_back(provider.heatmap_for(images.back(), p));
        }
        std::vector<Seb> candidates;
        for (Granularity g : kGranularities) {
            const int side = g == Granularity::Coarse ? kCoarsePatch : kFinePatch;
            FeatureMatrix window(patch_area(g));
            std::vector<double> imp;
            for (std::size_t i = 0; i < images.size(); ++i) {
                window.append(extract_patches(images[i], side));
                const auto b = block_means(heat[i], side);
                imp.insert(imp.end(), b.begin(), b.end());
            }
            CandidateOptions opts;
            opts.k = g == Granularity::Coarse ? uc.candidates_coarse : uc.candidates_fine;
            opts.max_iters = uc.kmeans_max_iters;
            opts.tol = uc.kmeans_tol;
            opts.seed = derive_seed(uc.seed, static_cast<std::uint64_t>(g));
            auto c = generate_candidates(kb->kb, window, imp, g, opts);
            candidates.insert(candidates.end(), c.begin(), c.end());
        }
        const Bytes delta = encode_message(make_delta(kb->kb, candidates, plan_prune(kb->kb)));
        KnowledgeBase next = kb->kb;
        apply_message(next, decode_message(delta));
        write_bytes(path, delta);
        kb->kb = std::move(next);
    });
}

sebcom_status sebcom_sync_apply(sebcom_kb* kb, const char* path) {
    return guarded([&] {
        need(kb, "kb");
        need(path, "path");
        apply_message(kb->kb, decode_message(read_file(path)));
    });
}

sebcom_status sebcom_sync_describe(const char* path, char** out_json) {
    return guarded([&] {
        need(path, "path");
        need(out_json, "out_json");
        const Bytes bytes = read_file(path);
        const SyncMessage m = decode_message(bytes);
        json j{{"kind", message_kind_name(m.kind)}, {"kb_version_base", m.kb_version_base}, {"bytes", bytes.size()}};
        switch (m.kind) {
            case MessageKind::Request:
                j["statistic"] = m.statistic;
                break;
            case MessageKind::Delta: {
                std::vector<SebId> added;
                for (const auto& s : m.delta.added) added.push_back(s.id);
                j["added"] = added;
                j["removed"] = m.delta.removed;
                j["importance_updates"] = m.delta.importance_updates.size();
                break;
            }
            case MessageKind::Full: {
                const KnowledgeBase kb = kb_from_full(m);
                j["sebs"] = m.full.sebs.size();
                j["edges"] = m.full.edges.size();
                j["kb_hash"] = hex_digest(kb_hash(kb));
                break;
            }
        }
        *out_json = dup_string(j.dump(2));
    });
}

sebcom_status sebcom_run_scenario(const char* config_path, const sebcom_scenario_overrides* overrides,
                                  char** out_json) {
    return guarded([&] {
        need(config_path, "config_path");
        const Bytes text = read_file(config_path);
        ScenarioConfig cfg = scenario_config_from_json(std::string(text.begin(), text.end()));
        if (overrides) {
            if (overrides->has_seed) cfg.seed = cfg.codec.seed = overrides->seed;
            if (overrides->n_snrs > 0) {
                need(overrides->snrs, "snrs");
                cfg.snrs.assign(overrides->snrs, overrides->snrs + overrides->n_snrs);
            }
            if (overrides->importance) cfg.importance = overrides->importance;
            if (overrides->csv_path) cfg.csv_path = overrides->csv_path;
            if (overrides->json_path) cfg.json_path = overrides->json_path;
            if (overrides->pgm_dir) cfg.pgm_dir = overrides->pgm_dir;
        }
        const ScenarioReport report = run_scenario(cfg);
        if (out_json) *out_json = dup_string(report_json(report));
    });
}

sebcom_status sebcom_gen_corpus(const char* family, size_t count, int32_t size, uint64_t seed, const char* out_dir) {
    return guarded([&] {
        need(family, "family");
        need(out_dir, "out_dir");
        const TextureFamily f = parse_family(family);
        const auto images = generate_corpus(f, count, size, seed);
        std::filesystem::create_directories(out_dir);
        for (std::size_t i = 0; i < images.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof name, "%s_%04zu.pgm", family_name(f), i);
            write_pgm(std::filesystem::path(out_dir) / name, images[i]);
        }
    });
}

}  // extern "C"
