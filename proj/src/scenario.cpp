// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "sebcom/error.hpp"
#include "sebcom/metrics.hpp"
#include "sebcom/rng.hpp"
#include "sebcom/syncproto.hpp"

namespace sebcom {

using nlohmann::json;

namespace {

// Sub-stream tags under the scenario seed.
constexpr std::uint64_t kImageStream = 0x1000;
constexpr std::uint64_t kChannelStream = 0x2000;
constexpr std::uint64_t kCandidateStream = 0x3000;
constexpr std::uint64_t kShuffleStream = 0x4000;

ImageGray gray_fill(int w, int h, std::uint8_t v) {
    return make_image(w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, v));
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

json snr_to_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

double snr_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kNoiselessSnr;
        fail(ErrorCode::InvalidArgument, "SNR string must be \"inf\"");
    }
    if (!j.is_number()) fail(ErrorCode::InvalidArgument, "SNR must be a number or \"inf\"");
    return j.get<double>();
}

std::string image_name(std::size_t subset, std::size_t image) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "s%02zu_i%03zu.pgm", subset, image);
    return buf;
}

struct Accum {
    double psnr = 0, ssim = 0, wmse = 0;
    std::size_t a_bits = 0, a_pre = 0, a_post = 0;
    std::size_t b_bits = 0, b_pre = 0, b_post = 0;
    std::size_t a_coded = 0, b_coded = 0;
    std::size_t lost = 0;
    double cbr = 0;
};

std::size_t count_diff(const Bits& x, const Bits& y) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) n += x[i] != y[i];
    return n;
}

void add_class(const ClassOutcome& o, std::size_t& bits, std::size_t& coded, std::size_t& pre, std::size_t& post) {
    bits += o.sent.size();
    coded += o.codewords.size();
    pre += static_cast<std::size_t>(std::llround(o.pre_decode_ber * static_cast<double>(o.codewords.size())));
    post += count_diff(o.sent, o.received);
}

double ratio(std::size_t num, std::size_t den) { return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }

}  // namespace

UepMode parse_uep_mode(const std::string& name) {
    if (name == "importance") return UepMode::Importance;
    if (name == "random") return UepMode::Random;
    if (name == "none") return UepMode::None;
    fail(ErrorCode::InvalidArgument, "unknown UEP mode '" + name + "'");
}

const char* uep_mode_name(UepMode m) noexcept {
    switch (m) {
        case UepMode::Importance: return "importance";
        case UepMode::Random: return "random";
        case UepMode::None: return "none";
    }
    return "unknown";
}

void randomize_class_flags(SemanticFrame& frame, std::uint64_t seed) {
    const std::size_t n = frame.class_flags.size();
    const auto protected_cells =
        static_cast<std::size_t>(std::count(frame.class_flags.begin(), frame.class_flags.end(), 1));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Xoshiro256ss rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::fill(frame.class_flags.begin(), frame.class_flags.end(), 0);
    for (std::size_t i = 0; i < protected_cells; ++i) frame.class_flags[order[i]] = 1;
}

LinkResult transmit_frame(const SemanticFrame& frame, const KnowledgeBase& rx_kb, const UepCodes& codes,
                          const ChannelConfig& channel, UepMode mode) {
    const Bytes bytes = serialize_frame(frame);
    LinkResult r;
    r.tx = mode == UepMode::None ? single_rate_transmit(bytes, codes.class_b, channel)
                                 : uep_transmit(bytes, frame, codes, channel);
    r.lost = r.tx.lost;
    if (!r.lost) {
        try {
            const FrameParse parsed = deserialize_frame(r.tx.reassembled);
            r.crc_ok = parsed.crc_ok;
            r.reconstruction = decode(parsed.frame, rx_kb);
        } catch (const Error&) {
            r.lost = true;
        }
    }
    if (r.lost) r.reconstruction = gray_fill(frame.original_width, frame.original_height, 128);
    return r;
}

std::size_t ScenarioConfig::total_subsets() const noexcept {
    std::size_t n = 0;
    for (const auto& p : phases) n += p.n_subsets;
    return n;
}

void ScenarioConfig::validate() const {
    require(!phases.empty(), "scenario needs at least one phase");
    for (const auto& p : phases) {
        require(p.n_subsets >= 1 && p.images_per_subset >= 1, "phase needs at least one subset and one image");
        require(p.image_size > 0 && p.image_size % kCoarsePatch == 0, "image_size must be a positive multiple of 32");
        require(p.image_size <= 0xFFFF, "image_size too large");
    }
    require(std::is_sorted(update_points.begin(), update_points.end()), "update_points must be sorted");
    require(std::adjacent_find(update_points.begin(), update_points.end()) == update_points.end(),
            "update_points must be distinct");
    for (auto u : update_points) require(u >= 1 && u <= total_subsets(), "update point out of range");
    require(!snrs.empty(), "scenario needs at least one SNR");
    for (double s : snrs) require(!std::isnan(s), "SNR must not be NaN");
    require(candidates_coarse >= 1 && candidates_fine >= 1, "candidate counts must be positive");
    require(max_bp_iters >= 1, "max_bp_iters must be >= 1");
    codec.validate();
    kb_params.validate();
    ImportanceProvider::parse(importance);
}

ScenarioConfig default_scenario_config() {
    ScenarioConfig c;
    c.phases = {{TextureFamily::Gradients, 3, 10, 256},
                {TextureFamily::Checker, 3, 10, 256},
                {TextureFamily::Gratings, 3, 10, 256}};
    return c;
}

ScenarioConfig scenario_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::Format, std::string("scenario config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorCode::Format, "scenario config must be a JSON object");
    ScenarioConfig c = default_scenario_config();
    try {
        if (j.contains("phases")) {
            c.phases.clear();
            for (const auto& p : j.at("phases")) {
                PhaseConfig pc;
                pc.family = parse_family(p.at("texture_family").get<std::string>());
                pc.n_subsets = p.value("n_subsets", pc.n_subsets);
                pc.images_per_subset = p.value("images_per_subset", pc.images_per_subset);
                pc.image_size = p.value("image_size", pc.image_size);
                c.phases.push_back(pc);
            }
        }
        c.update_points = j.value("update_points", c.update_points);
        c.updates_enabled = j.value("updates_enabled", c.updates_enabled);
        if (j.contains("codec")) {
            const auto& k = j.at("codec");
            c.codec.p_fine = k.value("p_fine", c.codec.p_fine);
            c.codec.p_protect = k.value("p_protect", c.codec.p_protect);
            c.codec.k_coarse = k.value("k_coarse", c.codec.k_coarse);
            c.codec.k_fine = k.value("k_fine", c.codec.k_fine);
            c.codec.kmeans_max_iters = k.value("kmeans_max_iters", c.codec.kmeans_max_iters);
            c.codec.kmeans_tol = k.value("kmeans_tol", c.codec.kmeans_tol);
        }
        if (j.contains("kb")) {
            const auto& k = j.at("kb");
            c.kb_params.decay_lambda = k.value("decay_lambda", c.kb_params.decay_lambda);
            c.kb_params.prune_threshold = k.value("prune_threshold", c.kb_params.prune_threshold);
            c.kb_params.admission_factor = k.value("admission_factor", c.kb_params.admission_factor);
            c.kb_params.trigger_factor = k.value("trigger_factor", c.kb_params.trigger_factor);
            c.kb_params.trigger_window = k.value("trigger_window", c.kb_params.trigger_window);
            c.candidates_coarse = k.value("candidates_coarse", c.candidates_coarse);
            c.candidates_fine = k.value("candidates_fine", c.candidates_fine);
        }
        if (j.contains("channel")) {
            const auto& ch = j.at("channel");
            if (ch.contains("snrs")) {
                c.snrs.clear();
                for (const auto& s : ch.at("snrs")) c.snrs.push_back(snr_from_json(s));
            }
            if (ch.contains("uep")) c.uep = parse_uep_mode(ch.at("uep").get<std::string>());
            c.max_bp_iters = ch.value("max_bp_iters", c.max_bp_iters);
            c.ldpc_n = ch.value("ldpc_n", c.ldpc_n);
            c.ldpc_seed = ch.value("ldpc_seed", c.ldpc_seed);
        }
        c.seed = j.value("seed", c.seed);
        c.importance = j.value("importance", c.importance);
        if (j.contains("outputs")) {
            const auto& o = j.at("outputs");
            c.csv_path = o.value("csv", std::string());
            c.json_path = o.value("json", std::string());
            c.pgm_dir = o.value("pgm_dir", std::string());
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidArgument, std::string("bad scenario config field: ") + e.what());
    }
    c.codec.seed = c.seed;
    c.validate();
    return c;
}

std::vector<ImageGray> scenario_subset_images(const ScenarioConfig& config, std::size_t subset_index) {
    std::size_t first = 0;
    for (const auto& p : config.phases) {
        if (subset_index < first + p.n_subsets)
            return generate_corpus(p.family, p.images_per_subset, p.image_size,
                                   derive_seed(config.seed ^ kImageStream, subset_index));
        first += p.n_subsets;
    }
    fail(ErrorCode::InvalidArgument, "subset index out of range");
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
    config.validate();
    const ImportanceProvider provider = ImportanceProvider::parse(config.importance);
    const UepCodes codes = UepCodes::standard(config.ldpc_n, config.ldpc_seed);
    CodecConfig codec = config.codec;
    codec.seed = config.seed;

    ScenarioReport report;
    std::vector<std::pair<std::size_t, std::size_t>> subsets;  // (phase, global index)
    for (std::size_t p = 0; p < config.phases.size(); ++p)
        for (std::size_t s = 0; s < config.phases[p].n_subsets; ++s) subsets.emplace_back(p, subsets.size());

    auto heatmaps_for = [&](const std::vector<ImageGray>& padded, std::size_t subset) {
        std::vector<Heatmap> hs;
        for (std::size_t i = 0; i < padded.size(); ++i)
            hs.push_back(provider.heatmap_for(padded[i], image_name(subset + 1, i)));
        return hs;
    };
    auto pad_all = [](const std::vector<ImageGray>& imgs) {
        std::vector<ImageGray> out;
        for (const auto& im : imgs) out.push_back(pad_to_cells(im));
        return out;
    };

    // The access point trains on subset 1 and ships the KB to the UE in full.
    std::vector<ImageGray> current = pad_all(scenario_subset_images(config, 0));
    std::vector<Heatmap> current_heat = heatmaps_for(current, 0);
    KnowledgeBase ap = canonicalize(
        build_kb(current, codec, [&](const ImageGray&, std::size_t i) { return current_heat[i]; }, config.kb_params));
    KnowledgeBase ue;
    apply_message(ue, decode_message(encode_message(make_full(ap))));
    if (kb_hash(ap) != kb_hash(ue)) fail(ErrorCode::Internal, "replicas diverged after FULL sync");
    report.events.push_back({0, "full", "v" + std::to_string(ap.version)});
    TriggerState trigger(ap);

    if (!config.pgm_dir.empty()) std::filesystem::create_directories(config.pgm_dir);

    for (const auto& [phase, s] : subsets) {
        if (s > 0) {
            current = pad_all(scenario_subset_images(config, s));
            current_heat = heatmaps_for(current, s);
        }
        std::vector<std::string> subset_events;

        // Transmitter side: encode with the current KB and age it.
        std::vector<SemanticFrame> frames;
        double qd_sum = 0, local_psnr_sum = 0;
        const InformationTerms info = empirical_mutual_information(feature_seb_joint(current, ap));
        for (std::size_t i = 0; i < current.size(); ++i) {
            SemanticFrame f = encode(current[i], ap, current_heat[i], codec);
            if (config.uep == UepMode::Random)
                randomize_class_flags(f, derive_seed(derive_seed(config.seed ^ kShuffleStream, s), i));
            const double qd = quantization_distortion(current[i], ap);
            qd_sum += qd;
            local_psnr_sum += psnr(crop_to_original(current[i]), decode(f, ap));
            decay_and_refresh(ap, frame_usage(f, ap, current_heat[i]));
            if (trigger.should_request_update(qd)) {
                const Bytes req = encode_message(make_request(ap, static_cast<float>(trigger.window_mean())));
                const std::string detail = "image " + std::to_string(i + 1) + " mean " +
                                           format_double(trigger.window_mean()) + " (" + std::to_string(req.size()) +
                                           " bytes)";
                report.events.push_back({s + 1, "request", detail});
                subset_events.push_back("request@" + std::to_string(i + 1));
            }
            frames.push_back(std::move(f));
        }
        const double qd_mean = qd_sum / static_cast<double>(current.size());

        for (std::size_t k = 0; k < config.snrs.size(); ++k) {
            Accum acc;
            for (std::size_t i = 0; i < frames.size(); ++i) {
                ChannelConfig ch{config.snrs[k], derive_seed(derive_seed(config.seed ^ kChannelStream, s), i),
                                 config.max_bp_iters};
                const LinkResult link = transmit_frame(frames[i], ue, codes, ch, config.uep);
                const ImageGray original = crop_to_original(current[i]);
                const Heatmap h = crop_heatmap(current_heat[i], original.width, original.height);
                acc.psnr += psnr(original, link.reconstruction);
                acc.ssim += ssim(original, link.reconstruction);
                const WeightedMse w = weighted_mse(original, link.reconstruction, h);
                acc.wmse += w.value;
                report.weighted_mse_flags += w.flagged;
                add_class(link.tx.class_a, acc.a_bits, acc.a_coded, acc.a_pre, acc.a_post);
                add_class(link.tx.class_b, acc.b_bits, acc.b_coded, acc.b_pre, acc.b_post);
                acc.lost += link.lost;
                acc.cbr += compute_cbr(link.tx, original.width, original.height);
                if (!config.pgm_dir.empty()) {
                    char name[64];
                    std::snprintf(name, sizeof name, "s%02zu_snr%zu_i%03zu.pgm", s + 1, k, i);
                    write_pgm(config.pgm_dir / name, link.reconstruction);
                }
            }
            const double n = static_cast<double>(frames.size());
            SubsetRow row;
            row.subset = s + 1;
            row.phase = phase + 1;
            row.family = family_name(config.phases[phase].family);
            row.snr_db = config.snrs[k];
            row.images = frames.size();
            row.psnr = acc.psnr / n;
            row.ssim = acc.ssim / n;
            row.weighted_mse = acc.wmse / n;
            row.quant_distortion = qd_mean;
            row.local_psnr = local_psnr_sum / n;
            row.mutual_information = info.mutual_information;
            row.conditional_entropy = info.conditional_entropy;
            row.class_a_pre_ber = ratio(acc.a_pre, acc.a_coded);
            row.class_a_post_ber = ratio(acc.a_post, acc.a_bits);
            row.class_b_pre_ber = ratio(acc.b_pre, acc.b_coded);
            row.class_b_post_ber = ratio(acc.b_post, acc.b_bits);
            row.frame_loss_rate = static_cast<double>(acc.lost) / n;
            row.cbr = acc.cbr / n;
            row.kb_version = ue.version;
            report.rows.push_back(std::move(row));
        }

        const bool update_here =
            config.updates_enabled &&
            std::binary_search(config.update_points.begin(), config.update_points.end(), s + 1);
        if (update_here) {
            std::vector<Seb> candidates;
            for (Granularity g : kGranularities) {
                const int side = g == Granularity::Coarse ? kCoarsePatch : kFinePatch;
                FeatureMatrix window(patch_area(g));
                std::vector<double> imp;
                for (std::size_t i = 0; i < current.size(); ++i) {
                    window.append(extract_patches(current[i], side));
                    const auto b = block_means(current_heat[i], side);
                    imp.insert(imp.end(), b.begin(), b.end());
                }
                CandidateOptions opts;
                opts.k = g == Granularity::Coarse ? config.candidates_coarse : config.candidates_fine;
                opts.max_iters = codec.kmeans_max_iters;
                opts.tol = codec.kmeans_tol;
                opts.seed = derive_seed(derive_seed(config.seed ^ kCandidateStream, s), static_cast<std::uint64_t>(g));
                auto c = generate_candidates(ap, window, imp, g, opts);
                candidates.insert(candidates.end(), std::make_move_iterator(c.begin()),
                                  std::make_move_iterator(c.end()));
            }
            const std::vector<SebId> removals = plan_prune(ap);
            const Bytes delta = encode_message(make_delta(ap, candidates, removals));
            const SyncMessage received = decode_message(delta);
            apply_message(ap, received);
            apply_message(ue, received);
            if (kb_hash(ap) != kb_hash(ue)) fail(ErrorCode::Internal, "replicas diverged after DELTA sync");

            double rebase = 0;
            for (const auto& img : current) rebase += quantization_distortion(img, ap);
            trigger.rebaseline(rebase / static_cast<double>(current.size()));
            const std::string detail = "v" + std::to_string(ap.version) + " +" + std::to_string(candidates.size()) +
                                       " -" + std::to_string(removals.size()) + " (" + std::to_string(delta.size()) +
                                       " bytes)";
            report.events.push_back({s + 1, "update", detail});
            subset_events.push_back("update v" + std::to_string(ap.version));
        }

        std::string joined;
        for (const auto& e : subset_events) joined += (joined.empty() ? "" : ";") + e;
        for (auto it = report.rows.end() - static_cast<std::ptrdiff_t>(config.snrs.size()); it != report.rows.end(); ++it)
            it->events = joined;
    }

    report.final_kb_hash = hex_digest(kb_hash(ue));
    if (!config.csv_path.empty()) {
        const std::string csv = report_csv(report);
        write_file(config.csv_path, std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
    }
    if (!config.json_path.empty()) {
        const std::string js = report_json(report);
        write_file(config.json_path, std::span(reinterpret_cast<const std::uint8_t*>(js.data()), js.size()));
    }
    return report;
}

std::string report_csv(const ScenarioReport& report) {
    std::string out =
        "subset,phase,family,snr_db,images,psnr,ssim,weighted_mse,quant_distortion,local_psnr,mutual_information,conditional_entropy,"
        "class_a_pre_ber,class_a_post_ber,class_b_pre_ber,class_b_post_ber,frame_loss_rate,cbr,kb_version,events\n";
    for (const auto& r : report.rows) {
        out += std::to_string(r.subset) + "," + std::to_string(r.phase) + "," + r.family + "," +
               format_double(r.snr_db) + "," + std::to_string(r.images) + "," + format_double(r.psnr) + "," +
               format_double(r.ssim) + "," + format_double(r.weighted_mse) + "," + format_double(r.quant_distortion) +
               "," + format_double(r.local_psnr) + "," + format_double(r.mutual_information) + "," +
               format_double(r.conditional_entropy) + "," + format_double(r.class_a_pre_ber) + "," +
               format_double(r.class_a_post_ber) + "," + format_double(r.class_b_pre_ber) + "," +
               format_double(r.class_b_post_ber) + "," + format_double(r.frame_loss_rate) + "," +
               format_double(r.cbr) + "," + std::to_string(r.kb_version) + "," + r.events + "\n";
    }
    return out;
}

std::string report_json(const ScenarioReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"subset", r.subset},
                        {"phase", r.phase},
                        {"family", r.family},
                        {"snr_db", snr_to_json(r.snr_db)},
                        {"images", r.images},
                        {"psnr", r.psnr},
                        {"ssim", r.ssim},
                        {"weighted_mse", r.weighted_mse},
                        {"quant_distortion", r.quant_distortion},
                        {"local_psnr", r.local_psnr},
                        {"mutual_information", r.mutual_information},
                        {"conditional_entropy", r.conditional_entropy},
                        {"class_a_pre_ber", r.class_a_pre_ber},
                        {"class_a_post_ber", r.class_a_post_ber},
                        {"class_b_pre_ber", r.class_b_pre_ber},
                        {"class_b_post_ber", r.class_b_post_ber},
                        {"frame_loss_rate", r.frame_loss_rate},
                        {"cbr", r.cbr},
                        {"kb_version", r.kb_version},
                        {"events", r.events}});
    }
    json events = json::array();
    for (const auto& e : report.events) events.push_back({{"subset", e.subset}, {"kind", e.kind}, {"detail", e.detail}});
    json j{{"rows", rows},
           {"events", events},
           {"final_kb_hash", report.final_kb_hash},
           {"weighted_mse_flags", report.weighted_mse_flags}};
    return j.dump(2) + "\n";
}

}  // namespace sebcom
