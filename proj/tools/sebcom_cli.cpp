// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the library only through sebcom.h.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sebcom.h"

namespace fs = std::filesystem;

namespace {

class CliFailure {
  public:
    CliFailure(sebcom_status s, std::string msg) : status(s), message(std::move(msg)) {}
    sebcom_status status;
    std::string message;
};

void check(sebcom_status s) {
    if (s != SEBCOM_OK) throw CliFailure(s, sebcom_last_error());
}

int report_error(const char* code, const std::string& message, int exit_code) {
    nlohmann::json j{{"error", code}, {"message", message}};
    std::cerr << j.dump() << "\n";
    return exit_code;
}

class Kb {
  public:
    explicit Kb(const std::string& path) { check(sebcom_kb_load(path.c_str(), &kb_)); }
    explicit Kb(sebcom_kb* kb) : kb_(kb) {}
    Kb(const Kb&) = delete;
    Kb& operator=(const Kb&) = delete;
    ~Kb() { sebcom_kb_free(kb_); }
    sebcom_kb* get() const { return kb_; }

  private:
    sebcom_kb* kb_ = nullptr;
};

void print_owned(char* s) {
    if (!s) return;
    std::cout << s << "\n";
    sebcom_string_free(s);
}

/// Files named on the command line, with directories expanded to their
/// PGM/PPM files in name order.
std::vector<std::string> expand_images(const std::vector<std::string>& inputs) {
    std::vector<std::string> out;
    for (const auto& in : inputs) {
        std::error_code ec;
        if (fs::is_directory(in, ec)) {
            std::vector<std::string> found;
            for (const auto& e : fs::directory_iterator(in)) {
                const auto ext = e.path().extension().string();
                if (e.is_regular_file() && (ext == ".pgm" || ext == ".ppm")) found.push_back(e.path().string());
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.push_back(in);
        }
    }
    if (out.empty()) throw CliFailure(SEBCOM_E_INVALID_ARGUMENT, "no input images");
    return out;
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
    std::vector<const char*> out;
    for (const auto& s : v) out.push_back(s.c_str());
    return out;
}

double parse_snr(const std::string& s) {
    if (s == "inf" || s == "noiseless") return std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size() && !std::isnan(v)) return v;
    } catch (const std::exception&) {
    }
    throw CliFailure(SEBCOM_E_INVALID_ARGUMENT, "invalid SNR '" + s + "'");
}

sebcom_uep_mode parse_uep(const std::string& s) {
    if (s == "importance") return SEBCOM_UEP_IMPORTANCE;
    if (s == "random") return SEBCOM_UEP_RANDOM;
    if (s == "none") return SEBCOM_UEP_NONE;
    throw CliFailure(SEBCOM_E_INVALID_ARGUMENT, "unknown UEP mode '" + s + "'");
}

void add_codec_options(CLI::App* app, sebcom_codec_config& c) {
    app->add_option("--p-fine", c.p_fine, "Fraction of cells coded at fine granularity");
    app->add_option("--p-protect", c.p_protect, "Fraction of cells sent in the protected class");
    app->add_option("--k-coarse", c.k_coarse, "Coarse codebook size (power of two)");
    app->add_option("--k-fine", c.k_fine, "Fine codebook size (power of two)");
    app->add_option("--kmeans-iters", c.kmeans_max_iters, "k-means iteration cap");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semantic-base image communication toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sebcom_version()));

    std::string importance = "builtin";
    std::uint64_t seed = 0;
    std::string snr_text = "inf";
    sebcom_codec_config codec;
    sebcom_codec_config_default(&codec);

    // train-kb
    auto* train = app.add_subcommand("train-kb", "Train a knowledge base from images");
    std::vector<std::string> train_inputs;
    std::string train_out;
    train->add_option("images", train_inputs, "Images or directories of PGM/PPM files")->required();
    train->add_option("-o,--out", train_out, "Output KB file")->required();
    train->add_option("--seed", seed, "Training seed");
    train->add_option("--importance", importance, "builtin or file:<path>");
    add_codec_options(train, codec);

    // encode
    auto* enc = app.add_subcommand("encode", "Encode an image into a semantic frame");
    std::string kb_path, in_path, out_path;
    enc->add_option("--kb", kb_path, "KB file")->required();
    enc->add_option("-i,--in", in_path, "Input PGM/PPM")->required();
    enc->add_option("-o,--out", out_path, "Output frame")->required();
    enc->add_option("--importance", importance, "builtin or file:<path>");
    enc->add_option("--p-fine", codec.p_fine, "Fraction of cells coded at fine granularity");
    enc->add_option("--p-protect", codec.p_protect, "Fraction of cells sent in the protected class");

    // decode
    auto* dec = app.add_subcommand("decode", "Decode a semantic frame into a PGM");
    dec->add_option("--kb", kb_path, "KB file")->required();
    dec->add_option("-i,--in", in_path, "Input frame")->required();
    dec->add_option("-o,--out", out_path, "Output PGM")->required();

    // transmit
    auto* tx = app.add_subcommand("transmit", "Send a frame over the protected AWGN link");
    std::string uep_text = "importance", frame_out, dump_out;
    int bp_iters = 50;
    tx->add_option("--kb", kb_path, "KB file")->required();
    tx->add_option("-i,--in", in_path, "Input frame")->required();
    tx->add_option("-o,--out", out_path, "Reconstructed PGM");
    tx->add_option("--frame-out", frame_out, "Received frame bytes");
    tx->add_option("--dump", dump_out, "Diagnostic transmission dump");
    tx->add_option("--snr", snr_text, "Es/N0 in dB, or inf");
    tx->add_option("--seed", seed, "Channel seed");
    tx->add_option("--uep", uep_text, "importance, random or none");
    tx->add_option("--bp-iters", bp_iters, "Decoder iteration cap");

    // sync
    auto* sync = app.add_subcommand("sync", "KB synchronization messages");
    sync->require_subcommand(1);
    std::string msg_path, kb_out;
    auto* s_full = sync->add_subcommand("full", "Write a FULL message for a KB");
    s_full->add_option("--kb", kb_path, "KB file")->required();
    s_full->add_option("-o,--out", msg_path, "Message file")->required();
    auto* s_req = sync->add_subcommand("request", "Write an update REQUEST");
    float statistic = 0;
    s_req->add_option("--kb", kb_path, "KB file")->required();
    s_req->add_option("--statistic", statistic, "Trigger statistic")->required();
    s_req->add_option("-o,--out", msg_path, "Message file")->required();
    auto* s_upd = sync->add_subcommand("update", "Generate candidates from images and write a DELTA");
    std::vector<std::string> upd_inputs;
    sebcom_update_config update;
    sebcom_update_config_default(&update);
    s_upd->add_option("images", upd_inputs, "Recent images or directories")->required();
    s_upd->add_option("--kb", kb_path, "KB file")->required();
    s_upd->add_option("-o,--out", msg_path, "DELTA message file")->required();
    s_upd->add_option("--kb-out", kb_out, "Updated KB file")->required();
    s_upd->add_option("--seed", seed, "Candidate seed");
    s_upd->add_option("--importance", importance, "builtin or file:<path>");
    s_upd->add_option("--candidates-coarse", update.candidates_coarse, "Coarse candidate count");
    s_upd->add_option("--candidates-fine", update.candidates_fine, "Fine candidate count");
    auto* s_apply = sync->add_subcommand("apply", "Apply a message to a KB");
    s_apply->add_option("--kb", kb_path, "KB file")->required();
    s_apply->add_option("-m,--msg", msg_path, "Message file")->required();
    s_apply->add_option("--kb-out", kb_out, "Resulting KB file")->required();
    auto* s_desc = sync->add_subcommand("describe", "Summarize a message");
    s_desc->add_option("-m,--msg", msg_path, "Message file")->required();
    auto* s_info = sync->add_subcommand("info", "Summarize a KB");
    s_info->add_option("--kb", kb_path, "KB file")->required();

    // run-scenario
    auto* scen = app.add_subcommand("run-scenario", "Run a scenario config");
    std::string config_path, csv_out, json_out, pgm_dir;
    std::vector<std::string> snr_list;
    bool quiet = false;
    scen->add_option("-c,--config", config_path, "Scenario JSON")->required();
    auto* scen_seed = scen->add_option("--seed", seed, "Override the scenario seed");
    scen->add_option("--snr", snr_list, "Override the SNR list (repeatable)");
    auto* scen_imp = scen->add_option("--importance", importance, "Override the importance source");
    scen->add_option("--csv", csv_out, "CSV report path");
    scen->add_option("--json", json_out, "JSON report path");
    scen->add_option("--pgm-dir", pgm_dir, "Directory for reconstructed PGMs");
    scen->add_flag("-q,--quiet", quiet, "Do not print the report");

    // gen-corpus
    auto* gen = app.add_subcommand("gen-corpus", "Generate a synthetic image corpus");
    std::string family, out_dir;
    std::size_t count = 10;
    int size = 256;
    gen->add_option("--family", family, "gradients, checker, blobs or gratings")->required();
    gen->add_option("-n,--count", count, "Number of images");
    gen->add_option("--size", size, "Image side (multiple of 32)");
    gen->add_option("--seed", seed, "Corpus seed");
    gen->add_option("-o,--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("INVALID_ARGUMENT", e.what(), SEBCOM_E_INVALID_ARGUMENT);
    }

    try {
        if (*train) {
            codec.seed = seed;
            const auto paths = expand_images(train_inputs);
            const auto cs = c_strings(paths);
            sebcom_kb* raw = nullptr;
            check(sebcom_kb_train(cs.data(), cs.size(), &codec, importance.c_str(), &raw));
            Kb kb(raw);
            check(sebcom_kb_save(kb.get(), train_out.c_str()));
            char* info = nullptr;
            check(sebcom_kb_describe(kb.get(), &info));
            print_owned(info);
        } else if (*enc) {
            Kb kb(kb_path);
            check(sebcom_encode_file(kb.get(), in_path.c_str(), importance.c_str(), &codec, out_path.c_str()));
        } else if (*dec) {
            Kb kb(kb_path);
            int crc_ok = 0;
            check(sebcom_decode_file(kb.get(), in_path.c_str(), out_path.c_str(), &crc_ok));
            if (!crc_ok) std::cerr << nlohmann::json{{"warning", "CORRUPT"}, {"message", "frame CRC mismatch"}}.dump() << "\n";
        } else if (*tx) {
            Kb kb(kb_path);
            sebcom_channel_config ch;
            sebcom_channel_config_default(&ch);
            ch.snr_db = parse_snr(snr_text);
            ch.seed = seed;
            ch.max_bp_iters = bp_iters;
            ch.uep = parse_uep(uep_text);
            char* summary = nullptr;
            check(sebcom_transmit_file(kb.get(), in_path.c_str(), &ch, out_path.empty() ? nullptr : out_path.c_str(),
                                       frame_out.empty() ? nullptr : frame_out.c_str(),
                                       dump_out.empty() ? nullptr : dump_out.c_str(), &summary));
            print_owned(summary);
        } else if (*sync) {
            if (*s_full) {
                Kb kb(kb_path);
                check(sebcom_sync_write_full(kb.get(), msg_path.c_str()));
            } else if (*s_req) {
                Kb kb(kb_path);
                check(sebcom_sync_write_request(kb.get(), statistic, msg_path.c_str()));
            } else if (*s_upd) {
                Kb kb(kb_path);
                update.seed = seed;
                const auto paths = expand_images(upd_inputs);
                const auto cs = c_strings(paths);
                check(sebcom_sync_write_delta(kb.get(), cs.data(), cs.size(), importance.c_str(), &update,
                                              msg_path.c_str()));
                check(sebcom_kb_save(kb.get(), kb_out.c_str()));
            } else if (*s_apply) {
                Kb kb(kb_path);
                check(sebcom_sync_apply(kb.get(), msg_path.c_str()));
                check(sebcom_kb_save(kb.get(), kb_out.c_str()));
            } else if (*s_desc) {
                char* out = nullptr;
                check(sebcom_sync_describe(msg_path.c_str(), &out));
                print_owned(out);
            } else if (*s_info) {
                Kb kb(kb_path);
                char* out = nullptr;
                check(sebcom_kb_describe(kb.get(), &out));
                print_owned(out);
            }
        } else if (*scen) {
            std::vector<double> snrs;
            for (const auto& s : snr_list) snrs.push_back(parse_snr(s));
            sebcom_scenario_overrides ov{};
            ov.has_seed = scen_seed->count() > 0;
            ov.seed = seed;
            ov.snrs = snrs.data();
            ov.n_snrs = snrs.size();
            ov.importance = scen_imp->count() > 0 ? importance.c_str() : nullptr;
            ov.csv_path = csv_out.empty() ? nullptr : csv_out.c_str();
            ov.json_path = json_out.empty() ? nullptr : json_out.c_str();
            ov.pgm_dir = pgm_dir.empty() ? nullptr : pgm_dir.c_str();
            char* report = nullptr;
            check(sebcom_run_scenario(config_path.c_str(), &ov, quiet ? nullptr : &report));
            print_owned(report);
        } else if (*gen) {
            check(sebcom_gen_corpus(family.c_str(), count, size, seed, out_dir.c_str()));
        }
    } catch (const CliFailure& f) {
        return report_error(sebcom_status_name(f.status), f.message, static_cast<int>(f.status));
    }
    return 0;
}
