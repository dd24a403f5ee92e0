// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Scenario runner: sequential subsets of synthetic images pushed through the
// codec and the protected channel while the KB evolves and is synchronized
// between the transmitting access point and the receiving user equipment.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sebcom/corpus.hpp"
#include "sebcom/importance.hpp"
#include "sebcom/kb.hpp"
#include "sebcom/semcodec.hpp"
#include "sebcom/uep.hpp"

namespace sebcom {

/// How class flags are chosen before transmission.
enum class UepMode { Importance, Random, None };

UepMode parse_uep_mode(const std::string& name);
const char* uep_mode_name(UepMode m) noexcept;

/// Same number of class-A cells, positions drawn by a seeded shuffle.
void randomize_class_flags(SemanticFrame& frame, std::uint64_t seed);

struct LinkResult {
    ProtectedTransmission tx;
    ImageGray reconstruction;  // original size; constant 128 when lost
    bool lost = false;
    bool crc_ok = false;
};

/// Serialize, protect, send, and decode one frame against the receiver's KB.
/// UepMode::None sends the whole frame at rate 2/3.
LinkResult transmit_frame(const SemanticFrame& frame, const KnowledgeBase& rx_kb, const UepCodes& codes,
                          const ChannelConfig& channel, UepMode mode);

struct PhaseConfig {
    TextureFamily family = TextureFamily::Gradients;
    std::size_t n_subsets = 3;
    std::size_t images_per_subset = 10;
    int image_size = 256;
};

struct ScenarioConfig {
    std::vector<PhaseConfig> phases;
    /// 1-based subset indices after which the KB is updated.
    std::vector<std::size_t> update_points{4, 7};
    bool updates_enabled = true;
    CodecConfig codec;
    KbParams kb_params;
    std::size_t candidates_coarse = 64;
    std::size_t candidates_fine = 16;
    std::vector<double> snrs{kNoiselessSnr};
    UepMode uep = UepMode::Importance;
    int max_bp_iters = 50;
    std::size_t ldpc_n = 648;
    std::uint64_t ldpc_seed = 1;
    std::uint64_t seed = 0;
    std::string importance = "builtin";
    std::filesystem::path csv_path;
    std::filesystem::path json_path;
    std::filesystem::path pgm_dir;

    std::size_t total_subsets() const noexcept;
    void validate() const;
};

ScenarioConfig default_scenario_config();
/// Fields absent from the JSON keep their defaults. SNRs may be numbers or
/// the string "inf".
ScenarioConfig scenario_config_from_json(const std::string& text);

struct ScenarioEvent {
    std::size_t subset = 0;  // 1-based; 0 for the initial build
    std::string kind;        // full, request, update
    std::string detail;
};

struct SubsetRow {
    std::size_t subset = 0;
    std::size_t phase = 0;
    std::string family;
    double snr_db = 0;
    std::size_t images = 0;
    double psnr = 0;
    double ssim = 0;
    double weighted_mse = 0;
    double quant_distortion = 0;
    double local_psnr = 0;  // decode(encode(x)) without the channel
    double mutual_information = 0;
    double conditional_entropy = 0;
    double class_a_pre_ber = 0;
    double class_a_post_ber = 0;
    double class_b_pre_ber = 0;
    double class_b_post_ber = 0;
    double frame_loss_rate = 0;
    double cbr = 0;
    std::uint32_t kb_version = 0;
    std::string events;
};

struct ScenarioReport {
    std::vector<SubsetRow> rows;
    std::vector<ScenarioEvent> events;
    std::string final_kb_hash;
    std::size_t weighted_mse_flags = 0;  // frames scored with an all-zero heatmap
};

ScenarioReport run_scenario(const ScenarioConfig& config);

std::string report_csv(const ScenarioReport& report);
std::string report_json(const ScenarioReport& report);

/// The per-subset images of a scenario, index 0 being subset 1.
std::vector<ImageGray> scenario_subset_images(const ScenarioConfig& config, std::size_t subset_index);

}  // namespace sebcom
