// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Semantic encoder/decoder: images are cut into 32x32 cells, each cell is
// represented either by one coarse Seb or by four fine Sebs (one per 16x16
// quadrant), and the resulting index stream is packed into an SEBF frame.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "sebcom/bytes.hpp"
#include "sebcom/features.hpp"
#include "sebcom/image.hpp"
#include "sebcom/importance.hpp"
#include "sebcom/kb.hpp"

namespace sebcom {

struct CodecConfig {
    double p_fine = 0.20;
    double p_protect = 0.50;
    std::size_t k_coarse = 256;
    std::size_t k_fine = 64;
    int kmeans_max_iters = 100;
    double kmeans_tol = 1e-6;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SemanticFrame {
    std::uint32_t kb_version = 0;
    std::uint16_t original_width = 0;
    std::uint16_t original_height = 0;
    std::uint16_t grid_w = 0;
    std::uint16_t grid_h = 0;
    std::uint8_t bits_coarse = 0;
    std::uint8_t bits_fine = 0;
    std::vector<std::uint8_t> fine_flags;   // one per cell
    std::vector<std::uint8_t> class_flags;  // one per cell, 1 = class A
    /// Per cell: one coarse index, or four fine indices (TL, TR, BL, BR).
    std::vector<std::vector<std::uint32_t>> indices;

    std::size_t cell_count() const noexcept { return static_cast<std::size_t>(grid_w) * grid_h; }
    unsigned cell_index_bits(std::size_t cell) const noexcept {
        return fine_flags[cell] ? 4u * bits_fine : bits_coarse;
    }

    bool operator==(const SemanticFrame&) const = default;
};

inline constexpr std::size_t kFrameHeaderBytes = 19;

/// Non-overlapping size x size patches in row-major order, flattened
/// row-major and scaled by 1/255.
FeatureMatrix extract_patches(const ImageGray& img, int size);

/// Produces a heatmap for a padded corpus image; `index` is its corpus slot.
using HeatmapSource = std::function<Heatmap(const ImageGray& img, std::size_t index)>;

KnowledgeBase build_kb(std::span<const ImageGray> corpus, const CodecConfig& config, const HeatmapSource& importance,
                       const KbParams& params = {});

/// Round-half-up count of cells selected by fraction p of n.
std::size_t selected_cells(double p, std::size_t n) noexcept;

/// Cells ordered by importance descending, row-major index ascending on ties.
std::vector<std::size_t> rank_cells(std::span<const double> cell_importance);

SemanticFrame encode(const ImageGray& img, const KnowledgeBase& kb, const Heatmap& heatmap, const CodecConfig& config);

/// Throws Error(KbMismatch) when frame.kb_version != kb.version.
ImageGray decode(const SemanticFrame& frame, const KnowledgeBase& kb);

/// Used Seb id -> mean importance of the patches it represented.
std::map<SebId, double> frame_usage(const SemanticFrame& frame, const KnowledgeBase& kb, const Heatmap& heatmap);

Bytes serialize_frame(const SemanticFrame& frame);

struct FrameParse {
    SemanticFrame frame;
    bool crc_ok = true;  // false: CORRUPT, frame parsed but untrusted
};

/// Structural damage (magic, version, truncation) throws Error(Format).
FrameParse deserialize_frame(std::span<const std::uint8_t> bytes);

/// Byte offsets of the serialized sections.
struct FrameLayout {
    std::size_t bitmap_bytes = 0;
    std::size_t payload_bits = 0;
    std::size_t total_bytes = 0;
};
FrameLayout frame_layout(const SemanticFrame& frame);

/// Mean per-component squared error between each 32x32 cell and its nearest
/// coarse centroid, averaged over cells.
double quantization_distortion(const ImageGray& img, const KnowledgeBase& kb);

/// Joint counts of (4-bin mean intensity, assigned coarse position) over
/// all cells of the given images.
JointCounts feature_seb_joint(std::span<const ImageGray> images, const KnowledgeBase& kb);

}  // namespace sebcom
