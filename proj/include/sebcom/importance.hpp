// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-pixel and per-cell importance. Heatmaps either come from a file
// (e.g. exported class-activation maps) or from the built-in Sobel-energy
// saliency.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sebcom/image.hpp"

namespace sebcom {

struct Heatmap {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // row-major, each in [0,1]

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Load a P5 heatmap scaled by 1/255, nearest-neighbour resampled to
/// target_w x target_h when the sizes differ.
Heatmap load_heatmap(const std::filesystem::path& path, int target_w, int target_h);
Heatmap resample_nearest(const Heatmap& h, int target_w, int target_h);
/// Edge-replicate to padded_w x padded_h.
Heatmap pad_heatmap(const Heatmap& h, int padded_w, int padded_h);
Heatmap crop_heatmap(const Heatmap& h, int w, int h_);

/// |Sobel_x| + |Sobel_y|, 8x8 box mean (offsets -4..+3), min-max normalized.
/// Borders are edge-replicated; a flat response maps to all zeros.
Heatmap builtin_saliency(const ImageGray& img);

/// Mean heatmap value per non-overlapping block of `block` pixels, row-major.
std::vector<double> block_means(const Heatmap& h, int block);
inline std::vector<double> cell_importance(const Heatmap& h) { return block_means(h, kCoarsePatch); }

/// Importance source selected by "builtin" or "file:<path>".
struct ImportanceProvider {
    enum class Kind { Builtin, File } kind = Kind::Builtin;
    std::filesystem::path path;

    static ImportanceProvider parse(const std::string& spec);

    /// Heatmap matching the padded dimensions of `img`. When the file path is
    /// a directory the heatmap is looked up by `image_name`.
    Heatmap heatmap_for(const ImageGray& img, const std::string& image_name = {}) const;
};

}  // namespace sebcom
