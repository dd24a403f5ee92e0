// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sebcom/bytes.hpp"

namespace sebcom {

inline constexpr int kCoarsePatch = 32;
inline constexpr int kFinePatch = 16;

/// 8-bit grayscale image. Images produced by load_image/pad_to_cells are
/// padded to multiples of 32 and remember their pre-padding size; decoded
/// reconstructions are already cropped, so width == original_width there.
struct ImageGray {
    int width = 0;
    int height = 0;
    int original_width = 0;
    int original_height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    int grid_w() const noexcept { return width / kCoarsePatch; }
    int grid_h() const noexcept { return height / kCoarsePatch; }
    int cell_count() const noexcept { return grid_w() * grid_h(); }

    bool operator==(const ImageGray&) const = default;
};

/// Build an unpadded image (original size == size).
ImageGray make_image(int width, int height, std::vector<std::uint8_t> pixels);

/// Edge-replicate to the next multiple of 32 in each dimension.
ImageGray pad_to_cells(const ImageGray& img);

/// Drop the padding, returning an image of the original size.
ImageGray crop_to_original(const ImageGray& img);

/// Parse binary PGM (P5) or PPM (P6, BT.601 luma) with maxval 255 and pad.
ImageGray decode_pnm(std::span<const std::uint8_t> data);
ImageGray load_image(const std::filesystem::path& path);

/// Raw PNM data without padding; used by heatmap loading.
ImageGray decode_pnm_unpadded(std::span<const std::uint8_t> data);

Bytes encode_pgm(const ImageGray& img);
void write_pgm(const std::filesystem::path& path, const ImageGray& img);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data);

/// BT.601 luma with round-half-up, exact in integer arithmetic.
constexpr std::uint8_t luma601(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

}  // namespace sebcom
