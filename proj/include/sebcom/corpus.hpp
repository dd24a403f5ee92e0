// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Seeded synthetic image families standing in for real datasets.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sebcom/image.hpp"

namespace sebcom {

enum class TextureFamily { Gradients, Checker, Blobs, Gratings };

TextureFamily parse_family(std::string_view name);
const char* family_name(TextureFamily f) noexcept;

/// `n` square images of side `size` (a multiple of 32). Image i depends only
/// on (family, size, derive_seed(seed, i)).
std::vector<ImageGray> generate_corpus(TextureFamily family, std::size_t n, int size, std::uint64_t seed);
ImageGray generate_image(TextureFamily family, int size, std::uint64_t seed);

/// Black/white squares of side `period`, shifted by (phase_x, phase_y).
ImageGray checker_image(int size, int period, int phase_x, int phase_y);

}  // namespace sebcom
