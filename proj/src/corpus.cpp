// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sebcom/error.hpp"
#include "sebcom/rng.hpp"

namespace sebcom {

namespace {

std::uint8_t to_pixel(double v) { return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0)); }

ImageGray gradients(int size, Xoshiro256ss& rng) {
    const double slope = rng.uniform(0.5, 3.0);
    const double angle = rng.uniform(0.0, 2 * std::numbers::pi);
    const double offset = rng.uniform(0.0, 256.0);
    const double dx = slope * std::cos(angle), dy = slope * std::sin(angle);
    std::vector<std::uint8_t> px(static_cast<std::size_t>(size) * size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const double v = std::floor(offset + dx * x + dy * y);
            px[static_cast<std::size_t>(y) * size + x] = static_cast<std::uint8_t>(((static_cast<long long>(v) % 256) + 256) % 256);
        }
    return make_image(size, size, std::move(px));
}

ImageGray checker(int size, Xoshiro256ss& rng) {
    const int period = 8 + static_cast<int>(rng.below(57));
    const int px = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * period)));
    const int py = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * period)));
    return checker_image(size, period, px, py);
}

ImageGray blobs(int size, Xoshiro256ss& rng) {
    const int count = 3 + static_cast<int>(rng.below(6));
    std::vector<double> acc(static_cast<std::size_t>(size) * size, 40.0);
    for (int b = 0; b < count; ++b) {
        const double cx = rng.uniform(0.0, size), cy = rng.uniform(0.0, size);
        const double sigma = rng.uniform(size / 32.0, size / 8.0);
        const double amp = rng.uniform(80.0, 200.0);
        const double inv = 1.0 / (2 * sigma * sigma);
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                acc[static_cast<std::size_t>(y) * size + x] += amp * std::exp(-d2 * inv);
            }
    }
    std::vector<std::uint8_t> px(acc.size());
    std::transform(acc.begin(), acc.end(), px.begin(), to_pixel);
    return make_image(size, size, std::move(px));
}

// Periods divide the coarse cell and wave vectors are integer, so every cell
// of an image carries the same patch and the family is a small planted set.
ImageGray gratings(int size, Xoshiro256ss& rng) {
    static constexpr int kPeriods[] = {8, 16, 32};
    static constexpr int kWave[][2] = {{1, 0}, {1, 1}, {0, 1}, {1, -1}};
    const int period = kPeriods[rng.below(3)];
    const auto& wave = kWave[rng.below(4)];
    const double k = 2 * std::numbers::pi / period;
    std::vector<std::uint8_t> px(static_cast<std::size_t>(size) * size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            px[static_cast<std::size_t>(y) * size + x] = to_pixel(127.5 + 127.5 * std::sin(k * (wave[0] * x + wave[1] * y)));
    return make_image(size, size, std::move(px));
}

}  // namespace

TextureFamily parse_family(std::string_view name) {
    if (name == "gradients") return TextureFamily::Gradients;
    if (name == "checker") return TextureFamily::Checker;
    if (name == "blobs") return TextureFamily::Blobs;
    if (name == "gratings") return TextureFamily::Gratings;
    fail(ErrorCode::InvalidArgument, "unknown texture family '" + std::string(name) + "'");
}

const char* family_name(TextureFamily f) noexcept {
    switch (f) {
        case TextureFamily::Gradients: return "gradients";
        case TextureFamily::Checker: return "checker";
        case TextureFamily::Blobs: return "blobs";
        case TextureFamily::Gratings: return "gratings";
    }
    return "unknown";
}

ImageGray checker_image(int size, int period, int phase_x, int phase_y) {
    require(size > 0 && period > 0, "checker needs positive size and period");
    std::vector<std::uint8_t> px(static_cast<std::size_t>(size) * size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const int cx = (x + phase_x) / period, cy = (y + phase_y) / period;
            px[static_cast<std::size_t>(y) * size + x] = ((cx + cy) % 2) ? 255 : 0;
        }
    return make_image(size, size, std::move(px));
}

ImageGray generate_image(TextureFamily family, int size, std::uint64_t seed) {
    require(size > 0 && size % kCoarsePatch == 0, "image size must be a positive multiple of 32");
    Xoshiro256ss rng(seed);
    switch (family) {
        case TextureFamily::Gradients: return gradients(size, rng);
        case TextureFamily::Checker: return checker(size, rng);
        case TextureFamily::Blobs: return blobs(size, rng);
        case TextureFamily::Gratings: return gratings(size, rng);
    }
    fail(ErrorCode::InvalidArgument, "unknown texture family");
}

std::vector<ImageGray> generate_corpus(TextureFamily family, std::size_t n, int size, std::uint64_t seed) {
    std::vector<ImageGray> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(generate_image(family, size, derive_seed(seed, i)));
    return out;
}

}  // namespace sebcom
