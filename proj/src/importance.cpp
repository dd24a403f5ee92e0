// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/importance.hpp"

#include <algorithm>
#include <cmath>

#include "sebcom/error.hpp"

namespace sebcom {

namespace {

int clampi(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

Heatmap resample_nearest(const Heatmap& h, int target_w, int target_h) {
    require(target_w > 0 && target_h > 0, "heatmap target size must be positive");
    if (h.width == target_w && h.height == target_h) return h;
    Heatmap out{target_w, target_h, std::vector<double>(static_cast<std::size_t>(target_w) * target_h)};
    for (int y = 0; y < target_h; ++y) {
        const int sy = static_cast<int>(static_cast<long long>(y) * h.height / target_h);
        for (int x = 0; x < target_w; ++x) {
            const int sx = static_cast<int>(static_cast<long long>(x) * h.width / target_w);
            out.values[static_cast<std::size_t>(y) * target_w + x] = h.at(sx, sy);
        }
    }
    return out;
}

Heatmap load_heatmap(const std::filesystem::path& path, int target_w, int target_h) {
    const Bytes data = read_file(path);
    if (data.size() < 2 || data[0] != 'P' || data[1] != '5') fail(ErrorCode::Format, "heatmap must be a P5 file");
    const ImageGray raw = decode_pnm_unpadded(data);
    Heatmap h{raw.width, raw.height, std::vector<double>(raw.pixels.size())};
    std::transform(raw.pixels.begin(), raw.pixels.end(), h.values.begin(),
                   [](std::uint8_t v) { return v / 255.0; });
    return resample_nearest(h, target_w, target_h);
}

Heatmap pad_heatmap(const Heatmap& h, int padded_w, int padded_h) {
    if (h.width == padded_w && h.height == padded_h) return h;
    require(padded_w >= h.width && padded_h >= h.height, "padding cannot shrink a heatmap");
    Heatmap out{padded_w, padded_h, std::vector<double>(static_cast<std::size_t>(padded_w) * padded_h)};
    for (int y = 0; y < padded_h; ++y)
        for (int x = 0; x < padded_w; ++x)
            out.values[static_cast<std::size_t>(y) * padded_w + x] =
                h.at(std::min(x, h.width - 1), std::min(y, h.height - 1));
    return out;
}

Heatmap crop_heatmap(const Heatmap& h, int w, int h_) {
    require(w <= h.width && h_ <= h.height, "crop larger than heatmap");
    Heatmap out{w, h_, std::vector<double>(static_cast<std::size_t>(w) * h_)};
    for (int y = 0; y < h_; ++y)
        for (int x = 0; x < w; ++x) out.values[static_cast<std::size_t>(y) * w + x] = h.at(x, y);
    return out;
}

Heatmap builtin_saliency(const ImageGray& img) {
    const int w = img.width;
    const int h = img.height;
    auto px = [&](int x, int y) { return static_cast<double>(img.at(clampi(x, 0, w - 1), clampi(y, 0, h - 1))); };

    std::vector<double> grad(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
            const double gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
            grad[static_cast<std::size_t>(y) * w + x] = std::abs(gx) + std::abs(gy);
        }
    }

    // Separable 8-tap box, window x-4..x+3, clamped borders.
    std::vector<double> rows(grad.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0;
            for (int d = -4; d <= 3; ++d) s += grad[static_cast<std::size_t>(y) * w + clampi(x + d, 0, w - 1)];
            rows[static_cast<std::size_t>(y) * w + x] = s;
        }
    }
    Heatmap out{w, h, std::vector<double>(grad.size())};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0;
            for (int d = -4; d <= 3; ++d) s += rows[static_cast<std::size_t>(clampi(y + d, 0, h - 1)) * w + x];
            out.values[static_cast<std::size_t>(y) * w + x] = s / 64.0;
        }
    }

    const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
    const double mn = *lo;
    const double range = *hi - mn;
    for (auto& v : out.values) v = range > 0 ? (v - mn) / range : 0.0;
    return out;
}

std::vector<double> block_means(const Heatmap& h, int block) {
    require(block > 0 && h.width % block == 0 && h.height % block == 0,
            "heatmap dimensions must be multiples of the block size");
    const int gw = h.width / block;
    const int gh = h.height / block;
    std::vector<double> out(static_cast<std::size_t>(gw) * gh);
    for (int cy = 0; cy < gh; ++cy) {
        for (int cx = 0; cx < gw; ++cx) {
            double s = 0;
            for (int y = 0; y < block; ++y)
                for (int x = 0; x < block; ++x) s += h.at(cx * block + x, cy * block + y);
            out[static_cast<std::size_t>(cy) * gw + cx] = s / (static_cast<double>(block) * block);
        }
    }
    return out;
}

ImportanceProvider ImportanceProvider::parse(const std::string& spec) {
    if (spec.empty() || spec == "builtin") return {};
    if (spec.rfind("file:", 0) == 0 && spec.size() > 5) return {Kind::File, spec.substr(5)};
    fail(ErrorCode::InvalidArgument, "importance must be 'builtin' or 'file:<path>', got '" + spec + "'");
}

Heatmap ImportanceProvider::heatmap_for(const ImageGray& img, const std::string& image_name) const {
    if (kind == Kind::Builtin) return builtin_saliency(img);
    std::filesystem::path p = path;
    if (std::filesystem::is_directory(p)) {
        require(!image_name.empty(), "heatmap directory lookup needs an image name");
        p /= std::filesystem::path(image_name).filename();
    }
    return pad_heatmap(load_heatmap(p, img.original_width, img.original_height), img.width, img.height);
}

}  // namespace sebcom
