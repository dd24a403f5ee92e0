// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sebcom/error.hpp"

namespace sebcom {

namespace {

constexpr int kSsimWindow = 8;
constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);

void check_dims(const ImageGray& a, const ImageGray& b) {
    require(a.width == b.width && a.height == b.height, "image dimensions differ");
}

/// Summed-area table with a zero first row and column.
std::vector<double> integral(int w, int h, auto value) {
    std::vector<double> t(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            t[(y + 1) * (w + 1) + x + 1] =
                value(x, y) + t[y * (w + 1) + x + 1] + t[(y + 1) * (w + 1) + x] - t[y * (w + 1) + x];
    return t;
}

double box_sum(const std::vector<double>& t, int w, int x, int y, int wx, int wy) {
    const int s = w + 1;
    return t[(y + wy) * s + x + wx] - t[y * s + x + wx] - t[(y + wy) * s + x] + t[y * s + x];
}

}  // namespace

double mse(const ImageGray& a, const ImageGray& b) {
    check_dims(a, b);
    require(!a.pixels.empty(), "empty image");
    double s = 0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
        s += d * d;
    }
    return s / static_cast<double>(a.pixels.size());
}

double psnr(const ImageGray& a, const ImageGray& b) {
    const double m = mse(a, b);
    if (m == 0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / m));
}

double ssim(const ImageGray& a, const ImageGray& b) {
    check_dims(a, b);
    require(!a.pixels.empty(), "empty image");
    const int w = a.width, h = a.height;
    const int wx = std::min(kSsimWindow, w), wy = std::min(kSsimWindow, h);
    auto pa = [&](int x, int y) { return static_cast<double>(a.at(x, y)); };
    auto pb = [&](int x, int y) { return static_cast<double>(b.at(x, y)); };
    const auto sa = integral(w, h, pa);
    const auto sb = integral(w, h, pb);
    const auto saa = integral(w, h, [&](int x, int y) { return pa(x, y) * pa(x, y); });
    const auto sbb = integral(w, h, [&](int x, int y) { return pb(x, y) * pb(x, y); });
    const auto sab = integral(w, h, [&](int x, int y) { return pa(x, y) * pb(x, y); });
    const double n = static_cast<double>(wx) * wy;
    double total = 0;
    std::size_t count = 0;
    for (int y = 0; y + wy <= h; ++y) {
        for (int x = 0; x + wx <= w; ++x) {
            const double ma = box_sum(sa, w, x, y, wx, wy) / n;
            const double mb = box_sum(sb, w, x, y, wx, wy) / n;
            const double va = std::max(0.0, box_sum(saa, w, x, y, wx, wy) / n - ma * ma);
            const double vb = std::max(0.0, box_sum(sbb, w, x, y, wx, wy) / n - mb * mb);
            const double cov = box_sum(sab, w, x, y, wx, wy) / n - ma * mb;
            total += ((2 * ma * mb + kC1) * (2 * cov + kC2)) / ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

WeightedMse weighted_mse(const ImageGray& a, const ImageGray& b, const Heatmap& h) {
    check_dims(a, b);
    require(h.width == a.width && h.height == a.height, "heatmap dimensions differ from the image");
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
        num += h.values[i] * d * d;
        den += h.values[i];
    }
    if (den == 0) return {mse(a, b), true};
    return {num / den, false};
}

}  // namespace sebcom
