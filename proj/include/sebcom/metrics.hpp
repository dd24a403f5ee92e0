// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sebcom/image.hpp"
#include "sebcom/importance.hpp"

namespace sebcom {

inline constexpr double kPsnrCap = 99.0;

double mse(const ImageGray& a, const ImageGray& b);
/// 10*log10(255^2 / MSE), capped at 99 dB.
double psnr(const ImageGray& a, const ImageGray& b);
/// Mean SSIM over all 8x8 windows (stride 1, uniform weights). Images smaller
/// than the window are scored as one whole-image window.
double ssim(const ImageGray& a, const ImageGray& b);

struct WeightedMse {
    double value = 0;
    bool flagged = false;  // all-zero heatmap, value is the plain MSE
};

WeightedMse weighted_mse(const ImageGray& a, const ImageGray& b, const Heatmap& h);

}  // namespace sebcom
