// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/modem.hpp"

#include <cmath>
#include <numbers>

#include "sebcom/error.hpp"
#include "sebcom/rng.hpp"

namespace sebcom {

std::vector<Symbol> qpsk_modulate(std::span<const std::uint8_t> bits) {
    require(bits.size() % 2 == 0, "QPSK needs an even number of bits");
    constexpr double a = std::numbers::sqrt2 / 2.0;
    std::vector<Symbol> out(bits.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = {bits[2 * i] ? -a : a, bits[2 * i + 1] ? -a : a};
    return out;
}

double noise_variance(double snr_db) noexcept {
    if (std::isinf(snr_db) && snr_db > 0) return 0.0;
    return 1.0 / (2.0 * std::pow(10.0, snr_db / 10.0));
}

std::vector<Symbol> awgn(std::span<const Symbol> symbols, double snr_db, std::uint64_t seed) {
    std::vector<Symbol> out(symbols.begin(), symbols.end());
    const double var = noise_variance(snr_db);
    if (var == 0.0) return out;
    const double sigma = std::sqrt(var);
    GaussianStream g(seed);
    for (auto& s : out) {
        const double ni = g();
        const double nq = g();
        s += Symbol{sigma * ni, sigma * nq};
    }
    return out;
}

std::vector<double> qpsk_llr(std::span<const Symbol> received, double noise_var) {
    std::vector<double> out(received.size() * 2);
    for (std::size_t i = 0; i < received.size(); ++i) {
        if (noise_var > 0) {
            out[2 * i] = 2.0 * received[i].real() / noise_var;
            out[2 * i + 1] = 2.0 * received[i].imag() / noise_var;
        } else {
            out[2 * i] = std::copysign(1e6, received[i].real());
            out[2 * i + 1] = std::copysign(1e6, received[i].imag());
        }
    }
    return out;
}

Bits hard_decision(std::span<const double> llrs) {
    Bits out(llrs.size());
    for (std::size_t i = 0; i < llrs.size(); ++i) out[i] = llrs[i] < 0 ? 1 : 0;
    return out;
}

double measure_ber(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> received) {
    require(sent.size() == received.size(), "BER needs equal-length bit arrays");
    if (sent.empty()) return 0.0;
    std::size_t diff = 0;
    for (std::size_t i = 0; i < sent.size(); ++i) diff += (sent[i] & 1u) != (received[i] & 1u);
    return static_cast<double>(diff) / static_cast<double>(sent.size());
}

double gaussian_q(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace sebcom
