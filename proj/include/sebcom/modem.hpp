// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Gray-coded 4QAM (QPSK) with unit symbol energy, a seeded AWGN channel in
// the Es/N0 convention, and per-bit LLRs.
#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sebcom/bytes.hpp"

namespace sebcom {

using Symbol = std::complex<double>;

inline constexpr double kNoiselessSnr = std::numeric_limits<double>::infinity();

/// Bit pair (b0, b1) -> ((1-2 b0)/sqrt2, (1-2 b1)/sqrt2).
std::vector<Symbol> qpsk_modulate(std::span<const std::uint8_t> bits);

/// Per real dimension: sigma^2 = 1 / (2 * 10^(snr_db/10)); 0 when noiseless.
double noise_variance(double snr_db) noexcept;

/// Adds N(0, sigma^2) to I then Q of each symbol from one Box-Muller stream
/// seeded with `seed`. Infinite SNR returns the input unchanged.
std::vector<Symbol> awgn(std::span<const Symbol> symbols, double snr_db, std::uint64_t seed);

/// LLR = 2 y / sigma^2, positive favouring bit 0. A zero noise variance
/// yields saturated +-1e6 values.
std::vector<double> qpsk_llr(std::span<const Symbol> received, double noise_var);

Bits hard_decision(std::span<const double> llrs);

/// Hamming distance / length.
double measure_ber(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> received);

/// Q(x) = P(N(0,1) > x).
double gaussian_q(double x) noexcept;

}  // namespace sebcom
