// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sebcom/ldpc.hpp"
#include "sebcom/uep.hpp"

namespace sebcom {

/// Uncoded QPSK bit error rate over AWGN at Es/N0 = snr_db.
double simulate_uncoded_ber(double snr_db, std::size_t bits, std::uint64_t seed);

struct CodedBer {
    double pre_decode_ber = 0;
    double post_decode_ber = 0;
    double frame_error_rate = 0;
};

/// Random messages through encode -> QPSK -> AWGN -> min-sum. Trial t uses
/// derive_seed(seed, t) for both its message and its noise, so two codes of
/// equal length simulated with the same seed see identical noise.
CodedBer simulate_coded_ber(const LdpcCode& code, double snr_db, std::size_t frames, std::uint64_t seed,
                            int max_iters = 50);

struct SweepPoint {
    double snr_db = 0;
    CodedBer half;
    CodedBer two_thirds;
};

struct ProtectionWindow {
    std::vector<SweepPoint> points;
    /// SNRs where rate 2/3 post-decode BER > 1e-2 while rate 1/2 < 1e-4.
    std::vector<double> window;
    /// Lowest SNR above the window where both rates are below 1e-4.
    std::optional<double> both_clean;

    bool found() const noexcept { return !window.empty() && both_clean.has_value(); }
};

inline constexpr double kWindowFailBer = 1e-2;
inline constexpr double kWindowCleanBer = 1e-4;

ProtectionWindow find_protection_window(const UepCodes& codes, double lo_db, double hi_db, double step_db,
                                        std::size_t frames, std::uint64_t seed, int max_iters = 50);

}  // namespace sebcom
