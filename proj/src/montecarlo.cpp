// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/montecarlo.hpp"

#include <cmath>

#include "sebcom/error.hpp"
#include "sebcom/modem.hpp"
#include "sebcom/rng.hpp"

namespace sebcom {

double simulate_uncoded_ber(double snr_db, std::size_t bits, std::uint64_t seed) {
    require(bits > 0 && bits % 2 == 0, "uncoded BER needs an even, positive bit count");
    Xoshiro256ss rng(seed);
    Bits sent(bits);
    for (auto& b : sent) b = static_cast<std::uint8_t>(rng() >> 63);
    const auto rx = awgn(qpsk_modulate(sent), snr_db, derive_seed(seed, 1));
    return measure_ber(sent, hard_decision(qpsk_llr(rx, noise_variance(snr_db))));
}

CodedBer simulate_coded_ber(const LdpcCode& code, double snr_db, std::size_t frames, std::uint64_t seed,
                            int max_iters) {
    require(frames > 0, "need at least one frame");
    const double var = noise_variance(snr_db);
    std::size_t pre_errors = 0, post_errors = 0, frame_errors = 0;
    for (std::size_t t = 0; t < frames; ++t) {
        const std::uint64_t ts = derive_seed(seed, t);
        Xoshiro256ss rng(ts);
        Bits msg(code.k());
        for (auto& b : msg) b = static_cast<std::uint8_t>(rng() >> 63);
        const Bits cw = code.encode(msg);
        const auto llrs = qpsk_llr(awgn(qpsk_modulate(cw), snr_db, derive_seed(ts, 1)), var);
        const Bits hard = hard_decision(llrs);
        for (std::size_t i = 0; i < cw.size(); ++i) pre_errors += hard[i] != cw[i];
        const auto res = ldpc_decode(code, llrs, max_iters);
        std::size_t errs = 0;
        for (std::size_t i = 0; i < msg.size(); ++i) errs += res.message[i] != msg[i];
        post_errors += errs;
        if (errs != 0 || !res.converged) ++frame_errors;
    }
    CodedBer out;
    out.pre_decode_ber = static_cast<double>(pre_errors) / static_cast<double>(frames * code.n());
    out.post_decode_ber = static_cast<double>(post_errors) / static_cast<double>(frames * code.k());
    out.frame_error_rate = static_cast<double>(frame_errors) / static_cast<double>(frames);
    return out;
}

ProtectionWindow find_protection_window(const UepCodes& codes, double lo_db, double hi_db, double step_db,
                                        std::size_t frames, std::uint64_t seed, int max_iters) {
    require(step_db > 0 && hi_db >= lo_db, "invalid SNR sweep");
    ProtectionWindow w;
    const auto steps = static_cast<std::size_t>(std::floor((hi_db - lo_db) / step_db + 1e-9));
    for (std::size_t i = 0; i <= steps; ++i) {
        SweepPoint p;
        p.snr_db = lo_db + static_cast<double>(i) * step_db;
        p.half = simulate_coded_ber(codes.class_a, p.snr_db, frames, seed, max_iters);
        p.two_thirds = simulate_coded_ber(codes.class_b, p.snr_db, frames, seed, max_iters);
        if (p.two_thirds.post_decode_ber > kWindowFailBer && p.half.post_decode_ber < kWindowCleanBer)
            w.window.push_back(p.snr_db);
        if (!w.window.empty() && !w.both_clean && p.snr_db > w.window.front() &&
            p.two_thirds.post_decode_ber < kWindowCleanBer && p.half.post_decode_ber < kWindowCleanBer)
            w.both_clean = p.snr_db;
        w.points.push_back(p);
    }
    return w;
}

}  // namespace sebcom
