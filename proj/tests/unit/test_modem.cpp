// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "sebcom/error.hpp"
#include "sebcom/modem.hpp"
#include "sebcom/montecarlo.hpp"
#include "sebcom/rng.hpp"

using namespace sebcom;

TEST_SUITE("modem") {
    TEST_CASE("Gray mapping") {
        const auto s = qpsk_modulate(Bits{0, 0, 0, 1, 1, 0, 1, 1});
        const double a = 1 / std::sqrt(2.0);
        CHECK(s[0].real() == doctest::Approx(a));
        CHECK(s[0].imag() == doctest::Approx(a));
        CHECK(s[1].imag() == doctest::Approx(-a));
        CHECK(s[2].real() == doctest::Approx(-a));
        CHECK(s[3].real() == doctest::Approx(-a));
        CHECK(s[3].imag() == doctest::Approx(-a));
        for (const auto& v : s) CHECK(std::norm(v) == doctest::Approx(1.0));
        CHECK_THROWS_AS(qpsk_modulate(Bits{1}), Error);
    }

    TEST_CASE("LLRs and hard decisions") {
        const auto llr = qpsk_llr(qpsk_modulate(Bits{0, 1}), 0.5);
        CHECK(llr[0] == doctest::Approx(2.828427).epsilon(1e-6));
        CHECK(llr[1] == doctest::Approx(-2.828427).epsilon(1e-6));

        Xoshiro256ss rng(61);
        Bits b(1000);
        for (auto& v : b) v = static_cast<std::uint8_t>(rng.below(2));
        const auto rx = awgn(qpsk_modulate(b), kNoiselessSnr, 1);
        CHECK(hard_decision(qpsk_llr(rx, noise_variance(kNoiselessSnr))) == b);
    }

    TEST_CASE("noise statistics") {
        CHECK(noise_variance(4.0) == doctest::Approx(1 / (2 * std::pow(10.0, 0.4))));
        CHECK(noise_variance(kNoiselessSnr) == 0.0);
        const std::vector<Symbol> zero(500000, Symbol(0, 0));
        const auto rx = awgn(zero, 4.0, 62);
        double sum = 0, sq = 0;
        for (const auto& v : rx) {
            sum += v.real() + v.imag();
            sq += v.real() * v.real() + v.imag() * v.imag();
        }
        const double n = 1e6;
        const double var = sq / n - (sum / n) * (sum / n);
        CHECK(std::abs(var / noise_variance(4.0) - 1) < 0.01);
        CHECK(std::abs(sum / n) < 3 * std::sqrt(noise_variance(4.0) / n));
        CHECK(awgn(zero, 4.0, 62) == rx);
    }

    TEST_CASE("bit error rate") {
        const Bits a(1000, 0);
        Bits b = a;
        CHECK(measure_ber(a, b) == 0.0);
        b[17] = 1;
        CHECK(measure_ber(a, b) == doctest::Approx(0.001));
        CHECK(measure_ber(a, Bits(1000, 1)) == 1.0);
        CHECK_THROWS_AS(measure_ber(a, Bits(10, 0)), Error);
        const double want = gaussian_q(std::sqrt(2 * std::pow(10.0, 0.2 - std::log10(2.0))));
        CHECK(std::abs(simulate_uncoded_ber(2.0, 200000, 63) / want - 1) < 0.05);
    }
}
