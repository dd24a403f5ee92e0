// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Regular Gallager LDPC codes (column degree 3) with a systematic encoder
// obtained by GF(2) elimination, and a normalized min-sum decoder.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sebcom/bytes.hpp"

namespace sebcom {

enum class CodeRate { Half, TwoThirds };

const char* code_rate_name(CodeRate r) noexcept;

class LdpcCode {
  public:
    /// Seeded construction; retries seed+1, seed+2, ... (32 attempts) when the
    /// parity-check matrix comes out rank deficient. n must be divisible by 24.
    static LdpcCode construct(CodeRate rate, std::size_t n = 648, std::uint64_t seed = 1);

    CodeRate rate() const noexcept { return rate_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    std::size_t m() const noexcept { return n_ - k_; }
    std::uint64_t construction_seed() const noexcept { return seed_; }
    /// 4-cycles left after resampling (0 for the default sizes).
    std::size_t four_cycles() const noexcept { return four_cycles_; }

    /// Rows of H as column lists, in the code's (permuted) column order.
    const std::vector<std::vector<std::uint32_t>>& check_rows() const noexcept { return rows_; }
    /// permutation()[j] = column of the unpermuted construction placed at j.
    const std::vector<std::uint32_t>& permutation() const noexcept { return perm_; }
    std::size_t ones() const noexcept;

    /// Systematic encode: codeword = [message (k) | parity (n-k)].
    Bits encode(std::span<const std::uint8_t> message) const;

    /// H c^T over GF(2); all zeros for codewords.
    Bits syndrome(std::span<const std::uint8_t> word) const;

  private:
    CodeRate rate_ = CodeRate::Half;
    std::size_t n_ = 0;
    std::size_t k_ = 0;
    std::uint64_t seed_ = 0;
    std::size_t four_cycles_ = 0;
    std::vector<std::vector<std::uint32_t>> rows_;
    std::vector<std::uint32_t> perm_;
    // parity_[i] is a k-bit mask (64-bit words): p_i = <parity_[i], message>.
    std::vector<std::vector<std::uint64_t>> parity_;
};

struct DecodeResult {
    Bits message;
    bool converged = false;
    int iterations = 0;
};

/// Normalized min-sum (factor 0.75), flooding schedule, early stop on a zero
/// syndrome. A zero posterior LLR counts as undecided, so convergence needs
/// every bit decided and all checks satisfied.
DecodeResult ldpc_decode(const LdpcCode& code, std::span<const double> llrs, int max_iters = 50);

}  // namespace sebcom
