// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Little-endian byte packing, MSB-first bit packing, and the two digests
// used by the wire formats (CRC-32 trailer, SHA-256 KB hash).
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sebcom {

using Bytes = std::vector<std::uint8_t>;
using Bits = std::vector<std::uint8_t>;  // one bit per element, values 0/1

/// IEEE 802.3 CRC-32 (reflected, init/xorout 0xFFFFFFFF).
std::uint32_t crc32(std::span<const std::uint8_t> data) noexcept;
std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);

class ByteWriter {
  public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void f32(float v);
    void raw(std::span<const std::uint8_t> data) { out_.insert(out_.end(), data.begin(), data.end()); }
    void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

    std::size_t size() const noexcept { return out_.size(); }
    const Bytes& bytes() const noexcept { return out_; }
    Bytes take() { return std::move(out_); }

  private:
    Bytes out_;
};

/// Throws Error(Format) on reads past the end.
class ByteReader {
  public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    float f32();
    std::span<const std::uint8_t> raw(std::size_t n);

    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }

  private:
    void need(std::size_t n) const;

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

class BitWriter {
  public:
    void bit(bool b);
    /// Write the low `width` bits of `value`, MSB first.
    void bits(std::uint64_t value, unsigned width);
    /// Zero-pad to a byte boundary.
    void align();

    std::size_t bit_count() const noexcept { return nbits_; }
    const Bytes& bytes() const noexcept { return out_; }
    Bytes take() { return std::move(out_); }

  private:
    Bytes out_;
    std::size_t nbits_ = 0;
};

class BitReader {
  public:
    explicit BitReader(std::span<const std::uint8_t> data) : data_(data) {}

    bool bit();
    std::uint64_t bits(unsigned width);
    void align() noexcept { pos_ = (pos_ + 7) / 8 * 8; }
    std::size_t bit_position() const noexcept { return pos_; }

  private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

/// Unpack bytes to one-bit-per-element, MSB first.
Bits unpack_bits(std::span<const std::uint8_t> bytes);
/// Pack bits MSB first, zero-padding the final byte.
Bytes pack_bits(std::span<const std::uint8_t> bits);

}  // namespace sebcom
