// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "sebcom/error.hpp"

namespace sebcom {

namespace {

class PnmHeaderParser {
  public:
    explicit PnmHeaderParser(std::span<const std::uint8_t> data) : data_(data) {}

    unsigned next_uint() {
        skip_space_and_comments();
        if (pos_ >= data_.size() || !std::isdigit(data_[pos_]))
            fail(ErrorCode::Format, "malformed PNM header");
        unsigned long v = 0;
        while (pos_ < data_.size() && std::isdigit(data_[pos_])) {
            v = v * 10 + (data_[pos_++] - '0');
            if (v > 1u << 20) fail(ErrorCode::Format, "PNM header value too large");
        }
        return static_cast<unsigned>(v);
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_offset() {
        if (pos_ >= data_.size() || !std::isspace(data_[pos_]))
            fail(ErrorCode::Format, "malformed PNM header");
        return pos_ + 1;
    }

  private:
    void skip_space_and_comments() {
        while (pos_ < data_.size()) {
            if (std::isspace(data_[pos_])) {
                ++pos_;
            } else if (data_[pos_] == '#') {
                while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 2;
};

}  // namespace

ImageGray make_image(int width, int height, std::vector<std::uint8_t> pixels) {
    require(width > 0 && height > 0, "image dimensions must be positive");
    require(pixels.size() == static_cast<std::size_t>(width) * height, "pixel count mismatch");
    return ImageGray{width, height, width, height, std::move(pixels)};
}

ImageGray pad_to_cells(const ImageGray& img) {
    const int w = (img.width + kCoarsePatch - 1) / kCoarsePatch * kCoarsePatch;
    const int h = (img.height + kCoarsePatch - 1) / kCoarsePatch * kCoarsePatch;
    ImageGray out{w, h, img.original_width, img.original_height, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h)};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(x, y) = img.at(std::min(x, img.width - 1), std::min(y, img.height - 1));
    return out;
}

ImageGray crop_to_original(const ImageGray& img) {
    if (img.width == img.original_width && img.height == img.original_height) return img;
    ImageGray out{img.original_width, img.original_height, img.original_width, img.original_height, {}};
    out.pixels.resize(static_cast<std::size_t>(out.width) * out.height);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) out.at(x, y) = img.at(x, y);
    return out;
}

ImageGray decode_pnm_unpadded(std::span<const std::uint8_t> data) {
    if (data.size() < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '6'))
        fail(ErrorCode::Format, "unsupported image magic (expected P5 or P6)");
    const bool color = data[1] == '6';
    PnmHeaderParser hdr(data);
    const unsigned w = hdr.next_uint();
    const unsigned h = hdr.next_uint();
    const unsigned maxval = hdr.next_uint();
    if (w == 0 || h == 0) fail(ErrorCode::Format, "zero image dimension");
    if (w > 65535 || h > 65535) fail(ErrorCode::Format, "image dimension exceeds 65535");
    if (maxval != 255) fail(ErrorCode::Format, "unsupported maxval " + std::to_string(maxval));
    const std::size_t off = hdr.raster_offset();
    const std::size_t n = static_cast<std::size_t>(w) * h;
    const std::size_t need = n * (color ? 3 : 1);
    if (data.size() < off + need) fail(ErrorCode::Format, "truncated image raster");

    std::vector<std::uint8_t> px(n);
    if (color) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto* p = &data[off + 3 * i];
            px[i] = luma601(p[0], p[1], p[2]);
        }
    } else {
        std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(off), n, px.begin());
    }
    return make_image(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

ImageGray decode_pnm(std::span<const std::uint8_t> data) {
    return pad_to_cells(decode_pnm_unpadded(data));
}

ImageGray load_image(const std::filesystem::path& path) { return decode_pnm(read_file(path)); }

Bytes encode_pgm(const ImageGray& img) {
    const std::string hdr = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    Bytes out(hdr.begin(), hdr.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

void write_pgm(const std::filesystem::path& path, const ImageGray& img) { write_file(path, encode_pgm(img)); }

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace sebcom
