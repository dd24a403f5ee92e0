// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
#include "sebcom/semcodec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sebcom/error.hpp"
#include "sebcom/kmeans.hpp"
#include "sebcom/labels.hpp"
#include "sebcom/rng.hpp"

namespace sebcom {

namespace {

constexpr char kFrameMagic[4] = {'S', 'E', 'B', 'F'};
constexpr std::uint8_t kFrameFormatVersion = 1;

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

void copy_patch(const ImageGray& img, int x0, int y0, int size, std::span<double> out) {
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            out[static_cast<std::size_t>(y) * size + x] = img.at(x0 + x, y0 + y) / 255.0;
}

std::uint8_t to_pixel(double v) {
    const double p = std::floor(v * 255.0 + 0.5);
    return static_cast<std::uint8_t>(std::clamp(p, 0.0, 255.0));
}

void check_cell_aligned(const ImageGray& img) {
    require(img.width > 0 && img.height > 0 && img.width % kCoarsePatch == 0 && img.height % kCoarsePatch == 0,
            "image dimensions must be multiples of 32");
}

}  // namespace

void CodecConfig::validate() const {
    require(p_fine >= 0 && p_fine <= 1, "p_fine must lie in [0,1]");
    require(p_protect >= 0 && p_protect <= 1, "p_protect must lie in [0,1]");
    require(is_power_of_two(k_coarse), "k_coarse must be a power of two");
    require(is_power_of_two(k_fine), "k_fine must be a power of two");
    require(kmeans_max_iters >= 1, "kmeans_max_iters must be >= 1");
    require(kmeans_tol >= 0, "kmeans_tol must be non-negative");
}

FeatureMatrix extract_patches(const ImageGray& img, int size) {
    require(size > 0 && img.width % size == 0 && img.height % size == 0,
            "patch size must divide the image dimensions");
    const std::size_t dim = static_cast<std::size_t>(size) * size;
    const int gw = img.width / size;
    const int gh = img.height / size;
    FeatureMatrix out(dim, static_cast<std::size_t>(gw) * gh);
    for (int cy = 0; cy < gh; ++cy)
        for (int cx = 0; cx < gw; ++cx)
            copy_patch(img, cx * size, cy * size, size, out.row(static_cast<std::size_t>(cy) * gw + cx));
    return out;
}

std::size_t selected_cells(double p, std::size_t n) noexcept {
    const auto k = static_cast<std::size_t>(std::floor(p * static_cast<double>(n) + 0.5));
    return std::min(k, n);
}

std::vector<std::size_t> rank_cells(std::span<const double> cell_importance) {
    std::vector<std::size_t> order(cell_importance.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cell_importance[a] > cell_importance[b]; });
    return order;
}

KnowledgeBase build_kb(std::span<const ImageGray> corpus, const CodecConfig& config, const HeatmapSource& importance,
                       const KbParams& params) {
    require(!corpus.empty(), "corpus must not be empty");
    config.validate();
    params.validate();

    FeatureMatrix coarse(patch_area(Granularity::Coarse));
    FeatureMatrix fine(patch_area(Granularity::Fine));
    std::vector<double> coarse_imp, fine_imp;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const ImageGray& img = corpus[i];
        check_cell_aligned(img);
        const Heatmap h = importance(img, i);
        require(h.width == img.width && h.height == img.height, "heatmap size does not match image");
        coarse.append(extract_patches(img, kCoarsePatch));
        fine.append(extract_patches(img, kFinePatch));
        const auto ci = block_means(h, kCoarsePatch);
        const auto fi = block_means(h, kFinePatch);
        coarse_imp.insert(coarse_imp.end(), ci.begin(), ci.end());
        fine_imp.insert(fine_imp.end(), fi.begin(), fi.end());
    }

    KnowledgeBase kb;
    kb.params = params;
    SebId next = 0;
    auto add_codebook = [&](const FeatureMatrix& feats, const std::vector<double>& imp, Granularity g,
                            std::size_t k, std::uint64_t seed) {
        const auto km = train_codebook(feats, {k, config.kmeans_max_iters, config.kmeans_tol, seed});
        std::vector<double> sum(k, 0.0);
        std::vector<std::size_t> n(k, 0);
        for (std::size_t i = 0; i < feats.rows(); ++i) {
            sum[km.assignment[i]] += imp[i];
            ++n[km.assignment[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            Seb s;
            s.id = next++;
            s.granularity = g;
            const auto row = km.centroids.row(c);
            s.centroid.assign(row.begin(), row.end());
            for (auto& v : s.centroid) v = std::clamp(v, 0.0, 1.0);
            s.importance = n[c] ? std::clamp(sum[c] / static_cast<double>(n[c]), 0.0, 1.0) : 0.0;
            kb.sebs.emplace(s.id, std::move(s));
        }
    };
    add_codebook(coarse, coarse_imp, Granularity::Coarse, config.k_coarse, config.seed);
    add_codebook(fine, fine_imp, Granularity::Fine, config.k_fine, derive_seed(config.seed, 1));

    for (Granularity g : kGranularities) assign_labels(kb, g);
    rebuild_relation(kb);

    double total = 0;
    std::size_t cells = 0;
    for (const ImageGray& img : corpus) {
        total += quantization_distortion(img, kb) * img.cell_count();
        cells += static_cast<std::size_t>(img.cell_count());
    }
    kb.baseline_distortion = total / static_cast<double>(cells);
    kb.version = 0;
    return kb;
}

SemanticFrame encode(const ImageGray& img, const KnowledgeBase& kb, const Heatmap& heatmap, const CodecConfig& config) {
    check_cell_aligned(img);
    require(heatmap.width == img.width && heatmap.height == img.height, "heatmap size does not match image");
    require(config.p_fine >= 0 && config.p_fine <= 1 && config.p_protect >= 0 && config.p_protect <= 1,
            "p_fine and p_protect must lie in [0,1]");
    require(img.original_width <= 65535 && img.original_height <= 65535, "image too large for the frame header");
    const Codebook coarse = kb.codebook(Granularity::Coarse);
    const Codebook fine = kb.codebook(Granularity::Fine);
    require(coarse.size() > 0 && fine.size() > 0, "knowledge base must hold coarse and fine Sebs");

    SemanticFrame f;
    f.kb_version = kb.version;
    f.original_width = static_cast<std::uint16_t>(img.original_width);
    f.original_height = static_cast<std::uint16_t>(img.original_height);
    f.grid_w = static_cast<std::uint16_t>(img.grid_w());
    f.grid_h = static_cast<std::uint16_t>(img.grid_h());
    f.bits_coarse = static_cast<std::uint8_t>(coarse.bits);
    f.bits_fine = static_cast<std::uint8_t>(fine.bits);

    const std::size_t n = f.cell_count();
    const auto order = rank_cells(cell_importance(heatmap));
    f.fine_flags.assign(n, 0);
    f.class_flags.assign(n, 0);
    for (std::size_t r = 0; r < selected_cells(config.p_fine, n); ++r) f.fine_flags[order[r]] = 1;
    for (std::size_t r = 0; r < selected_cells(config.p_protect, n); ++r) f.class_flags[order[r]] = 1;

    f.indices.resize(n);
    std::vector<double> cell(patch_area(Granularity::Coarse));
    std::vector<double> quad(patch_area(Granularity::Fine));
    for (std::size_t c = 0; c < n; ++c) {
        const int x0 = static_cast<int>(c % f.grid_w) * kCoarsePatch;
        const int y0 = static_cast<int>(c / f.grid_w) * kCoarsePatch;
        if (f.fine_flags[c]) {
            for (int q = 0; q < 4; ++q) {
                copy_patch(img, x0 + (q % 2) * kFinePatch, y0 + (q / 2) * kFinePatch, kFinePatch, quad);
                f.indices[c].push_back(fine.labels[nearest_row(fine.centroids, quad)]);
            }
        } else {
            copy_patch(img, x0, y0, kCoarsePatch, cell);
            f.indices[c].push_back(coarse.labels[nearest_row(coarse.centroids, cell)]);
        }
    }
    return f;
}

namespace {

void check_frame_shape(const SemanticFrame& f) {
    const std::size_t n = f.cell_count();
    if (f.fine_flags.size() != n || f.class_flags.size() != n || f.indices.size() != n)
        fail(ErrorCode::Format, "frame bitmaps do not match the grid");
    for (std::size_t c = 0; c < n; ++c)
        if (f.indices[c].size() != (f.fine_flags[c] ? 4u : 1u)) fail(ErrorCode::Format, "frame cell index count mismatch");
    if (f.grid_w * kCoarsePatch < f.original_width || f.grid_h * kCoarsePatch < f.original_height ||
        f.original_width == 0 || f.original_height == 0)
        fail(ErrorCode::Format, "frame grid does not cover the original image");
}

}  // namespace

ImageGray decode(const SemanticFrame& frame, const KnowledgeBase& kb) {
    if (frame.kb_version != kb.version)
        fail(ErrorCode::KbMismatch, "frame encoded with KB version " + std::to_string(frame.kb_version) +
                                        " but local KB is version " + std::to_string(kb.version));
    check_frame_shape(frame);
    const Codebook coarse = kb.codebook(Granularity::Coarse);
    const Codebook fine = kb.codebook(Granularity::Fine);
    require(coarse.size() > 0 && fine.size() > 0, "knowledge base must hold coarse and fine Sebs");

    ImageGray img;
    img.width = frame.grid_w * kCoarsePatch;
    img.height = frame.grid_h * kCoarsePatch;
    img.original_width = frame.original_width;
    img.original_height = frame.original_height;
    img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, 0);

    auto paint = [&](int x0, int y0, int size, std::span<const double> centroid) {
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                img.at(x0 + x, y0 + y) = to_pixel(centroid[static_cast<std::size_t>(y) * size + x]);
    };
    for (std::size_t c = 0; c < frame.cell_count(); ++c) {
        const int x0 = static_cast<int>(c % frame.grid_w) * kCoarsePatch;
        const int y0 = static_cast<int>(c / frame.grid_w) * kCoarsePatch;
        if (frame.fine_flags[c]) {
            for (int q = 0; q < 4; ++q)
                paint(x0 + (q % 2) * kFinePatch, y0 + (q / 2) * kFinePatch, kFinePatch,
                      fine.centroids.row(fine.resolve(frame.indices[c][q])));
        } else {
            paint(x0, y0, kCoarsePatch, coarse.centroids.row(coarse.resolve(frame.indices[c][0])));
        }
    }
    return crop_to_original(img);
}

std::map<SebId, double> frame_usage(const SemanticFrame& frame, const KnowledgeBase& kb, const Heatmap& heatmap) {
    check_frame_shape(frame);
    require(heatmap.width == frame.grid_w * kCoarsePatch && heatmap.height == frame.grid_h * kCoarsePatch,
            "heatmap size does not match frame");
    const Codebook coarse = kb.codebook(Granularity::Coarse);
    const Codebook fine = kb.codebook(Granularity::Fine);
    const auto cell_imp = block_means(heatmap, kCoarsePatch);
    const auto quad_imp = block_means(heatmap, kFinePatch);
    const std::size_t fine_w = static_cast<std::size_t>(frame.grid_w) * 2;

    std::map<SebId, std::pair<double, std::size_t>> acc;
    for (std::size_t c = 0; c < frame.cell_count(); ++c) {
        if (frame.fine_flags[c]) {
            const std::size_t cx = c % frame.grid_w;
            const std::size_t cy = c / frame.grid_w;
            for (std::size_t q = 0; q < 4; ++q) {
                const std::size_t qi = (cy * 2 + q / 2) * fine_w + cx * 2 + q % 2;
                auto& a = acc[fine.ids[fine.resolve(frame.indices[c][q])]];
                a.first += quad_imp[qi];
                ++a.second;
            }
        } else {
            auto& a = acc[coarse.ids[coarse.resolve(frame.indices[c][0])]];
            a.first += cell_imp[c];
            ++a.second;
        }
    }
    std::map<SebId, double> out;
    for (const auto& [id, a] : acc) out[id] = a.first / static_cast<double>(a.second);
    return out;
}

FrameLayout frame_layout(const SemanticFrame& frame) {
    FrameLayout l;
    l.bitmap_bytes = (frame.cell_count() + 7) / 8;
    for (std::size_t c = 0; c < frame.cell_count(); ++c) l.payload_bits += frame.cell_index_bits(c);
    l.total_bytes = kFrameHeaderBytes + 2 * l.bitmap_bytes + (l.payload_bits + 7) / 8 + 4;
    return l;
}

Bytes serialize_frame(const SemanticFrame& frame) {
    check_frame_shape(frame);
    ByteWriter w;
    w.raw(std::string_view(kFrameMagic, 4));
    w.u8(kFrameFormatVersion);
    w.u32(frame.kb_version);
    w.u16(frame.original_width);
    w.u16(frame.original_height);
    w.u16(frame.grid_w);
    w.u16(frame.grid_h);
    w.u8(frame.bits_coarse);
    w.u8(frame.bits_fine);

    BitWriter bits;
    for (auto f : frame.fine_flags) bits.bit(f != 0);
    bits.align();
    for (auto f : frame.class_flags) bits.bit(f != 0);
    bits.align();
    for (std::size_t c = 0; c < frame.cell_count(); ++c) {
        const unsigned width = frame.fine_flags[c] ? frame.bits_fine : frame.bits_coarse;
        for (auto idx : frame.indices[c]) bits.bits(idx, width);
    }
    w.raw(bits.bytes());
    const std::uint32_t crc = crc32(w.bytes());
    w.u32(crc);
    return w.take();
}

FrameParse deserialize_frame(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    const auto magic = r.raw(4);
    if (!std::equal(magic.begin(), magic.end(), kFrameMagic)) fail(ErrorCode::Format, "bad frame magic");
    if (r.u8() != kFrameFormatVersion) fail(ErrorCode::Format, "unsupported frame format version");

    FrameParse out;
    SemanticFrame& f = out.frame;
    f.kb_version = r.u32();
    f.original_width = r.u16();
    f.original_height = r.u16();
    f.grid_w = r.u16();
    f.grid_h = r.u16();
    f.bits_coarse = r.u8();
    f.bits_fine = r.u8();
    if (f.bits_coarse > 32 || f.bits_fine > 32) fail(ErrorCode::Format, "index width exceeds 32 bits");

    const std::size_t n = f.cell_count();
    const std::size_t bitmap_bytes = (n + 7) / 8;
    if (r.remaining() < 2 * bitmap_bytes + 4) fail(ErrorCode::Format, "truncated frame");
    const auto body = bytes.subspan(r.position(), bytes.size() - r.position() - 4);
    BitReader bits(body);
    f.fine_flags.resize(n);
    f.class_flags.resize(n);
    for (auto& v : f.fine_flags) v = bits.bit();
    bits.align();
    for (auto& v : f.class_flags) v = bits.bit();
    bits.align();
    f.indices.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        const unsigned width = f.fine_flags[c] ? f.bits_fine : f.bits_coarse;
        const int count = f.fine_flags[c] ? 4 : 1;
        for (int q = 0; q < count; ++q) f.indices[c].push_back(static_cast<std::uint32_t>(bits.bits(width)));
    }
    bits.align();
    if (bits.bit_position() / 8 != body.size()) fail(ErrorCode::Format, "trailing bytes after frame payload");

    ByteReader trailer(bytes.subspan(bytes.size() - 4));
    out.crc_ok = trailer.u32() == crc32(bytes.first(bytes.size() - 4));
    return out;
}

double quantization_distortion(const ImageGray& img, const KnowledgeBase& kb) {
    check_cell_aligned(img);
    const Codebook coarse = kb.codebook(Granularity::Coarse);
    require(coarse.size() > 0, "knowledge base has no coarse Sebs");
    const FeatureMatrix cells = extract_patches(img, kCoarsePatch);
    double total = 0;
    for (std::size_t i = 0; i < cells.rows(); ++i) {
        double d = 0;
        nearest_row(coarse.centroids, cells.row(i), &d);
        total += d / static_cast<double>(cells.dim);
    }
    return total / static_cast<double>(cells.rows());
}

JointCounts feature_seb_joint(std::span<const ImageGray> images, const KnowledgeBase& kb) {
    const Codebook coarse = kb.codebook(Granularity::Coarse);
    require(coarse.size() > 0, "knowledge base has no coarse Sebs");
    JointCounts joint(4, coarse.size());
    for (const ImageGray& img : images) {
        const FeatureMatrix cells = extract_patches(img, kCoarsePatch);
        for (std::size_t i = 0; i < cells.rows(); ++i) {
            const auto row = cells.row(i);
            const double mean = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size());
            const auto bin = std::min<std::size_t>(3, static_cast<std::size_t>(mean * 4.0));
            ++joint.at(bin, nearest_row(coarse.centroids, row));
        }
    }
    return joint;
}

}  // namespace sebcom
