#pragma once

// Data-parallel pixel kernels used by the pipeline stages. Every kernel has a
// plain serial reference in `serial` and an OpenMP version in `parallel`; the
// two agree bit-exactly (see tests/unit/test_kernels.cpp and bench/).

#include <array>
#include <cstdint>
#include <span>

namespace ovcd::kernels {

using Histogram = std::array<std::uint64_t, 256>;
using Lut = std::array<std::uint8_t, 256>;

struct TileView {
  int x = 0, y = 0, w = 0, h = 0;
  std::span<const float> values;  // w*h row-major
};

enum class MergeRule { Mean, Max };

struct Confusion {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

// Round half away from zero, clamp to [0,255].
std::uint8_t round_clamp_u8(double v);

namespace serial {

// Histogram of one channel of interleaved data.
Histogram channel_histogram(std::span<const std::uint8_t> data, int channels,
                            int channel);

// dst[i*channels + c] = luts[c][src[i*channels + c]]
void apply_luts(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst,
                int channels, std::span<const Lut> luts);

// round_clamp_u8((1-lambda)*a + lambda*b)
void blend(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
           double lambda, std::span<std::uint8_t> out);

// Reduces overlapping tiles into a width*height map in tile-list order.
// Pixels covered by no tile are left at 0.
void merge_tiles(std::span<const TileView> tiles, int width, int height,
                 MergeRule rule, std::span<float> out);

// out = local where label == 0; otherwise local + w*(global - local) with
// w = weight_by_label[label], taking the w == 0 and w == 1 endpoints exactly.
void blend_by_label(std::span<const float> local, std::span<const float> global,
                    std::span<const std::int32_t> labels,
                    std::span<const double> weight_by_label,
                    std::span<float> out);

Confusion confusion(std::span<const std::uint8_t> pred,
                    std::span<const std::uint8_t> gt);

// Bilinear resample, pixel-centre aligned, edges clamped.
void resize_bilinear(std::span<const float> src, int src_w, int src_h,
                     std::span<float> dst, int dst_w, int dst_h);

// Area-average downsample of interleaved 8-bit data.
void resize_area_u8(std::span<const std::uint8_t> src, int src_w, int src_h,
                    int channels, std::span<std::uint8_t> dst, int dst_w,
                    int dst_h);

}  // namespace serial

namespace parallel {

Histogram channel_histogram(std::span<const std::uint8_t> data, int channels,
                            int channel);
void apply_luts(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst,
                int channels, std::span<const Lut> luts);
void blend(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
           double lambda, std::span<std::uint8_t> out);
void merge_tiles(std::span<const TileView> tiles, int width, int height,
                 MergeRule rule, std::span<float> out);
void blend_by_label(std::span<const float> local, std::span<const float> global,
                    std::span<const std::int32_t> labels,
                    std::span<const double> weight_by_label,
                    std::span<float> out);
Confusion confusion(std::span<const std::uint8_t> pred,
                    std::span<const std::uint8_t> gt);
void resize_bilinear(std::span<const float> src, int src_w, int src_h,
                     std::span<float> dst, int dst_w, int dst_h);
void resize_area_u8(std::span<const std::uint8_t> src, int src_w, int src_h,
                    int channels, std::span<std::uint8_t> dst, int dst_w,
                    int dst_h);

}  // namespace parallel

}  // namespace ovcd::kernels
