#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "kernel_detail.hpp"
#include "ovcd/kernels.hpp"

namespace ovcd::kernels::parallel {

Histogram channel_histogram(std::span<const std::uint8_t> data, int channels,
                            int channel) {
  Histogram h{};
  const std::int64_t n = static_cast<std::int64_t>(data.size() / channels);
#pragma omp parallel
  {
    Histogram local{};
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) ++local[data[i * channels + channel]];
#pragma omp critical
    for (int v = 0; v < 256; ++v) h[v] += local[v];
  }
  return h;
}

void apply_luts(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst,
                int channels, std::span<const Lut> luts) {
  const std::int64_t n = static_cast<std::int64_t>(src.size() / channels);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    for (int c = 0; c < channels; ++c) {
      dst[i * channels + c] = luts[c][src[i * channels + c]];
    }
  }
}

void blend(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
           double lambda, std::span<std::uint8_t> out) {
  const std::int64_t n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = detail::blend_one(a[i], b[i], lambda);
  }
}

void merge_tiles(std::span<const TileView> tiles, int width, int height,
                 MergeRule rule, std::span<float> out) {
  // Row-parallel: each row visits tiles in list order, matching the serial
  // accumulation order per pixel.
#pragma omp parallel
  {
    std::vector<double> sum(width);
    std::vector<float> best(width);
    std::vector<int> count(width);
#pragma omp for schedule(static)
    for (int y = 0; y < height; ++y) {
      std::fill(sum.begin(), sum.end(), 0.0);
      std::fill(best.begin(), best.end(), -std::numeric_limits<float>::infinity());
      std::fill(count.begin(), count.end(), 0);
      for (const TileView& t : tiles) {
        if (y < t.y || y >= t.y + t.h) continue;
        const float* row = t.values.data() + static_cast<std::size_t>(y - t.y) * t.w;
        for (int tx = 0; tx < t.w; ++tx) {
          sum[t.x + tx] += row[tx];
          best[t.x + tx] = std::max(best[t.x + tx], row[tx]);
          ++count[t.x + tx];
        }
      }
      float* dst = out.data() + static_cast<std::size_t>(y) * width;
      for (int x = 0; x < width; ++x) {
        if (count[x] == 0) {
          dst[x] = 0.0f;
        } else if (rule == MergeRule::Mean) {
          dst[x] = static_cast<float>(sum[x] / count[x]);
        } else {
          dst[x] = best[x];
        }
      }
    }
  }
}

void blend_by_label(std::span<const float> local, std::span<const float> global,
                    std::span<const std::int32_t> labels,
                    std::span<const double> weight_by_label,
                    std::span<float> out) {
  const std::int64_t n = static_cast<std::int64_t>(local.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int32_t l = labels[i];
    out[i] = l == 0 ? local[i]
                    : detail::blend_logit(local[i], global[i], weight_by_label[l]);
  }
}

Confusion confusion(std::span<const std::uint8_t> pred,
                    std::span<const std::uint8_t> gt) {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  const std::int64_t n = static_cast<std::int64_t>(pred.size());
#pragma omp parallel for schedule(static) reduction(+ : tp, fp, fn, tn)
  for (std::int64_t i = 0; i < n; ++i) {
    const bool p = pred[i] != 0;
    const bool g = gt[i] != 0;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
    tn += !p && !g;
  }
  return {tp, fp, fn, tn};
}

void resize_bilinear(std::span<const float> src, int src_w, int src_h,
                     std::span<float> dst, int dst_w, int dst_h) {
#pragma omp parallel for schedule(static)
  for (int y = 0; y < dst_h; ++y) {
    const auto ty = detail::bilinear_tap(y, dst_h, src_h);
    for (int x = 0; x < dst_w; ++x) {
      const auto tx = detail::bilinear_tap(x, dst_w, src_w);
      dst[static_cast<std::size_t>(y) * dst_w + x] =
          detail::bilinear_at(src, src_w, tx, ty);
    }
  }
}

void resize_area_u8(std::span<const std::uint8_t> src, int src_w, int src_h,
                    int channels, std::span<std::uint8_t> dst, int dst_w,
                    int dst_h) {
#pragma omp parallel for schedule(static)
  for (int y = 0; y < dst_h; ++y) {
    for (int x = 0; x < dst_w; ++x) {
      detail::area_pixel(src, src_w, src_h, channels, x, y, dst_w, dst_h,
                         dst.data() + (static_cast<std::size_t>(y) * dst_w + x) * channels);
    }
  }
}

}  // namespace ovcd::kernels::parallel
