#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kernel_detail.hpp"
#include "ovcd/kernels.hpp"

namespace ovcd::kernels {

std::uint8_t round_clamp_u8(double v) {
  const double r = std::round(v);  // half away from zero
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

namespace serial {

Histogram channel_histogram(std::span<const std::uint8_t> data, int channels,
                            int channel) {
  Histogram h{};
  for (std::size_t i = channel; i < data.size(); i += channels) ++h[data[i]];
  return h;
}

void apply_luts(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst,
                int channels, std::span<const Lut> luts) {
  const std::size_t n = src.size() / channels;
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < channels; ++c) {
      dst[i * channels + c] = luts[c][src[i * channels + c]];
    }
  }
}

void blend(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
           double lambda, std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = detail::blend_one(a[i], b[i], lambda);
  }
}

void merge_tiles(std::span<const TileView> tiles, int width, int height,
                 MergeRule rule, std::span<float> out) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<double> sum(n, 0.0);
  std::vector<float> best(n, -std::numeric_limits<float>::infinity());
  std::vector<int> count(n, 0);
  for (const TileView& t : tiles) {
    for (int ty = 0; ty < t.h; ++ty) {
      for (int tx = 0; tx < t.w; ++tx) {
        const std::size_t p = static_cast<std::size_t>(t.y + ty) * width + t.x + tx;
        const float v = t.values[static_cast<std::size_t>(ty) * t.w + tx];
        sum[p] += v;
        best[p] = std::max(best[p], v);
        ++count[p];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (count[p] == 0) {
      out[p] = 0.0f;
    } else if (rule == MergeRule::Mean) {
      out[p] = static_cast<float>(sum[p] / count[p]);
    } else {
      out[p] = best[p];
    }
  }
}

void blend_by_label(std::span<const float> local, std::span<const float> global,
                    std::span<const std::int32_t> labels,
                    std::span<const double> weight_by_label,
                    std::span<float> out) {
  for (std::size_t i = 0; i < local.size(); ++i) {
    const std::int32_t l = labels[i];
    out[i] = l == 0 ? local[i]
                    : detail::blend_logit(local[i], global[i], weight_by_label[l]);
  }
}

Confusion confusion(std::span<const std::uint8_t> pred,
                    std::span<const std::uint8_t> gt) {
  Confusion c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] != 0;
    const bool g = gt[i] != 0;
    c.tp += p && g;
    c.fp += p && !g;
    c.fn += !p && g;
    c.tn += !p && !g;
  }
  return c;
}

void resize_bilinear(std::span<const float> src, int src_w, int src_h,
                     std::span<float> dst, int dst_w, int dst_h) {
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
  for (int y = 0; y < dst_h; ++y) {
    for (int x = 0; x < dst_w; ++x) {
      detail::area_pixel(src, src_w, src_h, channels, x, y, dst_w, dst_h,
                         dst.data() + (static_cast<std::size_t>(y) * dst_w + x) * channels);
    }
  }
}

}  // namespace serial
}  // namespace ovcd::kernels
