#pragma once

// Per-element bodies shared by the serial and OpenMP kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

#include "ovcd/kernels.hpp"

namespace ovcd::kernels::detail {

inline std::uint8_t blend_one(std::uint8_t a, std::uint8_t b, double lambda) {
  return round_clamp_u8((1.0 - lambda) * a + lambda * b);
}

inline float blend_logit(float local, float global, double w) {
  if (w == 0.0) return local;
  if (w == 1.0) return global;
  return static_cast<float>(static_cast<double>(local) +
                            w * (static_cast<double>(global) - local));
}

struct Tap {
  int i0, i1;
  double f;
};

inline Tap bilinear_tap(int dst, int dst_n, int src_n) {
  double s = (dst + 0.5) * static_cast<double>(src_n) / dst_n - 0.5;
  s = std::clamp(s, 0.0, static_cast<double>(src_n - 1));
  const int i0 = static_cast<int>(std::floor(s));
  const int i1 = std::min(i0 + 1, src_n - 1);
  return {i0, i1, s - i0};
}

inline float bilinear_at(std::span<const float> src, int src_w, const Tap& tx,
                         const Tap& ty) {
  const double v00 = src[static_cast<std::size_t>(ty.i0) * src_w + tx.i0];
  const double v01 = src[static_cast<std::size_t>(ty.i0) * src_w + tx.i1];
  const double v10 = src[static_cast<std::size_t>(ty.i1) * src_w + tx.i0];
  const double v11 = src[static_cast<std::size_t>(ty.i1) * src_w + tx.i1];
  const double top = v00 + tx.f * (v01 - v00);
  const double bot = v10 + tx.f * (v11 - v10);
  return static_cast<float>(top + ty.f * (bot - top));
}

inline void area_span(int dst, int dst_n, int src_n, int& lo, int& hi) {
  lo = static_cast<int>(static_cast<long long>(dst) * src_n / dst_n);
  hi = static_cast<int>(static_cast<long long>(dst + 1) * src_n / dst_n);
  hi = std::clamp(hi, lo + 1, src_n);
}

inline void area_pixel(std::span<const std::uint8_t> src, int src_w, int src_h,
                       int channels, int x, int y, int dst_w, int dst_h,
                       std::uint8_t* out) {
  int x0, x1, y0, y1;
  area_span(x, dst_w, src_w, x0, x1);
  area_span(y, dst_h, src_h, y0, y1);
  for (int c = 0; c < channels; ++c) {
    std::uint64_t sum = 0;
    for (int sy = y0; sy < y1; ++sy) {
      for (int sx = x0; sx < x1; ++sx) {
        sum += src[(static_cast<std::size_t>(sy) * src_w + sx) * channels + c];
      }
    }
    const double n = static_cast<double>(x1 - x0) * (y1 - y0);
    out[c] = round_clamp_u8(static_cast<double>(sum) / n);
  }
}

}  // namespace ovcd::kernels::detail
