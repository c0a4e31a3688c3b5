#include "ovcd/bridge.hpp"

#include <string>

#include "ovcd/error.hpp"

namespace ovcd {

const char* to_string(Direction d) {
  return d == Direction::Forward ? "1->2" : "2->1";
}

kernels::Lut cdf_inversion_lut(const kernels::Histogram& source,
                               const kernels::Histogram& reference) {
  std::uint64_t n_src = 0;
  std::uint64_t n_ref = 0;
  for (int v = 0; v < 256; ++v) {
    n_src += source[v];
    n_ref += reference[v];
  }
  kernels::Lut lut{};
  if (n_src == 0 || n_ref == 0) {
    for (int v = 0; v < 256; ++v) lut[v] = static_cast<std::uint8_t>(v);
    return lut;
  }
  // CDF_ref(r) >= CDF_src(v)  <=>  cum_ref[r] * n_src >= cum_src[v] * n_ref,
  // compared in integers. Both CDFs are monotone so r only moves forward.
  std::uint64_t cum_src = 0;
  std::uint64_t cum_ref = reference[0];
  int r = 0;
  for (int v = 0; v < 256; ++v) {
    cum_src += source[v];
    while (r < 255 && cum_ref * n_src < cum_src * n_ref) {
      ++r;
      cum_ref += reference[r];
    }
    lut[v] = static_cast<std::uint8_t>(r);
  }
  return lut;
}

std::array<kernels::Lut, 3> histogram_match_luts(const RasterImage& source,
                                                 const RasterImage& reference) {
  std::array<kernels::Lut, 3> luts{};
  for (int c = 0; c < RasterImage::kChannels; ++c) {
    const auto hs = kernels::parallel::channel_histogram(
        source.data(), RasterImage::kChannels, c);
    const auto hr = kernels::parallel::channel_histogram(
        reference.data(), RasterImage::kChannels, c);
    luts[c] = cdf_inversion_lut(hs, hr);
  }
  return luts;
}

RasterImage histogram_match(const RasterImage& source,
                            const RasterImage& reference) {
  const auto luts = histogram_match_luts(source, reference);
  RasterImage out(source.width(), source.height());
  kernels::parallel::apply_luts(source.data(), out.data(),
                                RasterImage::kChannels, luts);
  return out;
}

std::vector<double> bridge_lambdas(int k) {
  if (k < 0) throw InvalidArgument("transition frame count must be >= 0");
  std::vector<double> lambdas;
  lambdas.reserve(k);
  for (int i = 1; i <= k; ++i) {
    lambdas.push_back(static_cast<double>(i) / static_cast<double>(k + 1));
  }
  return lambdas;
}

BridgedSequence build_bridged_sequence(const RasterImage& t_src,
                                       const RasterImage& t_dst, int k,
                                       Direction direction) {
  require_same_dims(t_src, t_dst, "build_bridged_sequence");
  BridgedSequence seq;
  seq.direction = direction;
  seq.lambdas = bridge_lambdas(k);
  seq.frames.reserve(k + 2);
  seq.frames.push_back(t_src);
  if (k > 0) {
    const RasterImage aligned = histogram_match(t_src, t_dst);
    for (double lambda : seq.lambdas) {
      RasterImage frame(t_src.width(), t_src.height());
      kernels::parallel::blend(aligned.data(), t_dst.data(), lambda, frame.data());
      seq.frames.push_back(std::move(frame));
    }
  }
  seq.frames.push_back(t_dst);
  return seq;
}

}  // namespace ovcd
