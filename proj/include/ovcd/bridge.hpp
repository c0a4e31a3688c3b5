#pragma once

#include <array>
#include <vector>

#include "ovcd/kernels.hpp"
#include "ovcd/raster.hpp"

namespace ovcd {

enum class Direction { Forward, Backward };  // 1->2, 2->1

const char* to_string(Direction d);

// Ordered frames {src, T(1..K), dst}; lambdas[k-1] = k / (K+1).
struct BridgedSequence {
  std::vector<RasterImage> frames;
  std::vector<double> lambdas;
  Direction direction = Direction::Forward;

  int transition_count() const { return static_cast<int>(lambdas.size()); }
  const RasterImage& source() const { return frames.front(); }
  const RasterImage& destination() const { return frames.back(); }
};

// Per-channel CDF-inversion lookup tables: each source intensity v maps to the
// smallest reference intensity r with CDF_ref(r) >= CDF_src(v).
std::array<kernels::Lut, 3> histogram_match_luts(const RasterImage& source,
                                                 const RasterImage& reference);

kernels::Lut cdf_inversion_lut(const kernels::Histogram& source,
                               const kernels::Histogram& reference);

// Channel-wise histogram matching of `source` onto `reference`'s intensity
// distribution. Dimensions may differ; the output has source's dimensions.
RasterImage histogram_match(const RasterImage& source,
                            const RasterImage& reference);

// Blend coefficients k/(K+1), k = 1..K.
std::vector<double> bridge_lambdas(int k);

// Builds {t_src, T(1..k), t_dst} with T(k) = (1-l_k) H(t_src|t_dst) + l_k t_dst.
BridgedSequence build_bridged_sequence(const RasterImage& t_src,
                                       const RasterImage& t_dst, int k,
                                       Direction direction = Direction::Forward);

}  // namespace ovcd
