#pragma once

#include <vector>

#include "ovcd/backends.hpp"
#include "ovcd/kernels.hpp"

namespace ovcd {

struct TileRect {
  int x = 0, y = 0, w = 0, h = 0;
  bool operator==(const TileRect&) const = default;
};

struct TilePlan {
  int tile_size = 0;
  int stride = 0;
  std::vector<TileRect> rects;
};

using MergeRule = kernels::MergeRule;

// Tile origins at multiples of stride with the last row/column clamped flush
// to the image edge. An axis shorter than tile_size gets one full-length span.
TilePlan plan_tiles(int width, int height, int tile_size, int stride);

// Logit map, its logit > 0 support, and per-prompt presence.
struct InferenceOutput {
  ScalarMap logits;
  BitMask support;
  PresenceScores presence;
};

// Patch-wise inference merged into an image-sized map. Tiles are dispatched
// with at most the segmenter's declared concurrency; the merge is a
// deterministic reduction in plan order. Presence is the max over tiles.
InferenceOutput run_local(const RasterImage& image, const PromptSpec& prompt,
                          const TilePlan& plan, const Segmenter& seg,
                          MergeRule rule = MergeRule::Mean);

// One full-image call, optionally on a downscaled copy with the logits
// bilinearly upsampled back. The scale is further reduced if the image would
// exceed the segmenter's max_side.
InferenceOutput run_global(const RasterImage& image, const PromptSpec& prompt,
                           const Segmenter& seg, double downscale = 1.0);

BitMask support_of(const ScalarMap& logits);
RasterImage crop(const RasterImage& image, const TileRect& rect);
RasterImage resize_image(const RasterImage& image, int width, int height);

}  // namespace ovcd
