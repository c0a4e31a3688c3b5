#include "ovcd/inference.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "ovcd/error.hpp"

namespace ovcd {

namespace {

std::vector<int> axis_origins(int n, int tile, int stride) {
  if (n <= tile) return {0};
  std::vector<int> origins;
  for (int pos = 0;; pos += stride) {
    if (pos + tile >= n) {
      origins.push_back(n - tile);
      break;
    }
    origins.push_back(pos);
  }
  origins.erase(std::unique(origins.begin(), origins.end()), origins.end());
  return origins;
}

SegmentResult checked_segment(const Segmenter& seg, const RasterImage& image,
                              const PromptSpec& prompt) {
  SegmentResult r = seg.segment(image, prompt);
  validate_segment_result(r, image.width(), image.height(), prompt);
  return r;
}

void max_into(PresenceScores& acc, const PresenceScores& more) {
  for (const auto& [k, v] : more) {
    auto [it, inserted] = acc.emplace(k, v);
    if (!inserted) it->second = std::max(it->second, v);
  }
}

}  // namespace

TilePlan plan_tiles(int width, int height, int tile_size, int stride) {
  if (width < 1 || height < 1) throw InvalidArgument("plan_tiles: empty image");
  if (tile_size < 1) throw InvalidArgument("plan_tiles: tile_size must be positive");
  if (stride < 1 || stride > tile_size) {
    throw InvalidArgument("plan_tiles: stride must be in [1, tile_size], got " +
                          std::to_string(stride));
  }
  TilePlan plan{tile_size, stride, {}};
  const auto xs = axis_origins(width, tile_size, stride);
  const auto ys = axis_origins(height, tile_size, stride);
  const int tw = std::min(tile_size, width);
  const int th = std::min(tile_size, height);
  for (int y : ys) {
    for (int x : xs) plan.rects.push_back({x, y, tw, th});
  }
  return plan;
}

BitMask support_of(const ScalarMap& logits) {
  BitMask m(logits.width(), logits.height());
  for (std::size_t i = 0; i < logits.size(); ++i) m.set(i, logits[i] > 0.0f);
  return m;
}

RasterImage crop(const RasterImage& image, const TileRect& r) {
  RasterImage out(r.w, r.h);
  for (int y = 0; y < r.h; ++y) {
    const auto src = image.data().subspan(
        (static_cast<std::size_t>(r.y + y) * image.width() + r.x) * 3,
        static_cast<std::size_t>(r.w) * 3);
    std::copy(src.begin(), src.end(),
              out.data().begin() + static_cast<std::ptrdiff_t>(y) * r.w * 3);
  }
  return out;
}

RasterImage resize_image(const RasterImage& image, int width, int height) {
  RasterImage out(width, height);
  kernels::parallel::resize_area_u8(image.data(), image.width(), image.height(), 3,
                                    out.data(), width, height);
  return out;
}

InferenceOutput run_local(const RasterImage& image, const PromptSpec& prompt,
                          const TilePlan& plan, const Segmenter& seg,
                          MergeRule rule) {
  const int n = static_cast<int>(plan.rects.size());
  if (n == 0) throw InvalidArgument("run_local: empty tile plan");
  for (const TileRect& r : plan.rects) {
    if (r.x < 0 || r.y < 0 || r.w < 1 || r.h < 1 || r.x + r.w > image.width() ||
        r.y + r.h > image.height()) {
      throw InvalidArgument("run_local: tile outside image bounds");
    }
  }

  std::vector<SegmentResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  const int window = std::max(1, std::min(seg.capabilities().max_concurrency,
                                          omp_get_max_threads()));
#pragma omp parallel for schedule(dynamic) num_threads(window)
  for (int i = 0; i < n; ++i) {
    try {
      results[i] = checked_segment(seg, crop(image, plan.rects[i]), prompt);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw BackendError("segmenter failed on tile " + std::to_string(i) + ": " +
                         e.what());
    }
  }

  std::vector<kernels::TileView> views;
  views.reserve(n);
  InferenceOutput out;
  for (int i = 0; i < n; ++i) {
    const TileRect& r = plan.rects[i];
    views.push_back({r.x, r.y, r.w, r.h, results[i].logits.values()});
    max_into(out.presence, results[i].presence);
  }
  out.logits = ScalarMap(image.width(), image.height());
  kernels::parallel::merge_tiles(views, image.width(), image.height(), rule,
                                 out.logits.values());
  out.support = support_of(out.logits);
  return out;
}

InferenceOutput run_global(const RasterImage& image, const PromptSpec& prompt,
                           const Segmenter& seg, double downscale) {
  if (!(downscale > 0.0 && downscale <= 1.0)) {
    throw InvalidArgument("global downscale must be in (0, 1]");
  }
  const int longest = std::max(image.width(), image.height());
  const int max_side = seg.capabilities().max_side;
  double scale = downscale;
  if (longest * scale > max_side) scale = static_cast<double>(max_side) / longest;

  InferenceOutput out;
  if (scale == 1.0) {
    SegmentResult r = checked_segment(seg, image, prompt);
    out.logits = std::move(r.logits);
    out.presence = std::move(r.presence);
  } else {
    const int w = std::max(1, static_cast<int>(std::lround(image.width() * scale)));
    const int h = std::max(1, static_cast<int>(std::lround(image.height() * scale)));
    SegmentResult r = checked_segment(seg, resize_image(image, w, h), prompt);
    out.logits = ScalarMap(image.width(), image.height());
    kernels::parallel::resize_bilinear(r.logits.values(), w, h, out.logits.values(),
                                       image.width(), image.height());
    out.presence = std::move(r.presence);
  }
  out.support = support_of(out.logits);
  return out;
}

}  // namespace ovcd
