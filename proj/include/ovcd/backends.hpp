#pragma once

#include <memory>
#include <span>

#include "ovcd/raster.hpp"
#include "ovcd/types.hpp"

namespace ovcd {

struct SegmentResult {
  ScalarMap logits;  // 0 is the calibrated decision boundary
  PresenceScores presence;
};

struct TrackResult {
  BitMask mask;
  ScalarMap confidence;  // in [0,1]
};

struct SegmenterCapabilities {
  int max_side = 1 << 15;
  int max_concurrency = 1;
};

// Promptable open-vocabulary segmenter.
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual SegmenterCapabilities capabilities() const = 0;
  virtual SegmentResult segment(const RasterImage& image,
                                const PromptSpec& prompt) const = 0;
};

class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual int dim() const = 0;
  virtual int stride() const = 0;
  virtual FeatureMap extract(const RasterImage& image) const = 0;
};

// Video-style mask tracker: prompt on frames[0], return final-frame output.
class MaskPropagator {
 public:
  virtual ~MaskPropagator() = default;
  virtual int max_sessions() const = 0;
  virtual TrackResult propagate(const BitMask& init_mask,
                                std::span<const RasterImage> frames) const = 0;
};

struct Backends {
  std::shared_ptr<const Segmenter> segmenter;
  std::shared_ptr<const FeatureExtractor> features;
  std::shared_ptr<const MaskPropagator> tracker;
};

// Contract checks applied to every backend response before it reaches the
// pipeline. Violations throw SchemaViolation.
void validate_segment_result(const SegmentResult& r, int width, int height,
                             const PromptSpec& prompt);
void validate_feature_map(const FeatureMap& f, int width, int height,
                          int expected_dim, int expected_stride);
void validate_track_result(const TrackResult& r, int width, int height);

}  // namespace ovcd
