#include "ovcd/backends.hpp"

#include <cmath>
#include <string>

#include "ovcd/error.hpp"

namespace ovcd {

void validate_segment_result(const SegmentResult& r, int width, int height,
                             const PromptSpec& prompt) {
  if (r.logits.width() != width || r.logits.height() != height) {
    throw SchemaViolation("segmenter returned " + std::to_string(r.logits.width()) +
                          "x" + std::to_string(r.logits.height()) +
                          " logits for a " + std::to_string(width) + "x" +
                          std::to_string(height) + " image");
  }
  if (!r.logits.all_finite()) {
    throw SchemaViolation("segmenter returned non-finite logits");
  }
  for (const auto& text : prompt.text_prompts) {
    auto it = r.presence.find(text);
    if (it == r.presence.end()) {
      throw SchemaViolation("segmenter omitted presence score for prompt '" +
                            text + "'");
    }
    if (!(it->second >= 0.0 && it->second <= 1.0)) {
      throw SchemaViolation("presence score out of [0,1] for prompt '" + text + "'");
    }
  }
}

void validate_feature_map(const FeatureMap& f, int width, int height,
                          int expected_dim, int expected_stride) {
  if (f.dim != expected_dim || f.stride != expected_stride) {
    throw SchemaViolation("feature map dim/stride changed within a run");
  }
  if (f.dim < 1 || f.stride < 1) {
    throw SchemaViolation("feature map dim and stride must be positive");
  }
  if (static_cast<long long>(f.grid_width) * f.stride < width ||
      static_cast<long long>(f.grid_height) * f.stride < height) {
    throw SchemaViolation("feature grid does not cover the image");
  }
  if (f.values.size() !=
      static_cast<std::size_t>(f.grid_width) * f.grid_height * f.dim) {
    throw SchemaViolation("feature payload size does not match grid");
  }
  for (float v : f.values) {
    if (!std::isfinite(v)) throw SchemaViolation("non-finite feature value");
  }
}

void validate_track_result(const TrackResult& r, int width, int height) {
  if (r.mask.width() != width || r.mask.height() != height ||
      r.confidence.width() != width || r.confidence.height() != height) {
    throw SchemaViolation("tracker output dimensions do not match frames");
  }
  for (float v : r.confidence.values()) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw SchemaViolation("tracker confidence outside [0,1]");
    }
  }
}

}  // namespace ovcd
