#pragma once

// Deterministic in-process backend over scenes whose object colours encode
// categories in disjoint hue bands. Lets the whole pipeline run without any
// foundation model.

#include <array>
#include <optional>
#include <span>
#include <cstdint>
#include <string>
#include <vector>

#include "ovcd/backends.hpp"

namespace ovcd::synthetic {

struct Hsv {
  double h = 0.0;  // degrees [0,360)
  double s = 0.0;  // [0,1]
  double v = 0.0;  // [0,1]
};

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);
std::array<std::uint8_t, 3> hsv_to_rgb(const Hsv& hsv);
double hue_distance(double a, double b);

struct Category {
  std::string name;
  double hue = 0.0;
  std::vector<std::string> synonyms;  // includes name
};

// Scene categories. Band centres are far enough apart that the wide tracker
// bands stay disjoint.
const std::vector<Category>& categories();
const Category* find_category(const std::string& name);
// Prompt string -> category, or nullptr for out-of-vocabulary prompts.
const Category* category_for_prompt(const std::string& prompt);

// Band tolerances.
struct BandParams {
  double hue_half_width;
  double min_saturation;
  double min_value;
};
inline constexpr BandParams kTextBand{20.0, 0.40, 0.30};
inline constexpr BandParams kTrackerBand{35.0, 0.25, 0.15};
// An exemplar re-centres the band on its own hue and lowers the saturation
// floor to kExemplarSaturationRatio times its own saturation (never below
// kExemplarBand.min_saturation). Exemplars less saturated than
// kExemplarMinSaturation carry no usable hue and are ignored.
inline constexpr BandParams kExemplarBand{20.0, 0.20, 0.30};
inline constexpr double kExemplarSaturationRatio = 0.6;
inline constexpr double kExemplarMinSaturation = 0.15;

// Band an exemplar of colour `rgb` (components in [0,1]) induces, with its
// hue centre; nullopt when the exemplar is too grey to carry a hue.
struct ExemplarBand {
  double hue;
  BandParams band;
};
std::optional<ExemplarBand> exemplar_band(std::span<const double> rgb);

// Signed band score: positive iff the colour lies inside the band.
double band_score(const Hsv& hsv, double hue_center, const BandParams& band);

// Index into categories() of the tracker band the colour falls in, or -1.
int tracker_band(const Hsv& hsv);

class SyntheticSegmenter final : public Segmenter {
 public:
  explicit SyntheticSegmenter(int max_concurrency = 8)
      : max_concurrency_(max_concurrency) {}
  SegmenterCapabilities capabilities() const override {
    return {1 << 15, max_concurrency_};
  }
  SegmentResult segment(const RasterImage& image,
                        const PromptSpec& prompt) const override;

 private:
  int max_concurrency_;
};

// Per-cell mean of RGB/255 over stride x stride cells (D = 3).
class SyntheticFeatureExtractor final : public FeatureExtractor {
 public:
  explicit SyntheticFeatureExtractor(int stride = 4) : stride_(stride) {}
  int dim() const override { return 3; }
  int stride() const override { return stride_; }
  FeatureMap extract(const RasterImage& image) const override;

 private:
  int stride_;
};

// Tracks the majority tracker band under the initial mask frame by frame:
// mask_f = dilate(mask_{f-1}, 1) restricted to pixels of that band. Output
// confidence is the band-match score 1 - (dh / half_width)^2 inside the mask.
class SyntheticPropagator final : public MaskPropagator {
 public:
  int max_sessions() const override { return 8; }
  TrackResult propagate(const BitMask& init_mask,
                        std::span<const RasterImage> frames) const override;
};

Backends make_backends(int feature_stride = 4);

}  // namespace ovcd::synthetic
