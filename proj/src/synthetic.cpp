#include "ovcd/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "ovcd/error.hpp"

namespace ovcd::synthetic {

Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = r8 / 255.0;
  const double g = g8 / 255.0;
  const double b = b8 / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? d / mx : 0.0;
  if (d <= 0.0) {
    out.h = 0.0;
  } else if (mx == r) {
    out.h = 60.0 * std::fmod((g - b) / d + 6.0, 6.0);
  } else if (mx == g) {
    out.h = 60.0 * ((b - r) / d + 2.0);
  } else {
    out.h = 60.0 * ((r - g) / d + 4.0);
  }
  return out;
}

std::array<std::uint8_t, 3> hsv_to_rgb(const Hsv& hsv) {
  const double h = std::fmod(std::fmod(hsv.h, 360.0) + 360.0, 360.0) / 60.0;
  const double c = hsv.v * hsv.s;
  const double x = c * (1.0 - std::fabs(std::fmod(h, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = hsv.v - c;
  auto to8 = [&](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::round((v + m) * 255.0), 0.0, 255.0));
  };
  return {to8(r), to8(g), to8(b)};
}

double hue_distance(double a, double b) {
  const double d = std::fabs(std::fmod(a - b, 360.0));
  return d > 180.0 ? 360.0 - d : d;
}

const std::vector<Category>& categories() {
  static const std::vector<Category> kCategories = {
      {"building", 20.0, {"building", "house", "rooftop"}},
      {"vegetation", 115.0, {"vegetation", "tree", "forest"}},
      {"water", 215.0, {"water", "lake", "river"}},
  };
  return kCategories;
}

const Category* find_category(const std::string& name) {
  for (const auto& c : categories()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Category* category_for_prompt(const std::string& prompt) {
  for (const auto& c : categories()) {
    if (std::find(c.synonyms.begin(), c.synonyms.end(), prompt) != c.synonyms.end()) {
      return &c;
    }
  }
  return nullptr;
}

double band_score(const Hsv& hsv, double hue_center, const BandParams& band) {
  const double hue_term =
      (band.hue_half_width - hue_distance(hsv.h, hue_center)) / band.hue_half_width;
  const double sat_term = (hsv.s - band.min_saturation) / (1.0 - band.min_saturation);
  const double val_term = (hsv.v - band.min_value) / (1.0 - band.min_value);
  return std::min({hue_term, sat_term, val_term});
}

int tracker_band(const Hsv& hsv) {
  const auto& cats = categories();
  for (std::size_t i = 0; i < cats.size(); ++i) {
    if (band_score(hsv, cats[i].hue, kTrackerBand) > 0.0) return static_cast<int>(i);
  }
  return -1;
}

std::optional<ExemplarBand> exemplar_band(std::span<const double> rgb) {
  if (rgb.size() != 3) return std::nullopt;
  auto to8 = [](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::round(v * 255.0), 0.0, 255.0));
  };
  const Hsv hsv = rgb_to_hsv(to8(rgb[0]), to8(rgb[1]), to8(rgb[2]));
  if (hsv.s < kExemplarMinSaturation) return std::nullopt;
  BandParams band = kExemplarBand;
  band.min_saturation = std::max(band.min_saturation, kExemplarSaturationRatio * hsv.s);
  return ExemplarBand{hsv.h, band};
}

SegmentResult SyntheticSegmenter::segment(const RasterImage& image,
                                          const PromptSpec& prompt) const {
  const int w = image.width();
  const int h = image.height();
  std::vector<const Category*> cats;
  for (const auto& text : prompt.text_prompts) cats.push_back(category_for_prompt(text));

  const bool use_exemplar = prompt.exemplar && prompt.replication > 0;
  if (use_exemplar && prompt.exemplar->vector.size() != 3) {
    throw InvalidArgument("synthetic segmenter expects 3-d exemplars, got " +
                          std::to_string(prompt.exemplar->vector.size()));
  }
  // Replicated exemplar tokens scale the exemplar evidence relative to text.
  const double exemplar_gain =
      use_exemplar ? static_cast<double>(prompt.replication) /
                         (prompt.replication + prompt.text_prompts.size())
                   : 0.0;

  const std::optional<ExemplarBand> ex =
      use_exemplar ? exemplar_band(prompt.exemplar->vector) : std::nullopt;

  SegmentResult out{ScalarMap(w, h, -1.0f), {}};
  std::vector<char> hit(cats.size(), 0);
  const auto data = image.data();
  for (std::size_t p = 0; p < image.pixel_count(); ++p) {
    const std::uint8_t r = data[3 * p], g = data[3 * p + 1], b = data[3 * p + 2];
    const Hsv hsv = rgb_to_hsv(r, g, b);
    const double exemplar_score =
        ex ? exemplar_gain * band_score(hsv, ex->hue, ex->band) : -1.0;
    double best = -1.0;
    for (std::size_t i = 0; i < cats.size(); ++i) {
      if (cats[i] == nullptr) continue;
      const double s = std::max(band_score(hsv, cats[i]->hue, kTextBand), exemplar_score);
      if (s > 0.0) hit[i] = 1;
      best = std::max(best, s);
    }
    out.logits[p] = static_cast<float>(best);
  }
  for (std::size_t i = 0; i < cats.size(); ++i) {
    out.presence[prompt.text_prompts[i]] = hit[i] ? 1.0 : 0.0;
  }
  return out;
}

FeatureMap SyntheticFeatureExtractor::extract(const RasterImage& image) const {
  FeatureMap f;
  f.dim = 3;
  f.stride = stride_;
  f.grid_width = (image.width() + stride_ - 1) / stride_;
  f.grid_height = (image.height() + stride_ - 1) / stride_;
  f.values.assign(static_cast<std::size_t>(f.grid_width) * f.grid_height * 3, 0.0f);
  for (int gy = 0; gy < f.grid_height; ++gy) {
    for (int gx = 0; gx < f.grid_width; ++gx) {
      double sum[3] = {0, 0, 0};
      int n = 0;
      for (int y = gy * stride_; y < std::min((gy + 1) * stride_, image.height()); ++y) {
        for (int x = gx * stride_; x < std::min((gx + 1) * stride_, image.width()); ++x) {
          for (int c = 0; c < 3; ++c) sum[c] += image.at(x, y, c) / 255.0;
          ++n;
        }
      }
      float* cell = f.values.data() + (static_cast<std::size_t>(gy) * f.grid_width + gx) * 3;
      for (int c = 0; c < 3; ++c) cell[c] = static_cast<float>(sum[c] / n);
    }
  }
  return f;
}

TrackResult SyntheticPropagator::propagate(const BitMask& init_mask,
                                           std::span<const RasterImage> frames) const {
  if (frames.empty()) throw InvalidArgument("tracker needs at least one frame");
  const int w = frames[0].width();
  const int h = frames[0].height();
  for (std::size_t f = 0; f < frames.size(); ++f) {
    if (frames[f].width() != w || frames[f].height() != h) {
      throw DimensionMismatch("tracker frame " + std::to_string(f) +
                              " differs in size from frame 0");
    }
  }
  require_same_dims(init_mask.width(), init_mask.height(), w, h, "tracker init mask");

  TrackResult out{BitMask(w, h), ScalarMap(w, h, 0.0f)};
  const auto& cats = categories();

  auto bands_of = [&](const RasterImage& img) {
    std::vector<int> bands(img.pixel_count());
    const auto d = img.data();
    for (std::size_t p = 0; p < bands.size(); ++p) {
      bands[p] = tracker_band(rgb_to_hsv(d[3 * p], d[3 * p + 1], d[3 * p + 2]));
    }
    return bands;
  };

  std::vector<int> bands = bands_of(frames[0]);
  std::vector<std::size_t> votes(cats.size(), 0);
  for (std::size_t p = 0; p < bands.size(); ++p) {
    if (init_mask[p] && bands[p] >= 0) ++votes[bands[p]];
  }
  const auto best_it = std::max_element(votes.begin(), votes.end());
  if (best_it == votes.end() || *best_it == 0) return out;
  const int target = static_cast<int>(best_it - votes.begin());

  std::vector<std::uint8_t> mask(bands.size(), 0);
  for (std::size_t p = 0; p < bands.size(); ++p) {
    mask[p] = init_mask[p] && bands[p] == target;
  }
  for (std::size_t f = 1; f < frames.size(); ++f) {
    bands = bands_of(frames[f]);
    std::vector<std::uint8_t> next(mask.size(), 0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * w + x;
        if (bands[p] != target) continue;
        bool near = false;
        for (int dy = -1; dy <= 1 && !near; ++dy) {
          for (int dx = -1; dx <= 1 && !near; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            near = mask[static_cast<std::size_t>(ny) * w + nx] != 0;
          }
        }
        next[p] = near;
      }
    }
    mask.swap(next);
  }

  const auto last = frames.back().data();
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (!mask[p]) continue;
    out.mask.set(p);
    const Hsv hsv = rgb_to_hsv(last[3 * p], last[3 * p + 1], last[3 * p + 2]);
    const double t = hue_distance(hsv.h, cats[target].hue) / kTrackerBand.hue_half_width;
    out.confidence[p] = static_cast<float>(std::clamp(1.0 - t * t, 0.0, 1.0));
  }
  return out;
}

Backends make_backends(int feature_stride) {
  return {std::make_shared<SyntheticSegmenter>(),
          std::make_shared<SyntheticFeatureExtractor>(feature_stride),
          std::make_shared<SyntheticPropagator>()};
}

}  // namespace ovcd::synthetic
