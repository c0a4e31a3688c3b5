#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ovcd {

// H x W x 3 interleaved 8-bit image.
class RasterImage {
 public:
  static constexpr int kChannels = 3;

  RasterImage() = default;
  RasterImage(int width, int height, std::uint8_t fill = 0);
  RasterImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  bool empty() const { return data_.empty(); }

  std::uint8_t& at(int x, int y, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }

  std::span<std::uint8_t> data() { return data_; }
  std::span<const std::uint8_t> data() const { return data_; }

  bool operator==(const RasterImage&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Binary mask stored one byte per pixel (0 or 1).
class BitMask {
 public:
  BitMask() = default;
  BitMask(int width, int height, bool fill = false);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }

  bool get(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool v = true) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v = true) { bits_[i] = v ? 1 : 0; }

  std::span<std::uint8_t> bits() { return bits_; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t count() const;
  bool none() const { return count() == 0; }

  bool operator==(const BitMask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Real-valued per-pixel map (logits, confidences).
class ScalarMap {
 public:
  ScalarMap() = default;
  ScalarMap(int width, int height, float fill = 0.0f);
  ScalarMap(int width, int height, std::vector<float> values);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  float& at(int x, int y) {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  float at(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  float& operator[](std::size_t i) { return values_[i]; }
  float operator[](std::size_t i) const { return values_[i]; }

  std::span<float> values() { return values_; }
  std::span<const float> values() const { return values_; }

  bool all_finite() const;

  bool operator==(const ScalarMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
};

struct BoundingBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive corners
};

struct Component {
  int id = 0;
  std::size_t area = 0;
  BoundingBox bbox;
  std::vector<std::int32_t> pixels;  // linear indices, ascending
};

// Label map plus per-component summaries. Ids run 1..R in raster-scan order
// of each component's first pixel; 0 is background.
struct LabeledComponents {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> label_map;
  std::vector<Component> components;
};

enum class Connectivity { Four = 4, Eight = 8 };

LabeledComponents connected_components(const BitMask& mask,
                                       Connectivity connectivity);

// Keeps components with area >= a_min and relabels them 1..R' in order.
LabeledComponents filter_by_area(const LabeledComponents& comps,
                                 std::size_t a_min);

BitMask mask_intersect(const BitMask& a, const BitMask& b);
BitMask mask_union(const BitMask& a, const BitMask& b);
std::size_t mask_area(const BitMask& a);
// |a & b| / |a | b|; 1.0 when both masks are empty.
double mask_iou(const BitMask& a, const BitMask& b);

BitMask mask_from_pixels(int width, int height,
                         std::span<const std::int32_t> pixels);

void require_same_dims(int w0, int h0, int w1, int h1, const char* what);

template <class A, class B>
void require_same_dims(const A& a, const B& b, const char* what) {
  require_same_dims(a.width(), a.height(), b.width(), b.height(), what);
}

}  // namespace ovcd
