#include "ovcd/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ovcd/error.hpp"

namespace ovcd {

namespace {

void require_positive(int width, int height) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("raster dimensions must be positive, got " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
}

// Flat union-find with path halving; roots are always the smallest index in
// their set so the root of a component is its first pixel in raster order.
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::int32_t find(std::int32_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

 private:
  std::vector<std::int32_t> parent_;
};

}  // namespace

void require_same_dims(int w0, int h0, int w1, int h1, const char* what) {
  if (w0 != w1 || h0 != h1) {
    throw DimensionMismatch(std::string(what) + ": " + std::to_string(w0) +
                            "x" + std::to_string(h0) + " vs " +
                            std::to_string(w1) + "x" + std::to_string(h1));
  }
}

RasterImage::RasterImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  require_positive(width, height);
  data_.assign(pixel_count() * kChannels, fill);
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  require_positive(width, height);
  if (data_.size() != pixel_count() * kChannels) {
    throw InvalidArgument("image data length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(width) + "x" +
                          std::to_string(height) + "x3");
  }
}

BitMask::BitMask(int width, int height, bool fill)
    : width_(width), height_(height) {
  require_positive(width, height);
  bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t BitMask::count() const {
  return static_cast<std::size_t>(
      std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

ScalarMap::ScalarMap(int width, int height, float fill)
    : width_(width), height_(height) {
  require_positive(width, height);
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

ScalarMap::ScalarMap(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
  require_positive(width, height);
  if (values_.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidArgument("scalar map length does not match dimensions");
  }
}

bool ScalarMap::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](float v) { return std::isfinite(v); });
}

LabeledComponents connected_components(const BitMask& mask,
                                       Connectivity connectivity) {
  const int w = mask.width();
  const int h = mask.height();
  LabeledComponents out;
  out.width = w;
  out.height = h;
  out.label_map.assign(mask.size(), 0);
  if (mask.size() == 0) return out;

  const auto bits = mask.bits();
  DisjointSet sets(mask.size());
  const bool eight = connectivity == Connectivity::Eight;

  // First pass: union with already-visited neighbours (W, NW, N, NE).
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t i = y * w + x;
      if (!bits[i]) continue;
      if (x > 0 && bits[i - 1]) sets.unite(i, i - 1);
      if (y > 0) {
        if (bits[i - w]) sets.unite(i, i - w);
        if (eight) {
          if (x > 0 && bits[i - w - 1]) sets.unite(i, i - w - 1);
          if (x + 1 < w && bits[i - w + 1]) sets.unite(i, i - w + 1);
        }
      }
    }
  }

  // Second pass: roots are first pixels, so ids come out in raster order.
  std::vector<std::int32_t> root_to_id(mask.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t i = y * w + x;
      if (!bits[i]) continue;
      const std::int32_t root = sets.find(i);
      std::int32_t id = root_to_id[root];
      if (id == 0) {
        id = static_cast<std::int32_t>(out.components.size()) + 1;
        root_to_id[root] = id;
        Component c;
        c.id = id;
        c.bbox = {x, y, x, y};
        out.components.push_back(std::move(c));
      }
      out.label_map[i] = id;
      Component& c = out.components[id - 1];
      ++c.area;
      c.pixels.push_back(i);
      c.bbox.x0 = std::min(c.bbox.x0, x);
      c.bbox.x1 = std::max(c.bbox.x1, x);
      c.bbox.y1 = y;
    }
  }
  return out;
}

LabeledComponents filter_by_area(const LabeledComponents& comps,
                                 std::size_t a_min) {
  LabeledComponents out;
  out.width = comps.width;
  out.height = comps.height;
  out.label_map.assign(comps.label_map.size(), 0);
  for (const Component& c : comps.components) {
    if (c.area < a_min) continue;
    Component kept = c;
    kept.id = static_cast<int>(out.components.size()) + 1;
    for (std::int32_t p : kept.pixels) out.label_map[p] = kept.id;
    out.components.push_back(std::move(kept));
  }
  return out;
}

BitMask mask_intersect(const BitMask& a, const BitMask& b) {
  require_same_dims(a, b, "mask_intersect");
  BitMask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a[i] && b[i]);
  return out;
}

BitMask mask_union(const BitMask& a, const BitMask& b) {
  require_same_dims(a, b, "mask_union");
  BitMask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a[i] || b[i]);
  return out;
}

std::size_t mask_area(const BitMask& a) { return a.count(); }

double mask_iou(const BitMask& a, const BitMask& b) {
  require_same_dims(a, b, "mask_iou");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] && b[i]) ? 1 : 0;
    uni += (a[i] || b[i]) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

BitMask mask_from_pixels(int width, int height,
                         std::span<const std::int32_t> pixels) {
  BitMask out(width, height);
  for (std::int32_t p : pixels) out.set(static_cast<std::size_t>(p));
  return out;
}

}  // namespace ovcd
