#include "random.hpp"

#include <vector>

namespace ovcd::testing {

RasterImage random_image(std::mt19937_64& rng, int width, int height) {
  RasterImage img(width, height);
  std::uniform_int_distribution<int> d(0, 255);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(d(rng));
  return img;
}

BitMask random_mask(std::mt19937_64& rng, int width, int height, double p) {
  BitMask m(width, height);
  std::bernoulli_distribution d(p);
  for (std::size_t i = 0; i < m.size(); ++i) m.set(i, d(rng));
  return m;
}

ScalarMap random_map(std::mt19937_64& rng, int width, int height, float lo, float hi) {
  ScalarMap m(width, height);
  std::uniform_real_distribution<float> d(lo, hi);
  for (auto& v : m.values()) v = d(rng);
  return m;
}

std::vector<std::int32_t> flood_fill_labels(const BitMask& mask, bool eight) {
  const int w = mask.width(), h = mask.height();
  std::vector<std::int32_t> labels(mask.size(), 0);
  std::int32_t next = 0;
  std::vector<int> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int start = y * w + x;
      if (!mask[start] || labels[start]) continue;
      labels[start] = ++next;
      stack.assign(1, start);
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        const int px = p % w, py = p / w;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (!eight && dx != 0 && dy != 0) continue;
            const int nx = px + dx, ny = py + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const int q = ny * w + nx;
            if (mask[q] && !labels[q]) {
              labels[q] = next;
              stack.push_back(q);
            }
          }
        }
      }
    }
  }
  return labels;
}

}  // namespace ovcd::testing
