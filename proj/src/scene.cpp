#include "ovcd/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ovcd/error.hpp"
#include "ovcd/synthetic.hpp"

namespace ovcd::synthetic {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic per-pixel noise in [-amp, amp].
int pixel_noise(std::uint64_t seed, int frame, int x, int y, int c, int amp) {
  if (amp <= 0) return 0;
  std::uint64_t h = splitmix64(seed ^ 0x5eedULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(frame));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(y) << 20 | static_cast<std::uint64_t>(x)));
  h = splitmix64(h ^ static_cast<std::uint64_t>(c));
  return static_cast<int>(h % static_cast<std::uint64_t>(2 * amp + 1)) - amp;
}

std::uint8_t clamp8(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

RasterImage render_frame(const SceneSpec& spec, int frame) {
  RasterImage img(spec.width, spec.height);
  const double phase = static_cast<double>(spec.seed % 97);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      // Low-frequency background shading.
      const int shade = static_cast<int>(
          std::lround(8.0 * std::sin(x / 17.0 + phase) * std::cos(y / 23.0 + phase)));
      for (int c = 0; c < 3; ++c) {
        img.at(x, y, c) = clamp8(spec.background[c] + shade +
                                 pixel_noise(spec.seed, frame, x, y, c, spec.noise_amplitude));
      }
    }
  }
  for (const auto& obj : spec.objects) {
    if (frame == 1 ? !obj.at_t1 : !obj.at_t2) continue;
    const BitMask fp = object_footprint(obj, spec.width, spec.height);
    for (int y = obj.y; y < std::min(obj.y + obj.h, spec.height); ++y) {
      for (int x = obj.x; x < std::min(obj.x + obj.w, spec.width); ++x) {
        if (!fp.get(x, y)) continue;
        for (int c = 0; c < 3; ++c) {
          img.at(x, y, c) = clamp8(obj.color[c] +
                                   pixel_noise(spec.seed, frame, x, y, c, spec.noise_amplitude));
        }
      }
    }
  }
  return img;
}

const char* shape_name(Shape s) { return s == Shape::Rectangle ? "rectangle" : "ellipse"; }

}  // namespace

BitMask object_footprint(const SceneObject& obj, int width, int height) {
  BitMask m(width, height);
  const double cx = obj.x + obj.w / 2.0;
  const double cy = obj.y + obj.h / 2.0;
  const double rx = obj.w / 2.0;
  const double ry = obj.h / 2.0;
  for (int y = std::max(0, obj.y); y < std::min(obj.y + obj.h, height); ++y) {
    for (int x = std::max(0, obj.x); x < std::min(obj.x + obj.w, width); ++x) {
      if (obj.shape == Shape::Ellipse) {
        const double dx = (x + 0.5 - cx) / rx;
        const double dy = (y + 0.5 - cy) / ry;
        if (dx * dx + dy * dy > 1.0) continue;
      }
      m.set(x, y);
    }
  }
  return m;
}

RasterImage apply_nuisance(const RasterImage& image, const Nuisance& n) {
  if (n.is_identity()) return image;
  std::array<std::array<std::uint8_t, 256>, 3> lut{};
  for (int c = 0; c < 3; ++c) {
    for (int v = 0; v < 256; ++v) {
      double u = n.contrast * (v / 255.0 - 0.5) + 0.5 + n.brightness / 255.0;
      u = std::clamp(u, 0.0, 1.0);
      u = std::pow(u, n.gamma[c]);
      lut[c][v] = static_cast<std::uint8_t>(std::clamp(std::round(u * 255.0), 0.0, 255.0));
    }
  }
  RasterImage out = image;
  auto d = out.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = lut[i % 3][d[i]];
  return out;
}

RenderedScene render_scene(const SceneSpec& spec) {
  RenderedScene out;
  out.t1 = render_frame(spec, 1);
  out.t2 = apply_nuisance(render_frame(spec, 2), spec.nuisance);
  for (const auto& cat : categories()) {
    out.footprint_t1[cat.name] = BitMask(spec.width, spec.height);
    out.footprint_t2[cat.name] = BitMask(spec.width, spec.height);
  }
  for (const auto& obj : spec.objects) {
    if (!find_category(obj.category)) {
      throw InvalidArgument("unknown scene category '" + obj.category + "'");
    }
    const BitMask fp = object_footprint(obj, spec.width, spec.height);
    if (obj.at_t1) out.footprint_t1[obj.category] = mask_union(out.footprint_t1[obj.category], fp);
    if (obj.at_t2) out.footprint_t2[obj.category] = mask_union(out.footprint_t2[obj.category], fp);
  }
  for (const auto& cat : categories()) {
    const BitMask& a = out.footprint_t1[cat.name];
    const BitMask& b = out.footprint_t2[cat.name];
    BitMask x(spec.width, spec.height);
    for (std::size_t i = 0; i < x.size(); ++i) x.set(i, a[i] != b[i]);
    out.change[cat.name] = std::move(x);
  }
  return out;
}

SceneSpec generate_scene(std::uint64_t seed, const SceneOptions& options) {
  std::mt19937_64 rng(splitmix64(seed));
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  auto uniform_int = [&](int lo, int hi) {  // inclusive
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  SceneSpec spec;
  spec.seed = seed;
  spec.width = options.width;
  spec.height = options.height;
  spec.background = hsv_to_rgb({uniform(0.0, 360.0), uniform(0.0, 0.06), uniform(0.45, 0.65)});

  const auto& cats = categories();
  const int n_cats = static_cast<int>(cats.size());
  auto object_color = [&](const Category& cat) {
    return hsv_to_rgb({cat.hue + uniform(-4.0, 4.0), uniform(0.55, 0.75), uniform(0.6, 0.85)});
  };

  struct Rect {
    int x, y, w, h;
  };
  std::vector<Rect> placed;
  const int target = uniform_int(options.min_footprints, options.max_footprints);
  const int max_side = std::min({options.max_object_side, options.width - 2 * options.margin,
                                 options.height - 2 * options.margin});
  const int min_side = std::min(options.min_object_side, max_side);
  for (int attempt = 0; attempt < 400 && static_cast<int>(placed.size()) < target; ++attempt) {
    if (max_side < 1) break;
    Rect r{0, 0, uniform_int(min_side, max_side), uniform_int(min_side, max_side)};
    r.x = uniform_int(options.margin, options.width - r.w - options.margin);
    r.y = uniform_int(options.margin, options.height - r.h - options.margin);
    const bool clash = std::any_of(placed.begin(), placed.end(), [&](const Rect& o) {
      return r.x < o.x + o.w + options.margin && o.x < r.x + r.w + options.margin &&
             r.y < o.y + o.h + options.margin && o.y < r.y + r.h + options.margin;
    });
    if (!clash) placed.push_back(r);
  }

  for (std::size_t i = 0; i < placed.size(); ++i) {
    const Rect& r = placed[i];
    SceneObject obj;
    obj.shape = uniform(0.0, 1.0) < 0.5 ? Shape::Rectangle : Shape::Ellipse;
    obj.x = r.x;
    obj.y = r.y;
    obj.w = r.w;
    obj.h = r.h;
    // The first footprints guarantee one persistent object per category.
    const bool seeded = static_cast<int>(i) < n_cats;
    const int cat = seeded ? static_cast<int>(i) : uniform_int(0, n_cats - 1);
    obj.category = cats[cat].name;
    obj.color = object_color(cats[cat]);
    const double story = seeded ? 0.0 : uniform(0.0, 1.0);
    if (story < 0.35) {
      spec.objects.push_back(obj);
    } else if (story < 0.6) {
      obj.at_t1 = false;
      spec.objects.push_back(obj);
    } else if (story < 0.8) {
      obj.at_t2 = false;
      spec.objects.push_back(obj);
    } else {
      obj.at_t2 = false;
      spec.objects.push_back(obj);
      const int other = (cat + uniform_int(1, n_cats - 1)) % n_cats;
      SceneObject repl = obj;
      repl.category = cats[other].name;
      repl.color = object_color(cats[other]);
      repl.at_t1 = false;
      repl.at_t2 = true;
      spec.objects.push_back(repl);
    }
  }

  const double s = options.nuisance_strength;
  if (s > 0.0) {
    spec.nuisance.brightness = uniform(-20.0, 20.0) * s;
    spec.nuisance.contrast = 1.0 + uniform(-0.12, 0.12) * s;
    for (double& g : spec.nuisance.gamma) g = std::exp(uniform(-0.1, 0.1) * s);
  }
  return spec;
}

std::vector<QuerySpec> default_queries() {
  return {
      {"building", {"building", "house", "edifice"}, std::string("building")},
      {"vegetation", {"vegetation", "tree"}, std::string("vegetation")},
      {"water", {"water", "lake"}, std::string("water")},
  };
}

nlohmann::json scene_to_json(const SceneSpec& spec) {
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& o : spec.objects) {
    objects.push_back({{"shape", shape_name(o.shape)},
                       {"x", o.x}, {"y", o.y}, {"w", o.w}, {"h", o.h},
                       {"category", o.category},
                       {"at_t1", o.at_t1}, {"at_t2", o.at_t2},
                       {"color", o.color}});
  }
  return {{"seed", spec.seed},
          {"width", spec.width},
          {"height", spec.height},
          {"background", spec.background},
          {"noise_amplitude", spec.noise_amplitude},
          {"objects", objects},
          {"nuisance",
           {{"brightness", spec.nuisance.brightness},
            {"contrast", spec.nuisance.contrast},
            {"gamma", spec.nuisance.gamma}}}};
}

SceneSpec scene_from_json(const nlohmann::json& j) {
  SceneSpec spec;
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.width = j.at("width").get<int>();
  spec.height = j.at("height").get<int>();
  spec.background = j.at("background").get<std::array<std::uint8_t, 3>>();
  spec.noise_amplitude = j.at("noise_amplitude").get<int>();
  for (const auto& o : j.at("objects")) {
    SceneObject obj;
    obj.shape = o.at("shape").get<std::string>() == "ellipse" ? Shape::Ellipse : Shape::Rectangle;
    obj.x = o.at("x").get<int>();
    obj.y = o.at("y").get<int>();
    obj.w = o.at("w").get<int>();
    obj.h = o.at("h").get<int>();
    obj.category = o.at("category").get<std::string>();
    obj.at_t1 = o.at("at_t1").get<bool>();
    obj.at_t2 = o.at("at_t2").get<bool>();
    obj.color = o.at("color").get<std::array<std::uint8_t, 3>>();
    spec.objects.push_back(obj);
  }
  const auto& n = j.at("nuisance");
  spec.nuisance.brightness = n.at("brightness").get<double>();
  spec.nuisance.contrast = n.at("contrast").get<double>();
  spec.nuisance.gamma = n.at("gamma").get<std::array<double, 3>>();
  return spec;
}

}  // namespace ovcd::synthetic
