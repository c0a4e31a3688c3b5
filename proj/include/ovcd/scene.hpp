#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ovcd/raster.hpp"
#include "ovcd/types.hpp"

namespace ovcd::synthetic {

enum class Shape { Rectangle, Ellipse };

struct SceneObject {
  Shape shape = Shape::Rectangle;
  int x = 0, y = 0, w = 1, h = 1;
  std::string category;
  bool at_t1 = true;
  bool at_t2 = true;
  std::array<std::uint8_t, 3> color{};
};

// Appearance shift applied to t2 only: contrast about mid-grey, additive
// brightness, then per-channel gamma.
struct Nuisance {
  double brightness = 0.0;  // intensity units
  double contrast = 1.0;
  std::array<double, 3> gamma{1.0, 1.0, 1.0};

  bool is_identity() const {
    return brightness == 0.0 && contrast == 1.0 && gamma == std::array{1.0, 1.0, 1.0};
  }
};

struct SceneSpec {
  std::uint64_t seed = 0;
  int width = 128;
  int height = 128;
  std::array<std::uint8_t, 3> background{110, 105, 100};
  int noise_amplitude = 6;
  std::vector<SceneObject> objects;
  Nuisance nuisance;
};

struct RenderedScene {
  RasterImage t1;
  RasterImage t2;
  // Keyed by every category in synthetic::categories().
  std::map<std::string, BitMask> footprint_t1;
  std::map<std::string, BitMask> footprint_t2;
  std::map<std::string, BitMask> change;  // footprint_t1 XOR footprint_t2
};

BitMask object_footprint(const SceneObject& obj, int width, int height);

// Pure function of the spec.
RasterImage apply_nuisance(const RasterImage& image, const Nuisance& n);
RenderedScene render_scene(const SceneSpec& spec);

struct SceneOptions {
  int width = 128;
  int height = 128;
  int min_footprints = 8;
  int max_footprints = 12;
  int min_object_side = 12;
  int max_object_side = 26;
  int margin = 4;
  double nuisance_strength = 1.0;  // 0 disables the t2 appearance shift
};

// Random layout in which every category has at least one persistent object
// plus a mix of appeared, vanished and replaced footprints.
SceneSpec generate_scene(std::uint64_t seed, const SceneOptions& options = {});

// Default query list for the synthetic categories (synonyms first, plus one
// out-of-vocabulary synonym to exercise presence-based selection).
std::vector<QuerySpec> default_queries();

nlohmann::json scene_to_json(const SceneSpec& spec);
SceneSpec scene_from_json(const nlohmann::json& j);

}  // namespace ovcd::synthetic
