#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ovcd/bridge.hpp"

namespace ovcd {

// One open-vocabulary query: an id plus synonymous text prompts.
struct QuerySpec {
  std::string query_id;
  std::vector<std::string> prompts;
  std::optional<std::string> category;
};

// Confidence-weighted mean of stable-region features.
struct Exemplar {
  std::vector<double> vector;
  double weight_mass = 0.0;
  Direction direction = Direction::Forward;
};

// Text prompts plus an optional exemplar replicated `replication` times.
// replication is 0 whenever the exemplar is absent.
struct PromptSpec {
  std::vector<std::string> text_prompts;
  std::optional<Exemplar> exemplar;
  int replication = 0;

  std::size_t token_count() const {
    return text_prompts.size() + static_cast<std::size_t>(replication);
  }
};

// Presence score per prompt string, in [0,1].
using PresenceScores = std::map<std::string, double>;

// Dense backbone features on a stride-spaced grid.
struct FeatureMap {
  int grid_width = 0;
  int grid_height = 0;
  int dim = 0;
  int stride = 1;
  std::vector<float> values;  // grid_width*grid_height*dim, row-major cells

  const float* cell(int gx, int gy) const {
    return values.data() +
           (static_cast<std::size_t>(gy) * grid_width + gx) * dim;
  }
};

}  // namespace ovcd
