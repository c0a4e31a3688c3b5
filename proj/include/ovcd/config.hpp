#pragma once

#include <cstdint>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "ovcd/inference.hpp"
#include "ovcd/memory.hpp"
#include "ovcd/rectify.hpp"

namespace ovcd {

// Every tunable of the pipeline. Defaults are the shipped configuration.
struct PipelineConfig {
  // Cross-temporal memory reasoning.
  int k_transition = 3;
  double c_min = 0.5;
  int replication = 4;
  bool enable_ctmr = true;
  bool enable_forward = true;
  bool enable_backward = true;
  bool weighted_exemplar = true;

  // Decoding.
  double tau = 0.0;
  double theta_match = 0.5;

  // Rectification.
  double tau_miss = 0.2;
  double tau_keep = 0.8;
  std::size_t a_min = 64;
  bool enable_rectification = true;

  // Multi-scale inference.
  int tile_size = 256;
  int tile_stride = 128;
  MergeRule merge_rule = MergeRule::Mean;
  double global_downscale = 1.0;
  bool enable_global_refinement = true;

  std::uint64_t seed = 0;

  RectificationParams rectification() const { return {tau_miss, tau_keep, a_min}; }
  ExemplarFusion fusion() const {
    return weighted_exemplar ? ExemplarFusion::Weighted : ExemplarFusion::Equal;
  }

  // Throws InvalidArgument on out-of-range values.
  void validate() const;
};

nlohmann::json to_json(const PipelineConfig& cfg);
// Starts from `base` and overrides the keys present in j. Unknown keys are
// rejected.
PipelineConfig apply_overrides(const PipelineConfig& base, const nlohmann::json& j);
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace ovcd
