#include "ovcd/config.hpp"

#include <fstream>
#include <string>

#include "ovcd/error.hpp"

namespace ovcd {

namespace {

const char* merge_rule_name(MergeRule r) { return r == MergeRule::Mean ? "mean" : "max"; }

MergeRule parse_merge_rule(const std::string& s) {
  if (s == "mean") return MergeRule::Mean;
  if (s == "max") return MergeRule::Max;
  throw InvalidArgument("merge_rule must be 'mean' or 'max', got '" + s + "'");
}

}  // namespace

void PipelineConfig::validate() const {
  if (k_transition < 0) throw InvalidArgument("k_transition must be >= 0");
  if (!(c_min >= 0.0 && c_min <= 1.0)) throw InvalidArgument("c_min must be in [0,1]");
  if (replication < 0) throw InvalidArgument("replication must be >= 0");
  if (!(theta_match > 0.0 && theta_match <= 1.0)) {
    throw InvalidArgument("theta_match must be in (0,1]");
  }
  rectification().validate();
  if (tile_size < 1) throw InvalidArgument("tile_size must be positive");
  if (tile_stride < 1 || tile_stride > tile_size) {
    throw InvalidArgument("tile_stride must be in [1, tile_size]");
  }
  if (!(global_downscale > 0.0 && global_downscale <= 1.0)) {
    throw InvalidArgument("global_downscale must be in (0,1]");
  }
}

nlohmann::json to_json(const PipelineConfig& c) {
  return {
      {"k_transition", c.k_transition},
      {"c_min", c.c_min},
      {"replication", c.replication},
      {"enable_ctmr", c.enable_ctmr},
      {"enable_forward", c.enable_forward},
      {"enable_backward", c.enable_backward},
      {"weighted_exemplar", c.weighted_exemplar},
      {"tau", c.tau},
      {"theta_match", c.theta_match},
      {"tau_miss", c.tau_miss},
      {"tau_keep", c.tau_keep},
      {"a_min", c.a_min},
      {"enable_rectification", c.enable_rectification},
      {"tile_size", c.tile_size},
      {"tile_stride", c.tile_stride},
      {"merge_rule", merge_rule_name(c.merge_rule)},
      {"global_downscale", c.global_downscale},
      {"enable_global_refinement", c.enable_global_refinement},
      {"seed", c.seed},
  };
}

PipelineConfig apply_overrides(const PipelineConfig& base, const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  PipelineConfig c = base;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "k_transition") c.k_transition = v.get<int>();
      else if (key == "c_min") c.c_min = v.get<double>();
      else if (key == "replication") c.replication = v.get<int>();
      else if (key == "enable_ctmr") c.enable_ctmr = v.get<bool>();
      else if (key == "enable_forward") c.enable_forward = v.get<bool>();
      else if (key == "enable_backward") c.enable_backward = v.get<bool>();
      else if (key == "weighted_exemplar") c.weighted_exemplar = v.get<bool>();
      else if (key == "tau") c.tau = v.get<double>();
      else if (key == "theta_match") c.theta_match = v.get<double>();
      else if (key == "tau_miss") c.tau_miss = v.get<double>();
      else if (key == "tau_keep") c.tau_keep = v.get<double>();
      else if (key == "a_min") c.a_min = v.get<std::size_t>();
      else if (key == "enable_rectification") c.enable_rectification = v.get<bool>();
      else if (key == "tile_size") c.tile_size = v.get<int>();
      else if (key == "tile_stride") c.tile_stride = v.get<int>();
      else if (key == "merge_rule") c.merge_rule = parse_merge_rule(v.get<std::string>());
      else if (key == "global_downscale") c.global_downscale = v.get<double>();
      else if (key == "enable_global_refinement") c.enable_global_refinement = v.get<bool>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else throw InvalidArgument("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig config_from_json(const nlohmann::json& j) {
  return apply_overrides(PipelineConfig{}, j);
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace ovcd
