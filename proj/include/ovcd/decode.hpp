#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ovcd/raster.hpp"
#include "ovcd/types.hpp"

namespace ovcd {

struct Instance {
  int id = 0;
  std::vector<std::int32_t> pixels;
  std::size_t area = 0;
};

struct InstanceSet {
  int timestamp = 1;
  int width = 0;
  int height = 0;
  std::vector<Instance> instances;
};

struct ChangeResult {
  BitMask change_mask;
  std::vector<std::pair<int, int>> matched_pairs;  // (id at t1, id at t2)
  std::vector<int> unmatched_t1;
  std::vector<int> unmatched_t2;
  InstanceSet instances_t1;
  InstanceSet instances_t2;
  std::string selected_prompt;
};

// Argmax over `prompts` (list order) of presence; ties go to the earliest
// prompt and prompts missing from the map score 0.
std::string select_best_prompt(const std::vector<std::string>& prompts,
                               const PresenceScores& presence);

// logits >= tau.
BitMask decode_semantic(const ScalarMap& logits, double tau);

// 8-connected instances of a semantic mask.
InstanceSet decouple_instances(const BitMask& semantic, int timestamp);

// i (t1) and j (t2) match when |i&j|/|i| >= theta or |i&j|/|j| >= theta. Any
// sufficient overlap marks both instances matched; the change mask is the
// union of all unmatched pixels.
ChangeResult match_instances(const InstanceSet& set1, const InstanceSet& set2,
                             double theta);

// decode_semantic -> decouple_instances -> match_instances on the rectified
// logits of the selected prompt.
ChangeResult decode_change(const ScalarMap& logits_t1, const ScalarMap& logits_t2,
                           double tau, double theta,
                           std::string selected_prompt = {});

}  // namespace ovcd
