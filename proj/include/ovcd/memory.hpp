#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ovcd/backends.hpp"
#include "ovcd/bridge.hpp"
#include "ovcd/types.hpp"

namespace ovcd {

// Tracker output at the destination frame of one propagation direction.
struct PropagationResult {
  BitMask propagated_mask;
  ScalarMap confidence;
  Direction direction = Direction::Forward;
};

// A temporally stable pixel set with its mean propagation confidence.
struct StableRegion {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> pixels;  // linear indices into width*height
  double alpha = 0.0;
  Direction source_direction = Direction::Forward;
};

enum class ExemplarFusion { Weighted, Equal };

// Runs the tracker from init_mask on seq.frames[0] to the final frame. An
// empty init mask short-circuits to an empty, zero-confidence result.
PropagationResult propagate(const BitMask& init_mask, const BridgedSequence& seq,
                            const MaskPropagator& tracker);

// 8-connected components of propagated_mask & dst_coarse whose mean
// confidence is at least c_min; alpha is that mean.
std::vector<StableRegion> extract_stable_regions(const PropagationResult& prop,
                                                 const BitMask& dst_coarse,
                                                 double c_min);

// Pixel-weighted mean of the feature cells under the region (pixel -> cell by
// integer division with the feature stride).
std::vector<double> pool_region_feature(const StableRegion& region,
                                       const FeatureMap& features);

// sum(alpha_n z_n) / sum(alpha_n), or all alpha_n := 1 in Equal mode.
// Returns nullopt when there is nothing to aggregate (empty list or zero mass).
std::optional<Exemplar> aggregate_exemplar(
    std::span<const StableRegion> regions,
    std::span<const std::vector<double>> features, ExemplarFusion fusion);

// Text prompts plus the exemplar replicated r times (r recorded as 0 when the
// exemplar is absent).
PromptSpec build_prompt(const QuerySpec& query,
                        const std::optional<Exemplar>& exemplar, int replication);

}  // namespace ovcd
