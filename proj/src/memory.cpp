#include "ovcd/memory.hpp"

#include <string>

#include "ovcd/error.hpp"

namespace ovcd {

PropagationResult propagate(const BitMask& init_mask, const BridgedSequence& seq,
                            const MaskPropagator& tracker) {
  if (seq.frames.size() < 2) {
    throw InvalidArgument("propagation needs at least two frames");
  }
  const int w = seq.frames.front().width();
  const int h = seq.frames.front().height();
  require_same_dims(init_mask.width(), init_mask.height(), w, h, "propagate");

  PropagationResult out{BitMask(w, h), ScalarMap(w, h, 0.0f), seq.direction};
  if (init_mask.none()) return out;

  TrackResult tr;
  try {
    tr = tracker.propagate(init_mask, seq.frames);
  } catch (const std::exception& e) {
    throw BackendError(std::string("propagation ") + to_string(seq.direction) +
                       " over " + std::to_string(seq.frames.size()) +
                       " frames failed: " + e.what());
  }
  validate_track_result(tr, w, h);
  out.propagated_mask = std::move(tr.mask);
  out.confidence = std::move(tr.confidence);
  return out;
}

std::vector<StableRegion> extract_stable_regions(const PropagationResult& prop,
                                                 const BitMask& dst_coarse,
                                                 double c_min) {
  require_same_dims(prop.propagated_mask, dst_coarse, "extract_stable_regions");
  require_same_dims(prop.confidence, dst_coarse, "extract_stable_regions");
  const BitMask agree = mask_intersect(prop.propagated_mask, dst_coarse);
  const LabeledComponents comps = connected_components(agree, Connectivity::Eight);

  std::vector<StableRegion> regions;
  for (const Component& c : comps.components) {
    double sum = 0.0;
    for (std::int32_t p : c.pixels) sum += prop.confidence[static_cast<std::size_t>(p)];
    const double mean = sum / static_cast<double>(c.area);
    if (mean < c_min) continue;
    regions.push_back({comps.width, comps.height, c.pixels, mean, prop.direction});
  }
  return regions;
}

std::vector<double> pool_region_feature(const StableRegion& region,
                                       const FeatureMap& features) {
  if (region.pixels.empty()) {
    throw InvalidArgument("cannot pool an empty region");
  }
  std::vector<double> acc(features.dim, 0.0);
  for (std::int32_t p : region.pixels) {
    const int x = p % region.width;
    const int y = p / region.width;
    const int gx = x / features.stride;
    const int gy = y / features.stride;
    if (gx >= features.grid_width || gy >= features.grid_height) {
      throw InvalidArgument("region pixel outside the feature grid");
    }
    const float* cell = features.cell(gx, gy);
    for (int d = 0; d < features.dim; ++d) acc[d] += cell[d];
  }
  const double n = static_cast<double>(region.pixels.size());
  for (double& v : acc) v /= n;
  return acc;
}

std::optional<Exemplar> aggregate_exemplar(
    std::span<const StableRegion> regions,
    std::span<const std::vector<double>> features, ExemplarFusion fusion) {
  if (regions.size() != features.size()) {
    throw InvalidArgument("aggregate_exemplar: regions and features differ in length");
  }
  if (regions.empty()) return std::nullopt;
  const std::size_t dim = features.front().size();
  double mass = 0.0;
  for (std::size_t n = 0; n < regions.size(); ++n) {
    if (features[n].size() != dim) {
      throw InvalidArgument("aggregate_exemplar: inconsistent feature dimension");
    }
    mass += fusion == ExemplarFusion::Equal ? 1.0 : regions[n].alpha;
  }
  if (!(mass > 0.0)) return std::nullopt;
  Exemplar e;
  e.vector.assign(dim, 0.0);
  for (std::size_t n = 0; n < regions.size(); ++n) {
    const double w = (fusion == ExemplarFusion::Equal ? 1.0 : regions[n].alpha) / mass;
    for (std::size_t d = 0; d < dim; ++d) e.vector[d] += w * features[n][d];
  }
  e.weight_mass = mass;
  e.direction = regions.front().source_direction;
  return e;
}

PromptSpec build_prompt(const QuerySpec& query,
                        const std::optional<Exemplar>& exemplar, int replication) {
  if (query.prompts.empty()) {
    throw InvalidArgument("query '" + query.query_id + "' has no text prompts");
  }
  if (replication < 0) throw InvalidArgument("replication must be >= 0");
  PromptSpec p;
  p.text_prompts = query.prompts;
  if (exemplar && replication > 0) {
    p.exemplar = exemplar;
    p.replication = replication;
  }
  return p;
}

}  // namespace ovcd
