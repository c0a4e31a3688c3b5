#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ovcd/raster.hpp"

namespace ovcd {

struct RectificationParams {
  double tau_miss = 0.2;
  double tau_keep = 0.8;
  std::size_t a_min = 64;

  // Throws InvalidArgument unless 0 <= tau_miss < tau_keep <= 1.
  void validate() const;
};

// |C & B_local| / |C| for a non-empty component C.
double coverage_ratio(std::span<const std::int32_t> component,
                      const BitMask& local_support);

// Piecewise-linear weight: 1 below tau_miss, 0 from tau_keep on, linear in
// between.
double fusion_weight(double rho, const RectificationParams& p);

struct RectifiedComponent {
  int id = 0;
  std::size_t area = 0;
  double coverage = 0.0;
  double weight = 0.0;
};

struct RectificationResult {
  ScalarMap logits;
  std::vector<RectifiedComponent> components;  // surviving global components
};

// Blends global into local inside each 8-connected global-support component
// of area >= a_min, weighted by that component's local coverage. The local
// support is the local logit > 0 map; pixels outside surviving components
// keep their local value bit-exactly.
RectificationResult rectify_with_trace(const ScalarMap& local,
                                       const ScalarMap& global,
                                       const BitMask& global_support,
                                       const RectificationParams& p);

ScalarMap rectify(const ScalarMap& local, const ScalarMap& global,
                  const BitMask& global_support, const RectificationParams& p);

}  // namespace ovcd
