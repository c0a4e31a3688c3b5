#include "ovcd/rectify.hpp"

#include <string>

#include "ovcd/error.hpp"
#include "ovcd/inference.hpp"
#include "ovcd/kernels.hpp"

namespace ovcd {

void RectificationParams::validate() const {
  if (!(tau_miss >= 0.0 && tau_miss < tau_keep && tau_keep <= 1.0)) {
    throw InvalidArgument("rectification thresholds must satisfy 0 <= tau_miss < "
                          "tau_keep <= 1 (got " + std::to_string(tau_miss) + ", " +
                          std::to_string(tau_keep) + ")");
  }
}

double coverage_ratio(std::span<const std::int32_t> component,
                      const BitMask& local_support) {
  if (component.empty()) throw InvalidArgument("coverage_ratio: empty component");
  std::size_t covered = 0;
  for (std::int32_t p : component) covered += local_support[static_cast<std::size_t>(p)];
  return static_cast<double>(covered) / static_cast<double>(component.size());
}

double fusion_weight(double rho, const RectificationParams& p) {
  p.validate();
  if (rho < p.tau_miss) return 1.0;
  if (rho >= p.tau_keep) return 0.0;
  return (p.tau_keep - rho) / (p.tau_keep - p.tau_miss);
}

RectificationResult rectify_with_trace(const ScalarMap& local,
                                       const ScalarMap& global,
                                       const BitMask& global_support,
                                       const RectificationParams& p) {
  require_same_dims(local, global, "rectify");
  require_same_dims(local, global_support, "rectify");
  p.validate();

  const BitMask local_support = support_of(local);
  const LabeledComponents comps = filter_by_area(
      connected_components(global_support, Connectivity::Eight), p.a_min);

  RectificationResult out;
  std::vector<double> weight_by_label(comps.components.size() + 1, 0.0);
  for (const Component& c : comps.components) {
    const double rho = coverage_ratio(c.pixels, local_support);
    const double w = fusion_weight(rho, p);
    weight_by_label[c.id] = w;
    out.components.push_back({c.id, c.area, rho, w});
  }
  out.logits = ScalarMap(local.width(), local.height());
  kernels::parallel::blend_by_label(local.values(), global.values(), comps.label_map,
                                    weight_by_label, out.logits.values());
  return out;
}

ScalarMap rectify(const ScalarMap& local, const ScalarMap& global,
                  const BitMask& global_support, const RectificationParams& p) {
  return rectify_with_trace(local, global, global_support, p).logits;
}

}  // namespace ovcd
