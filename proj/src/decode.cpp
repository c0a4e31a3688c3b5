#include "ovcd/decode.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "ovcd/error.hpp"

namespace ovcd {

std::string select_best_prompt(const std::vector<std::string>& prompts,
                               const PresenceScores& presence) {
  if (prompts.empty()) throw InvalidArgument("select_best_prompt: no prompts");
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    auto it = presence.find(prompts[i]);
    const double s = it == presence.end() ? 0.0 : it->second;
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return prompts[best];
}

BitMask decode_semantic(const ScalarMap& logits, double tau) {
  BitMask m(logits.width(), logits.height());
  for (std::size_t i = 0; i < logits.size(); ++i) m.set(i, logits[i] >= tau);
  return m;
}

InstanceSet decouple_instances(const BitMask& semantic, int timestamp) {
  InstanceSet set;
  set.timestamp = timestamp;
  set.width = semantic.width();
  set.height = semantic.height();
  LabeledComponents comps = connected_components(semantic, Connectivity::Eight);
  for (Component& c : comps.components) {
    set.instances.push_back({c.id, std::move(c.pixels), c.area});
  }
  return set;
}

ChangeResult match_instances(const InstanceSet& set1, const InstanceSet& set2,
                             double theta) {
  require_same_dims(set1.width, set1.height, set2.width, set2.height,
                    "match_instances");
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw InvalidArgument("match threshold must be in (0, 1]");
  }
  const int w = set1.width;
  const int h = set1.height;

  std::vector<std::int32_t> label2(static_cast<std::size_t>(w) * h, -1);
  for (std::size_t j = 0; j < set2.instances.size(); ++j) {
    for (std::int32_t p : set2.instances[j].pixels) label2[p] = static_cast<std::int32_t>(j);
  }

  ChangeResult out;
  std::vector<char> matched1(set1.instances.size(), 0);
  std::vector<char> matched2(set2.instances.size(), 0);
  for (std::size_t i = 0; i < set1.instances.size(); ++i) {
    const Instance& a = set1.instances[i];
    std::unordered_map<std::int32_t, std::size_t> overlap;
    for (std::int32_t p : a.pixels) {
      if (label2[p] >= 0) ++overlap[label2[p]];
    }
    // Visit partners in id order for a stable pair list.
    std::vector<std::pair<std::int32_t, std::size_t>> partners(overlap.begin(), overlap.end());
    std::sort(partners.begin(), partners.end());
    for (const auto& [j, inter] : partners) {
      const Instance& b = set2.instances[j];
      const double r1 = static_cast<double>(inter) / static_cast<double>(a.area);
      const double r2 = static_cast<double>(inter) / static_cast<double>(b.area);
      if (r1 >= theta || r2 >= theta) {
        matched1[i] = 1;
        matched2[j] = 1;
        out.matched_pairs.emplace_back(a.id, b.id);
      }
    }
  }

  out.change_mask = BitMask(w, h);
  for (std::size_t i = 0; i < set1.instances.size(); ++i) {
    if (matched1[i]) continue;
    out.unmatched_t1.push_back(set1.instances[i].id);
    for (std::int32_t p : set1.instances[i].pixels) out.change_mask.set(static_cast<std::size_t>(p));
  }
  for (std::size_t j = 0; j < set2.instances.size(); ++j) {
    if (matched2[j]) continue;
    out.unmatched_t2.push_back(set2.instances[j].id);
    for (std::int32_t p : set2.instances[j].pixels) out.change_mask.set(static_cast<std::size_t>(p));
  }
  out.instances_t1 = set1;
  out.instances_t2 = set2;
  return out;
}

ChangeResult decode_change(const ScalarMap& logits_t1, const ScalarMap& logits_t2,
                           double tau, double theta, std::string selected_prompt) {
  require_same_dims(logits_t1, logits_t2, "decode_change");
  ChangeResult r = match_instances(decouple_instances(decode_semantic(logits_t1, tau), 1),
                                   decouple_instances(decode_semantic(logits_t2, tau), 2),
                                   theta);
  r.selected_prompt = std::move(selected_prompt);
  return r;
}

}  // namespace ovcd
