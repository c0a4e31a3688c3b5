#include "ovcd/pipeline.hpp"

#include <future>
#include <set>

#include "ovcd/bridge.hpp"
#include "ovcd/error.hpp"
#include "ovcd/inference.hpp"
#include "ovcd/memory.hpp"

namespace ovcd {

namespace {

PromptSpec single_text(const PromptSpec& p, const std::string& text) {
  PromptSpec out = p;
  out.text_prompts = {text};
  return out;
}

double presence_of(const PresenceScores& p, const std::string& key) {
  auto it = p.find(key);
  return it == p.end() ? 0.0 : it->second;
}

struct DirectionalEvidence {
  std::optional<Exemplar> exemplar;
  std::size_t stable_regions = 0;
};

// One row of the bidirectional propagation: track src_mask from t_src to
// t_dst, keep regions agreeing with the destination coarse mask, and pool
// destination features into an exemplar.
DirectionalEvidence directional_exemplar(const RasterImage& t_src,
                                         const RasterImage& t_dst,
                                         const BitMask& src_mask,
                                         const BitMask& dst_mask,
                                         Direction direction,
                                         const PipelineConfig& cfg,
                                         const Backends& backends) {
  DirectionalEvidence ev;
  if (src_mask.none() || dst_mask.none()) return ev;
  const BridgedSequence seq =
      build_bridged_sequence(t_src, t_dst, cfg.k_transition, direction);
  const PropagationResult prop = propagate(src_mask, seq, *backends.tracker);
  const auto regions = extract_stable_regions(prop, dst_mask, cfg.c_min);
  ev.stable_regions = regions.size();
  if (regions.empty()) return ev;

  FeatureMap features = backends.features->extract(t_dst);
  validate_feature_map(features, t_dst.width(), t_dst.height(),
                       backends.features->dim(), backends.features->stride());
  std::vector<std::vector<double>> pooled;
  pooled.reserve(regions.size());
  for (const auto& r : regions) pooled.push_back(pool_region_feature(r, features));
  ev.exemplar = aggregate_exemplar(regions, pooled, cfg.fusion());
  if (ev.exemplar) ev.exemplar->direction = direction;
  return ev;
}

}  // namespace

ChangeResult run_query(const RasterImage& t1, const RasterImage& t2,
                       const QuerySpec& query, const PipelineConfig& cfg,
                       const Backends& backends, QueryTrace* trace) {
  require_same_dims(t1, t2, "run_pipeline");
  if (query.prompts.empty()) {
    throw InvalidArgument("query '" + query.query_id + "' has no prompts");
  }
  const Segmenter& seg = *backends.segmenter;
  QueryTrace local_trace;
  QueryTrace& tr = trace ? *trace : local_trace;

  // Global initialisation: text-only coarse masks from the best synonym.
  const PromptSpec text_only = build_prompt(query, std::nullopt, 0);
  std::map<std::string, InferenceOutput> init1, init2;
  PresenceScores init_presence;
  for (const auto& s : query.prompts) {
    if (init1.count(s)) continue;
    init1[s] = run_global(t1, single_text(text_only, s), seg, cfg.global_downscale);
    init2[s] = run_global(t2, single_text(text_only, s), seg, cfg.global_downscale);
    init_presence[s] = 0.5 * (presence_of(init1[s].presence, s) +
                              presence_of(init2[s].presence, s));
  }
  tr.init_prompt = select_best_prompt(query.prompts, init_presence);
  const BitMask coarse1 = decode_semantic(init1[tr.init_prompt].logits, cfg.tau);
  const BitMask coarse2 = decode_semantic(init2[tr.init_prompt].logits, cfg.tau);
  tr.coarse_area_t1 = coarse1.count();
  tr.coarse_area_t2 = coarse2.count();

  // Cross-temporal prompting. Forward evidence (1->2) conditions t2,
  // backward evidence (2->1) conditions t1.
  if (cfg.enable_ctmr) {
    const bool concurrent = backends.tracker->max_sessions() >= 2 &&
                            cfg.enable_forward && cfg.enable_backward;
    auto forward = [&] {
      return cfg.enable_forward
                 ? directional_exemplar(t1, t2, coarse1, coarse2, Direction::Forward,
                                        cfg, backends)
                 : DirectionalEvidence{};
    };
    auto backward = [&] {
      return cfg.enable_backward
                 ? directional_exemplar(t2, t1, coarse2, coarse1, Direction::Backward,
                                        cfg, backends)
                 : DirectionalEvidence{};
    };
    DirectionalEvidence fwd, bwd;
    if (concurrent) {
      auto pending = std::async(std::launch::async, backward);
      fwd = forward();
      bwd = pending.get();
    } else {
      fwd = forward();
      bwd = backward();
    }
    tr.stable_regions_forward = fwd.stable_regions;
    tr.stable_regions_backward = bwd.stable_regions;
    tr.exemplar_forward = std::move(fwd.exemplar);
    tr.exemplar_backward = std::move(bwd.exemplar);
  }
  const PromptSpec prompt1 = build_prompt(query, tr.exemplar_backward, cfg.replication);
  const PromptSpec prompt2 = build_prompt(query, tr.exemplar_forward, cfg.replication);

  // Logits per synonym. Without global refinement the rectifier falls back
  // to the text-only global initialisation maps.
  const TilePlan plan = plan_tiles(t1.width(), t1.height(), cfg.tile_size, cfg.tile_stride);
  struct Logits {
    InferenceOutput local1, local2, global1, global2;
  };
  std::map<std::string, Logits> per_prompt;
  for (const auto& s : query.prompts) {
    if (per_prompt.count(s)) continue;
    Logits l;
    const PromptSpec p1 = single_text(prompt1, s);
    const PromptSpec p2 = single_text(prompt2, s);
    l.local1 = run_local(t1, p1, plan, seg, cfg.merge_rule);
    l.local2 = run_local(t2, p2, plan, seg, cfg.merge_rule);
    if (cfg.enable_global_refinement) {
      l.global1 = run_global(t1, p1, seg, cfg.global_downscale);
      l.global2 = run_global(t2, p2, seg, cfg.global_downscale);
    } else {
      l.global1 = init1[s];
      l.global2 = init2[s];
    }
    const double p_t1 = std::max(presence_of(l.local1.presence, s),
                                 presence_of(l.global1.presence, s));
    const double p_t2 = std::max(presence_of(l.local2.presence, s),
                                 presence_of(l.global2.presence, s));
    tr.presence[s] = 0.5 * (p_t1 + p_t2);
    per_prompt.emplace(s, std::move(l));
  }
  const std::string selected = select_best_prompt(query.prompts, tr.presence);
  const Logits& chosen = per_prompt.at(selected);

  ScalarMap final1 = chosen.local1.logits;
  ScalarMap final2 = chosen.local2.logits;
  if (cfg.enable_rectification) {
    auto r1 = rectify_with_trace(chosen.local1.logits, chosen.global1.logits,
                                 chosen.global1.support, cfg.rectification());
    auto r2 = rectify_with_trace(chosen.local2.logits, chosen.global2.logits,
                                 chosen.global2.support, cfg.rectification());
    final1 = std::move(r1.logits);
    final2 = std::move(r2.logits);
    tr.rectified_t1 = std::move(r1.components);
    tr.rectified_t2 = std::move(r2.components);
  }
  return decode_change(final1, final2, cfg.tau, cfg.theta_match, selected);
}

std::map<std::string, QueryOutcome> run_pipeline(const RasterImage& t1,
                                                 const RasterImage& t2,
                                                 const std::vector<QuerySpec>& queries,
                                                 const PipelineConfig& cfg,
                                                 const Backends& backends,
                                                 const RunOptions& options) {
  require_same_dims(t1, t2, "run_pipeline");
  cfg.validate();
  if (queries.empty()) throw InvalidArgument("run_pipeline: no queries");
  if (!backends.segmenter || !backends.features || !backends.tracker) {
    throw InvalidArgument("run_pipeline: incomplete backend set");
  }
  std::set<std::string> ids;
  for (const auto& q : queries) {
    if (!ids.insert(q.query_id).second) {
      throw InvalidArgument("duplicate query id '" + q.query_id + "'");
    }
  }

  std::map<std::string, QueryOutcome> out;
  for (const auto& q : queries) {
    QueryOutcome o;
    o.query_id = q.query_id;
    if (options.cancel && options.cancel->load()) {
      o.failure = FailureKind::Cancelled;
      o.error = "cancelled";
      out.emplace(q.query_id, std::move(o));
      continue;
    }
    try {
      o.result = run_query(t1, t2, q, cfg, backends, &o.trace);
    } catch (const BackendError& e) {
      o.failure = FailureKind::Backend;
      o.error = e.what();
    } catch (const InvalidArgument& e) {
      o.failure = FailureKind::Invalid;
      o.error = e.what();
    } catch (const std::exception& e) {
      o.failure = FailureKind::Other;
      o.error = e.what();
    }
    out.emplace(q.query_id, std::move(o));
  }
  return out;
}

}  // namespace ovcd
