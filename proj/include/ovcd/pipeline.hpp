#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ovcd/backends.hpp"
#include "ovcd/config.hpp"
#include "ovcd/decode.hpp"
#include "ovcd/rectify.hpp"

namespace ovcd {

// What happened inside one query, for manifests and ablation diagnostics.
struct QueryTrace {
  std::string init_prompt;
  std::size_t coarse_area_t1 = 0;
  std::size_t coarse_area_t2 = 0;
  std::size_t stable_regions_forward = 0;
  std::size_t stable_regions_backward = 0;
  std::optional<Exemplar> exemplar_forward;   // conditions t2
  std::optional<Exemplar> exemplar_backward;  // conditions t1
  PresenceScores presence;                    // mean over timestamps
  std::vector<RectifiedComponent> rectified_t1;
  std::vector<RectifiedComponent> rectified_t2;
};

enum class FailureKind { None, Backend, Invalid, Cancelled, Other };

struct QueryOutcome {
  std::string query_id;
  FailureKind failure = FailureKind::None;
  std::string error;
  std::optional<ChangeResult> result;
  QueryTrace trace;

  bool ok() const { return failure == FailureKind::None; }
};

struct RunOptions {
  // Checked between queries; queries not started are reported as cancelled.
  const std::atomic<bool>* cancel = nullptr;
};

// Five-stage inference for every query: global initialisation, cross-temporal
// prompting, local/global logits, rectification, instance-level decoding.
// A failing query does not stop the others.
std::map<std::string, QueryOutcome> run_pipeline(const RasterImage& t1,
                                                 const RasterImage& t2,
                                                 const std::vector<QuerySpec>& queries,
                                                 const PipelineConfig& cfg,
                                                 const Backends& backends,
                                                 const RunOptions& options = {});

// Single-query entry point used by run_pipeline; throws on failure.
ChangeResult run_query(const RasterImage& t1, const RasterImage& t2,
                       const QuerySpec& query, const PipelineConfig& cfg,
                       const Backends& backends, QueryTrace* trace = nullptr);

}  // namespace ovcd
