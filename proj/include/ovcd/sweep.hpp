#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ovcd/config.hpp"
#include "ovcd/dataset.hpp"
#include "ovcd/metrics.hpp"

namespace ovcd {

// Baseline: every row minus the named baseline row (ablation tables).
// Previous: every row minus the row before it (transition-frame sweep).
enum class DeltaMode { Baseline, Previous };

struct SweepRow {
  std::string name;
  nlohmann::json overrides = nlohmann::json::object();
};

struct SweepGrid {
  PipelineConfig base;
  std::vector<SweepRow> rows;
  DeltaMode delta_mode = DeltaMode::Baseline;
  std::string baseline;  // defaults to the first row
};

// JSON grid file:
//   {"base": {...config...},
//    "delta": "baseline" | "previous", "baseline": "<row name>",
//    "rows": [{"name": "...", "config": {...}}, ...]}
// or "axes": {"k_transition": [0,1,3,5], ...} for a cartesian product.
SweepGrid parse_grid(const nlohmann::json& j);
SweepGrid load_grid(const std::filesystem::path& path);

// Baseline / Variant 1 (+CTMR) / Variant 2 (+Recti.) / Full model (+GR).
SweepGrid ablation_grid();
// CTMR internals: none / backward / forward (E-Avg.) / forward (W-Avg.) / both.
SweepGrid ctmr_grid();
// K in {0,1,3,5} over baseline + CTMR, deltas against the previous row.
SweepGrid transition_grid();

struct SweepResultRow {
  std::string name;
  PipelineConfig config;
  EvalReport report;
  Metrics metrics;  // micro
  bool has_delta = false;
  double delta_iou = 0.0;
  double delta_f1 = 0.0;
};

struct SweepTable {
  DeltaMode delta_mode = DeltaMode::Baseline;
  std::string baseline;
  std::vector<SweepResultRow> rows;
};

SweepTable run_sweep(const SweepGrid& grid, const Corpus& corpus,
                     const Backends& backends);

// Recomputes delta_iou/delta_f1 from each row's metrics per table.delta_mode.
void fill_deltas(SweepTable& table);

std::string sweep_csv(const SweepTable& table);
std::string sweep_text(const SweepTable& table);

}  // namespace ovcd
