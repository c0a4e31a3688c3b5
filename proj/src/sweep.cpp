#include "ovcd/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ovcd/error.hpp"

namespace ovcd {

namespace {

std::string signed_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.1f", 100.0 * v);
  return buf;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
  return buf;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string value_string(const nlohmann::json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

void expand_axes(const nlohmann::json& axes, std::vector<SweepRow>& rows) {
  rows.push_back({"", nlohmann::json::object()});
  for (const auto& [key, values] : axes.items()) {
    if (!values.is_array() || values.empty()) {
      throw InvalidArgument("sweep axis '" + key + "' must be a non-empty array");
    }
    std::vector<SweepRow> next;
    for (const auto& row : rows) {
      for (const auto& v : values) {
        SweepRow r = row;
        r.overrides[key] = v;
        r.name += (r.name.empty() ? "" : ",") + key + "=" + value_string(v);
        next.push_back(std::move(r));
      }
    }
    rows = std::move(next);
  }
}

}  // namespace

SweepGrid parse_grid(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("sweep grid must be a JSON object");
  SweepGrid g;
  if (j.contains("base")) g.base = config_from_json(j.at("base"));
  if (j.contains("delta")) {
    const auto mode = j.at("delta").get<std::string>();
    if (mode == "baseline") g.delta_mode = DeltaMode::Baseline;
    else if (mode == "previous") g.delta_mode = DeltaMode::Previous;
    else throw InvalidArgument("sweep delta must be 'baseline' or 'previous'");
  }
  if (j.contains("rows")) {
    for (const auto& r : j.at("rows")) {
      g.rows.push_back({r.at("name").get<std::string>(),
                        r.contains("config") ? r.at("config") : nlohmann::json::object()});
    }
  }
  if (j.contains("axes")) expand_axes(j.at("axes"), g.rows);
  if (g.rows.empty()) throw InvalidArgument("sweep grid has no rows");
  for (const auto& r : g.rows) apply_overrides(g.base, r.overrides);  // validates
  g.baseline = j.value("baseline", g.rows.front().name);
  const bool found = std::any_of(g.rows.begin(), g.rows.end(),
                                 [&](const SweepRow& r) { return r.name == g.baseline; });
  if (!found) throw InvalidArgument("sweep baseline row '" + g.baseline + "' not in grid");
  return g;
}

SweepGrid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sweep grid " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("sweep grid " + path.string() + ": " + e.what());
  }
  return parse_grid(j);
}

SweepGrid ablation_grid() {
  auto flags = [](bool ctmr, bool recti, bool gr) {
    return nlohmann::json{{"enable_ctmr", ctmr},
                          {"enable_rectification", recti},
                          {"enable_global_refinement", gr}};
  };
  SweepGrid g;
  g.rows = {{"Baseline", flags(false, false, false)},
            {"Variant 1", flags(true, false, false)},
            {"Variant 2", flags(true, true, false)},
            {"Full model", flags(true, true, true)}};
  g.baseline = "Baseline";
  return g;
}

SweepGrid ctmr_grid() {
  auto ctmr = [](bool ctmr_on, bool f, bool b, bool weighted) {
    return nlohmann::json{{"enable_ctmr", ctmr_on},         {"enable_forward", f},
                          {"enable_backward", b},           {"weighted_exemplar", weighted},
                          {"enable_rectification", false}, {"enable_global_refinement", false}};
  };
  SweepGrid g;
  g.rows = {{"Baseline", ctmr(false, false, false, false)},
            {"+B-CTMR", ctmr(true, false, true, false)},
            {"+F-CTMR", ctmr(true, true, false, false)},
            {"+WF-CTMR", ctmr(true, true, false, true)},
            {"+CTMR", ctmr(true, true, true, true)}};
  g.baseline = "Baseline";
  return g;
}

SweepGrid transition_grid() {
  SweepGrid g;
  for (int k : {0, 1, 3, 5}) {
    g.rows.push_back({"K=" + std::to_string(k),
                      {{"k_transition", k},
                       {"enable_ctmr", true},
                       {"enable_rectification", false},
                       {"enable_global_refinement", false}}});
  }
  g.delta_mode = DeltaMode::Previous;
  g.baseline = g.rows.front().name;
  return g;
}

SweepTable run_sweep(const SweepGrid& grid, const Corpus& corpus,
                     const Backends& backends) {
  if (grid.rows.empty()) throw InvalidArgument("sweep grid has no rows");
  SweepTable table;
  table.delta_mode = grid.delta_mode;
  table.baseline = grid.baseline.empty() ? grid.rows.front().name : grid.baseline;
  for (const auto& row : grid.rows) {
    SweepResultRow r;
    r.name = row.name;
    r.config = apply_overrides(grid.base, row.overrides);
    r.report = evaluate_corpus(corpus, r.config, backends);
    r.metrics = headline(r.report, AggregationMode::Micro);
    table.rows.push_back(std::move(r));
  }
  fill_deltas(table);
  return table;
}

void fill_deltas(SweepTable& table) {
  const SweepResultRow* base = nullptr;
  for (const auto& r : table.rows) {
    if (r.name == table.baseline) base = &r;
  }
  if (table.delta_mode == DeltaMode::Baseline && base == nullptr) {
    throw InvalidArgument("sweep baseline row '" + table.baseline + "' not in grid");
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    SweepResultRow& r = table.rows[i];
    const SweepResultRow* ref = table.delta_mode == DeltaMode::Baseline
                                    ? base
                                    : (i == 0 ? nullptr : &table.rows[i - 1]);
    r.has_delta = ref != nullptr;
    if (!ref) continue;
    r.delta_iou = r.metrics.iou - ref->metrics.iou;
    r.delta_f1 = r.metrics.f1 - ref->metrics.f1;
  }
}

std::string sweep_csv(const SweepTable& table) {
  std::ostringstream os;
  os << "name,precision,recall,f1,iou,mf1,miou,delta_iou,delta_f1";
  const auto keys = to_json(PipelineConfig{});
  for (const auto& [k, v] : keys.items()) os << ',' << k;
  os << '\n';
  for (const auto& r : table.rows) {
    os << r.name << ',' << fixed6(r.metrics.precision) << ',' << fixed6(r.metrics.recall)
       << ',' << fixed6(r.metrics.f1) << ',' << fixed6(r.metrics.iou) << ','
       << fixed6(r.report.mf1) << ',' << fixed6(r.report.miou) << ','
       << (r.has_delta ? fixed6(r.delta_iou) : "") << ','
       << (r.has_delta ? fixed6(r.delta_f1) : "");
    const auto cfg = to_json(r.config);
    for (const auto& [k, v] : cfg.items()) os << ',' << value_string(v);
    os << '\n';
  }
  return os.str();
}

std::string sweep_text(const SweepTable& table) {
  const bool prev = table.delta_mode == DeltaMode::Previous;
  auto mark = [](bool on) { return on ? "x" : "-"; };
  std::ostringstream os;
  char line[320];
  std::snprintf(line, sizeof(line), "%-14s %4s %6s %3s %2s %2s %6s %2s %6s %6s %6s %6s %8s %8s\n",
                "Variant", "CTMR", "Recti.", "GR", "F", "B", "Fusion", "K", "Prec", "Rec",
                "IoU", "F1", prev ? "dIoU(p)" : "dIoU", prev ? "dF1(p)" : "dF1");
  os << line;
  for (const auto& r : table.rows) {
    const PipelineConfig& c = r.config;
    std::snprintf(line, sizeof(line),
                  "%-14s %4s %6s %3s %2s %2s %6s %2d %6s %6s %6s %6s %8s %8s\n",
                  r.name.c_str(), mark(c.enable_ctmr), mark(c.enable_rectification),
                  mark(c.enable_global_refinement), mark(c.enable_ctmr && c.enable_forward),
                  mark(c.enable_ctmr && c.enable_backward),
                  c.weighted_exemplar ? "W-Avg." : "E-Avg.", c.k_transition,
                  pct(r.metrics.precision).c_str(), pct(r.metrics.recall).c_str(),
                  pct(r.metrics.iou).c_str(), pct(r.metrics.f1).c_str(),
                  r.has_delta ? signed_pct(r.delta_iou).c_str() : "-",
                  r.has_delta ? signed_pct(r.delta_f1).c_str() : "-");
    os << line;
  }
  if (prev) os << "(p): delta against the previous row\n";
  else os << "deltas against '" << table.baseline << "'\n";
  return os.str();
}

}  // namespace ovcd
