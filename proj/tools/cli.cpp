#include "cli.hpp"

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ovcd/bridge.hpp"
#include "ovcd/config.hpp"
#include "ovcd/dataset.hpp"
#include "ovcd/error.hpp"
#include "ovcd/image_io.hpp"
#include "ovcd/pipeline.hpp"
#include "ovcd/remote.hpp"
#include "ovcd/scene.hpp"
#include "ovcd/sweep.hpp"
#include "ovcd/synthetic.hpp"

namespace ovcd::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Thrown for argument problems detected after CLI11 has parsed; reported with
// the subcommand's usage text.
struct UsageError : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

bool cancelled(const std::atomic<bool>* cancel) { return cancel && cancel->load(); }

std::string file_stem_for(const std::string& id) {
  std::string s = id;
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s.empty() ? "query" : s;
}

const char* failure_name(FailureKind k) {
  switch (k) {
    case FailureKind::None: return "ok";
    case FailureKind::Backend: return "backend_error";
    case FailureKind::Invalid: return "invalid";
    case FailureKind::Cancelled: return "cancelled";
    case FailureKind::Other: return "error";
  }
  return "error";
}

int exit_code_for(FailureKind k) {
  switch (k) {
    case FailureKind::None: return kExitOk;
    case FailureKind::Backend: return kExitBackend;
    case FailureKind::Invalid: return kExitInvalidArgs;
    case FailureKind::Cancelled: return kExitInterrupted;
    case FailureKind::Other: return kExitFailure;
  }
  return kExitFailure;
}

// Cancellation outranks backend failures, which outrank the rest.
int worse(int a, int b) {
  auto rank = [](int c) {
    switch (c) {
      case kExitOk: return 0;
      case kExitFailure: return 1;
      case kExitInvalidArgs: return 2;
      case kExitIo: return 3;
      case kExitBackend: return 4;
      case kExitInterrupted: return 5;
    }
    return 1;
  };
  return rank(b) > rank(a) ? b : a;
}

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return text;
  }
}

PipelineConfig resolve_config(const std::string& path, const std::vector<std::string>& sets,
                              PipelineConfig base = {}) {
  PipelineConfig cfg = path.empty() ? base : load_config(path);
  json overrides = json::object();
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("--set expects key=value, got '" + s + "'");
    }
    overrides[s.substr(0, eq)] = parse_value(s.substr(eq + 1));
  }
  return apply_overrides(cfg, overrides);
}

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

RasterImage overlay(const RasterImage& image, const BitMask& mask) {
  RasterImage out = image;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (!mask.get(x, y)) continue;
      const std::uint8_t tint[3] = {255, 0, 0};
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = static_cast<std::uint8_t>((image.at(x, y, c) + tint[c] + 1) / 2);
      }
    }
  }
  return out;
}

json exemplar_json(const std::optional<Exemplar>& e) {
  if (!e) return nullptr;
  return {{"vector", e->vector}, {"weight_mass", e->weight_mass},
          {"direction", to_string(e->direction)}};
}

json trace_json(const QueryTrace& t) {
  return {{"init_prompt", t.init_prompt},
          {"coarse_area_t1", t.coarse_area_t1},
          {"coarse_area_t2", t.coarse_area_t2},
          {"stable_regions_forward", t.stable_regions_forward},
          {"stable_regions_backward", t.stable_regions_backward},
          {"exemplar_forward", exemplar_json(t.exemplar_forward)},
          {"exemplar_backward", exemplar_json(t.exemplar_backward)},
          {"presence", t.presence},
          {"rectified_components_t1", t.rectified_t1.size()},
          {"rectified_components_t2", t.rectified_t2.size()}};
}

json outcome_json(const QueryOutcome& o) {
  json j{{"query_id", o.query_id}, {"status", failure_name(o.failure)}};
  if (!o.ok()) {
    j["error"] = o.error;
    return j;
  }
  const ChangeResult& r = *o.result;
  j["selected_prompt"] = r.selected_prompt;
  j["change_pixels"] = r.change_mask.count();
  j["instances_t1"] = r.instances_t1.instances.size();
  j["instances_t2"] = r.instances_t2.instances.size();
  j["matched_pairs"] = r.matched_pairs.size();
  j["unmatched_t1"] = r.unmatched_t1;
  j["unmatched_t2"] = r.unmatched_t2;
  j["trace"] = trace_json(o.trace);
  return j;
}

std::string backend_label(const std::string& spec) {
  return spec.rfind("remote", 0) == 0 ? "remote:" + backend_url(spec) : spec;
}

// ---------------------------------------------------------------- detect

struct DetectArgs {
  std::string t1, t2, dataset, config, backend = "synthetic", out = "ovcd_out";
  std::vector<std::string> queries, sets;
};

int detect_pair(const DetectArgs& a, std::ostream& out, const std::atomic<bool>* cancel) {
  if (a.queries.empty()) throw UsageError("at least one --query is required");
  std::vector<QuerySpec> queries;
  for (const auto& q : a.queries) queries.push_back(parse_query(q));
  const PipelineConfig cfg = resolve_config(a.config, a.sets);
  const RasterImage t1 = io::read_rgb_png(a.t1);
  const RasterImage t2 = io::read_rgb_png(a.t2);
  const Backends backends = resolve_backend(a.backend);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_json(dir / "config.json", to_json(cfg));
  json manifest{{"command", "detect"},
                {"status", "running"},
                {"backend", backend_label(a.backend)},
                {"t1", a.t1},
                {"t2", a.t2},
                {"queries", json::array()}};
  write_json(dir / "manifest.json", manifest);

  RunOptions opts;
  opts.cancel = cancel;
  const auto outcomes = run_pipeline(t1, t2, queries, cfg, backends, opts);

  int code = kExitOk;
  for (const auto& q : queries) {
    const QueryOutcome& o = outcomes.at(q.query_id);
    json entry = outcome_json(o);
    if (o.ok()) {
      const std::string stem = file_stem_for(q.query_id);
      io::write_mask_png(dir / (stem + "_change.png"), o.result->change_mask);
      io::write_rgb_png(dir / (stem + "_overlay.png"), overlay(t2, o.result->change_mask));
      entry["mask"] = stem + "_change.png";
      entry["overlay"] = stem + "_overlay.png";
      out << q.query_id << ": " << o.result->change_mask.count() << " changed pixels (prompt '"
          << o.result->selected_prompt << "')\n";
    } else {
      out << q.query_id << ": " << failure_name(o.failure) << ": " << o.error << "\n";
    }
    manifest["queries"].push_back(std::move(entry));
    code = worse(code, exit_code_for(o.failure));
  }
  manifest["status"] = code == kExitInterrupted ? "cancelled" : code == kExitOk ? "ok" : "failed";
  write_json(dir / "manifest.json", manifest);
  return code;
}

int detect_dataset(const DetectArgs& a, std::ostream& out, const std::atomic<bool>* cancel) {
  Corpus corpus = load_dataset(a.dataset);
  if (!a.queries.empty()) {
    corpus.queries.clear();
    for (const auto& q : a.queries) corpus.queries.push_back(parse_query(q));
  }
  const PipelineConfig cfg = resolve_config(a.config, a.sets);
  const Backends backends = resolve_backend(a.backend);

  const fs::path dir(a.out);
  fs::create_directories(dir / "pred");
  write_json(dir / "config.json", to_json(cfg));
  json manifest{{"command", "detect"},
                {"status", "running"},
                {"backend", backend_label(a.backend)},
                {"dataset", a.dataset},
                {"queries", queries_to_json(corpus.queries)},
                {"pairs", json::array()}};
  write_json(dir / "manifest.json", manifest);

  int code = kExitOk;
  std::vector<PairResult> scored;
  RunOptions opts;
  opts.cancel = cancel;
  for (const auto& pair : corpus.pairs) {
    if (cancelled(cancel)) {
      code = kExitInterrupted;
      break;
    }
    const auto outcomes = run_pipeline(pair.t1, pair.t2, corpus.queries, cfg, backends, opts);
    json pj{{"pair", pair.name}, {"queries", json::array()}};
    for (const auto& q : corpus.queries) {
      const QueryOutcome& o = outcomes.at(q.query_id);
      json entry = outcome_json(o);
      code = worse(code, exit_code_for(o.failure));
      const std::string key = label_key(q);
      const fs::path pred_dir = key == kFlatCategory ? dir / "pred" : dir / "pred" / key;
      if (o.ok()) {
        fs::create_directories(pred_dir);
        const fs::path file = pred_dir / (pair.name + ".png");
        io::write_mask_png(file, o.result->change_mask);
        entry["mask"] = fs::relative(file, dir).generic_string();
        const auto label = pair.labels.find(key);
        if (label != pair.labels.end()) {
          PairResult r{pair.name, key, count_confusion(o.result->change_mask, label->second), {}};
          r.metrics = derive_metrics(r.counts);
          entry["metrics"] = {{"precision", r.metrics.precision}, {"recall", r.metrics.recall},
                              {"f1", r.metrics.f1}, {"iou", r.metrics.iou}};
          scored.push_back(std::move(r));
        }
      }
      pj["queries"].push_back(std::move(entry));
    }
    manifest["pairs"].push_back(std::move(pj));
    write_json(dir / "manifest.json", manifest);
  }

  if (!scored.empty()) {
    const EvalReport report = aggregate(scored);
    io::write_text(dir / "report.csv", report_csv(report));
    io::write_text(dir / "report.txt", report_text(report));
    out << "micro " << format_metrics(report.micro) << "\n";
  }
  out << manifest["pairs"].size() << " of " << corpus.pairs.size() << " pairs processed\n";
  manifest["status"] = code == kExitInterrupted ? "cancelled" : code == kExitOk ? "ok" : "failed";
  write_json(dir / "manifest.json", manifest);
  return code;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred, gt, out;
};

int eval_cmd(const EvalArgs& a, std::ostream& out) {
  const EvalReport report = evaluate_predictions(a.pred, a.gt);
  const fs::path dir(a.out.empty() ? a.pred : a.out);
  fs::create_directories(dir);
  io::write_text(dir / "report.csv", report_csv(report));
  io::write_text(dir / "report.txt", report_text(report));
  write_json(dir / "config.json", {{"command", "eval"}, {"pred", a.pred}, {"gt", a.gt}});
  char buf[64];
  std::snprintf(buf, sizeof(buf), "mF1 %.1f mIoU %.1f", 100.0 * report.mf1, 100.0 * report.miou);
  out << "micro " << format_metrics(report.micro) << " | " << buf << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string grid, preset = "ablation", dataset, config, backend = "synthetic", out = "sweep_out";
  std::vector<std::string> sets;
  std::uint64_t seed = 7;
  int n = 20;
  int size = 128;
  double nuisance = 2.0;
};

int sweep_cmd(const SweepArgs& a, std::ostream& out) {
  SweepGrid grid;
  if (!a.grid.empty()) {
    grid = load_grid(a.grid);
  } else if (a.preset == "ablation") {
    grid = ablation_grid();
  } else if (a.preset == "ctmr") {
    grid = ctmr_grid();
  } else if (a.preset == "transition") {
    grid = transition_grid();
  } else {
    throw UsageError("unknown sweep preset '" + a.preset + "'");
  }
  if (!a.config.empty() || !a.sets.empty()) grid.base = resolve_config(a.config, a.sets, grid.base);

  const Corpus corpus = a.dataset.empty()
                            ? synthetic_corpus(a.seed, a.n, a.size, a.nuisance)
                            : load_dataset(a.dataset);
  const Backends backends = resolve_backend(a.backend);
  const SweepTable table = run_sweep(grid, corpus, backends);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  io::write_text(dir / "sweep.csv", sweep_csv(table));
  io::write_text(dir / "sweep.txt", sweep_text(table));
  json rows = json::array();
  for (const auto& r : grid.rows) rows.push_back({{"name", r.name}, {"config", r.overrides}});
  json source = a.dataset.empty()
                    ? json{{"synthetic", {{"seed", a.seed}, {"n", a.n}, {"size", a.size},
                                          {"nuisance_strength", a.nuisance}}}}
                    : json{{"dataset", a.dataset}};
  write_json(dir / "config.json",
             {{"base", to_json(grid.base)},
              {"delta", grid.delta_mode == DeltaMode::Baseline ? "baseline" : "previous"},
              {"baseline", table.baseline},
              {"rows", rows},
              {"corpus", source},
              {"backend", backend_label(a.backend)}});
  out << sweep_text(table);
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::uint64_t seed = 7;
  int n = 20;
  int size = 128;
  double nuisance = 2.0;
  std::string out;
};

int synth_cmd(const SynthArgs& a, std::ostream& out) {
  if (a.n < 0) throw UsageError("--n must be non-negative");
  const auto specs = synthetic_specs(a.seed, a.n, a.size, a.nuisance);
  const Corpus corpus = synthetic_corpus(a.seed, a.n, a.size, a.nuisance);
  const fs::path dir(a.out);
  write_dataset(dir, corpus);
  json scenes = json::array();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    scenes.push_back({{"pair", corpus.pairs[i].name}, {"scene", synthetic::scene_to_json(specs[i])}});
  }
  write_json(dir / "manifest.json", {{"command", "synth"},
                                     {"seed", a.seed},
                                     {"n", a.n},
                                     {"size", a.size},
                                     {"nuisance_strength", a.nuisance},
                                     {"pairs", scenes}});
  write_json(dir / "config.json", to_json(PipelineConfig{}));
  out << "wrote " << a.n << " pairs to " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- bridge-debug

struct BridgeArgs {
  std::string t1, t2, direction = "forward", out;
  int k = 3;
};

int bridge_cmd(const BridgeArgs& a, std::ostream& out) {
  if (a.k < 0) throw UsageError("--k must be non-negative");
  const RasterImage t1 = io::read_rgb_png(a.t1);
  const RasterImage t2 = io::read_rgb_png(a.t2);
  const bool forward = a.direction == "forward";
  if (!forward && a.direction != "backward") {
    throw UsageError("--direction must be forward or backward");
  }
  const BridgedSequence seq = forward ? build_bridged_sequence(t1, t2, a.k, Direction::Forward)
                                      : build_bridged_sequence(t2, t1, a.k, Direction::Backward);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  json frames = json::array();
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%02zu.png", i);
    io::write_rgb_png(dir / name, seq.frames[i]);
    frames.push_back(name);
  }
  PipelineConfig cfg;
  cfg.k_transition = a.k;
  write_json(dir / "config.json", to_json(cfg));
  write_json(dir / "manifest.json", {{"command", "bridge-debug"},
                                     {"direction", to_string(seq.direction)},
                                     {"k", a.k},
                                     {"lambdas", seq.lambdas},
                                     {"frames", frames}});
  out << "wrote " << seq.frames.size() << " frames (" << to_string(seq.direction) << ") to "
      << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

std::string backend_url(const std::string& spec) {
  if (spec.rfind("remote:", 0) == 0) return spec.substr(7);
  if (spec == "remote") {
    const char* env = std::getenv("OVCD_BACKEND_URL");
    if (env == nullptr || *env == '\0') {
      throw UsageError("--backend remote needs a URL (remote:URL or OVCD_BACKEND_URL)");
    }
    return env;
  }
  throw UsageError("unknown backend '" + spec + "'");
}

Backends resolve_backend(const std::string& spec) {
  if (spec == "synthetic") return synthetic::make_backends();
  return make_remote_backends(backend_url(spec));
}

QuerySpec parse_query(const std::string& text) {
  QuerySpec q;
  const auto eq = text.find('=');
  q.query_id = text.substr(0, eq);
  if (eq == std::string::npos) {
    q.prompts = {text};
  } else {
    std::string rest = text.substr(eq + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      const auto comma = rest.find(',', start);
      const std::string p =
          rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!p.empty()) q.prompts.push_back(p);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (q.query_id.empty() || q.prompts.empty()) {
    throw UsageError("malformed --query '" + text + "' (expected id or id=prompt,prompt)");
  }
  if (synthetic::find_category(q.query_id)) q.category = q.query_id;
  return q;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* cancel) {
  CLI::App app{"Training-free open-vocabulary change detection", "ovcd"};
  app.require_subcommand(1);

  DetectArgs detect;
  CLI::App* detect_cmd = app.add_subcommand("detect", "Detect changes for text queries");
  detect_cmd->add_option("--t1", detect.t1, "Image at the first timestamp (PNG)");
  detect_cmd->add_option("--t2", detect.t2, "Image at the second timestamp (PNG)");
  detect_cmd->add_option("--dataset", detect.dataset, "Run over a dataset directory instead");
  detect_cmd->add_option("--query", detect.queries, "id or id=prompt,prompt (repeatable)");
  detect_cmd->add_option("--config", detect.config, "Pipeline config JSON");
  detect_cmd->add_option("--set", detect.sets, "Config override key=value (repeatable)");
  detect_cmd->add_option("--backend", detect.backend, "synthetic | remote | remote:URL");
  detect_cmd->add_option("--out", detect.out, "Output directory");

  EvalArgs eval;
  CLI::App* eval_app = app.add_subcommand("eval", "Score prediction masks against labels");
  eval_app->add_option("--pred", eval.pred, "Prediction directory")->required();
  eval_app->add_option("--gt", eval.gt, "Dataset root or its label/ directory")->required();
  eval_app->add_option("--out", eval.out, "Report directory (default: --pred)");

  SweepArgs sweep;
  CLI::App* sweep_app = app.add_subcommand("sweep", "Run an ablation or sensitivity sweep");
  sweep_app->add_option("--grid", sweep.grid, "Grid JSON file");
  sweep_app->add_option("--preset", sweep.preset, "ablation | ctmr | transition");
  sweep_app->add_option("--dataset", sweep.dataset, "Dataset directory (default: synthetic)");
  sweep_app->add_option("--seed", sweep.seed, "Synthetic corpus seed");
  sweep_app->add_option("--n", sweep.n, "Synthetic corpus size");
  sweep_app->add_option("--size", sweep.size, "Synthetic image side");
  sweep_app->add_option("--nuisance", sweep.nuisance, "Synthetic nuisance strength");
  sweep_app->add_option("--config", sweep.config, "Base config JSON");
  sweep_app->add_option("--set", sweep.sets, "Base config override key=value (repeatable)");
  sweep_app->add_option("--backend", sweep.backend, "synthetic | remote | remote:URL");
  sweep_app->add_option("--out", sweep.out, "Output directory");

  SynthArgs synth;
  CLI::App* synth_app = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_app->add_option("--seed", synth.seed, "Corpus seed");
  synth_app->add_option("--n", synth.n, "Number of pairs");
  synth_app->add_option("--size", synth.size, "Image side in pixels");
  synth_app->add_option("--nuisance", synth.nuisance, "Nuisance strength applied to t2");
  synth_app->add_option("--out", synth.out, "Output directory")->required();

  BridgeArgs bridge;
  CLI::App* bridge_app = app.add_subcommand("bridge-debug", "Write a bridged frame sequence");
  bridge_app->add_option("--t1", bridge.t1, "Image at the first timestamp")->required();
  bridge_app->add_option("--t2", bridge.t2, "Image at the second timestamp")->required();
  bridge_app->add_option("--k", bridge.k, "Number of transition frames");
  bridge_app->add_option("--direction", bridge.direction, "forward | backward");
  bridge_app->add_option("--out", bridge.out, "Output directory")->required();

  CLI::App* active = &app;
  try {
    app.parse(argc, argv);
    for (CLI::App* sub : app.get_subcommands()) active = sub;

    if (detect_cmd->parsed()) {
      if (!detect.dataset.empty()) return detect_dataset(detect, out, cancel);
      if (detect.t1.empty() || detect.t2.empty()) {
        throw UsageError("--t1 and --t2 are required unless --dataset is given");
      }
      return detect_pair(detect, out, cancel);
    }
    if (eval_app->parsed()) return eval_cmd(eval, out);
    if (sweep_app->parsed()) return sweep_cmd(sweep, out);
    if (synth_app->parsed()) return synth_cmd(synth, out);
    if (bridge_app->parsed()) return bridge_cmd(bridge, out);
    return kExitInvalidArgs;
  } catch (const CLI::CallForHelp&) {
    out << active->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    for (CLI::App* sub : app.get_subcommands()) active = sub;
    err << "error: " << e.what() << "\n" << active->help();
    return kExitInvalidArgs;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << active->help();
    return kExitInvalidArgs;
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidArgs;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidArgs;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace ovcd::cli
