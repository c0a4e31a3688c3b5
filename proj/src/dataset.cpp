#include "ovcd/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "ovcd/error.hpp"
#include "ovcd/image_io.hpp"
#include "ovcd/pipeline.hpp"

namespace ovcd {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> png_stems(const fs::path& dir) {
  std::vector<std::string> names;
  if (!fs::is_directory(dir)) return names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") {
      names.push_back(e.path().stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<std::string> subdirs(const fs::path& dir) {
  std::vector<std::string> names;
  if (!fs::is_directory(dir)) return names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

// category -> directory holding <name>.png labels.
std::map<std::string, fs::path> label_dirs(const fs::path& label_root) {
  std::map<std::string, fs::path> dirs;
  const auto cats = subdirs(label_root);
  if (cats.empty()) {
    dirs[kFlatCategory] = label_root;
  } else {
    for (const auto& c : cats) dirs[c] = label_root / c;
  }
  return dirs;
}

std::uint64_t pair_seed(std::uint64_t seed, int i) {
  return seed * 1000003ULL + static_cast<std::uint64_t>(i);
}

}  // namespace

std::string label_key(const QuerySpec& q) { return q.category.value_or(q.query_id); }

std::vector<synthetic::SceneSpec> synthetic_specs(std::uint64_t seed, int n, int size,
                                                  double nuisance_strength) {
  if (n < 0 || size < 16) throw InvalidArgument("synthetic corpus needs n >= 0, size >= 16");
  synthetic::SceneOptions opt;
  opt.width = size;
  opt.height = size;
  opt.nuisance_strength = nuisance_strength;
  // Keep object density roughly constant across canvas sizes.
  const double area_scale = (size * size) / (128.0 * 128.0);
  opt.min_footprints = std::max(4, static_cast<int>(8 * area_scale));
  opt.max_footprints = std::max(opt.min_footprints, static_cast<int>(12 * area_scale));
  std::vector<synthetic::SceneSpec> specs;
  for (int i = 0; i < n; ++i) specs.push_back(synthetic::generate_scene(pair_seed(seed, i), opt));
  return specs;
}

Corpus synthetic_corpus(std::uint64_t seed, int n, int size, double nuisance_strength) {
  Corpus corpus;
  corpus.queries = synthetic::default_queries();
  const auto specs = synthetic_specs(seed, n, size, nuisance_strength);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto scene = synthetic::render_scene(specs[i]);
    char name[32];
    std::snprintf(name, sizeof(name), "pair_%04zu", i);
    corpus.pairs.push_back({name, std::move(scene.t1), std::move(scene.t2),
                            std::move(scene.change)});
  }
  return corpus;
}

nlohmann::json queries_to_json(const std::vector<QuerySpec>& queries) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& q : queries) {
    nlohmann::json j = {{"query_id", q.query_id}, {"prompts", q.prompts}};
    if (q.category) j["category"] = *q.category;
    arr.push_back(j);
  }
  return arr;
}

std::vector<QuerySpec> queries_from_json(const nlohmann::json& j) {
  std::vector<QuerySpec> out;
  try {
    for (const auto& q : j) {
      QuerySpec spec;
      spec.query_id = q.at("query_id").get<std::string>();
      spec.prompts = q.at("prompts").get<std::vector<std::string>>();
      if (q.contains("category")) spec.category = q.at("category").get<std::string>();
      if (spec.prompts.empty()) throw InvalidArgument("query '" + spec.query_id + "' has no prompts");
      out.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed queries: ") + e.what());
  }
  return out;
}

Corpus load_dataset(const fs::path& root) {
  if (!fs::is_directory(root / "A") || !fs::is_directory(root / "B")) {
    throw IoError("dataset " + root.string() + " lacks A/ and B/ directories");
  }
  Corpus corpus;
  const auto dirs = label_dirs(root / "label");
  for (const auto& name : png_stems(root / "A")) {
    CorpusPair pair;
    pair.name = name;
    pair.t1 = io::read_rgb_png(root / "A" / (name + ".png"));
    const fs::path b = root / "B" / (name + ".png");
    if (!fs::exists(b)) throw IoError("missing pair image " + b.string());
    pair.t2 = io::read_rgb_png(b);
    if (fs::is_directory(root / "label")) {
      for (const auto& [cat, dir] : dirs) {
        const fs::path l = dir / (name + ".png");
        if (!fs::exists(l)) throw IoError("missing label " + l.string());
        pair.labels[cat] = io::read_mask_png(l);
      }
    }
    corpus.pairs.push_back(std::move(pair));
  }
  if (fs::exists(root / "queries.json")) {
    std::ifstream in(root / "queries.json");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("queries.json: ") + e.what());
    }
    corpus.queries = queries_from_json(j);
  } else {
    corpus.queries = {{kFlatCategory, {"building"}, std::string(kFlatCategory)}};
  }
  return corpus;
}

void write_dataset(const fs::path& root, const Corpus& corpus) {
  fs::create_directories(root / "A");
  fs::create_directories(root / "B");
  fs::create_directories(root / "label");
  for (const auto& q : corpus.queries) fs::create_directories(root / "label" / label_key(q));
  for (const auto& p : corpus.pairs) {
    io::write_rgb_png(root / "A" / (p.name + ".png"), p.t1);
    io::write_rgb_png(root / "B" / (p.name + ".png"), p.t2);
    for (const auto& [cat, mask] : p.labels) {
      fs::create_directories(root / "label" / cat);
      io::write_mask_png(root / "label" / cat / (p.name + ".png"), mask);
    }
  }
  io::write_text(root / "queries.json", queries_to_json(corpus.queries).dump(2));
}

EvalReport evaluate_corpus(const Corpus& corpus, const PipelineConfig& cfg,
                           const Backends& backends) {
  std::vector<PairResult> results;
  for (const auto& pair : corpus.pairs) {
    const auto outcomes = run_pipeline(pair.t1, pair.t2, corpus.queries, cfg, backends);
    for (const auto& q : corpus.queries) {
      const auto label = pair.labels.find(label_key(q));
      if (label == pair.labels.end()) continue;
      const QueryOutcome& o = outcomes.at(q.query_id);
      const BitMask pred = o.ok() ? o.result->change_mask
                                  : BitMask(pair.t1.width(), pair.t1.height());
      PairResult r{pair.name, label_key(q), count_confusion(pred, label->second), {}};
      r.metrics = derive_metrics(r.counts);
      results.push_back(std::move(r));
    }
  }
  return aggregate(results);
}

EvalReport evaluate_predictions(const fs::path& pred, const fs::path& gt) {
  const fs::path label_root = fs::is_directory(gt / "label") ? gt / "label" : gt;
  if (!fs::is_directory(label_root)) throw IoError("no label directory under " + gt.string());
  const auto dirs = label_dirs(label_root);
  std::vector<PairResult> results;
  for (const auto& [cat, dir] : dirs) {
    const fs::path pred_dir = cat == kFlatCategory && dir == label_root ? pred : pred / cat;
    for (const auto& name : png_stems(dir)) {
      const fs::path p = pred_dir / (name + ".png");
      if (!fs::exists(p)) throw IoError("missing prediction " + p.string());
      PairResult r{name, cat, count_confusion(io::read_mask_png(p),
                                              io::read_mask_png(dir / (name + ".png"))),
                   {}};
      r.metrics = derive_metrics(r.counts);
      results.push_back(std::move(r));
    }
  }
  if (results.empty()) throw IoError("no labels found under " + label_root.string());
  return aggregate(results);
}

}  // namespace ovcd
