#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ovcd/backends.hpp"
#include "ovcd/config.hpp"
#include "ovcd/metrics.hpp"
#include "ovcd/scene.hpp"

namespace ovcd {

// On-disk layout:
//   A/<name>.png, B/<name>.png            bi-temporal pair
//   label/<name>.png                      binary change label (category "change")
//   label/<category>/<name>.png           per-category labels (multi-class)
//   queries.json                          optional [{query_id, prompts, category}]
inline constexpr const char* kFlatCategory = "change";

struct CorpusPair {
  std::string name;
  RasterImage t1;
  RasterImage t2;
  std::map<std::string, BitMask> labels;  // category -> change label
};

struct Corpus {
  std::vector<CorpusPair> pairs;
  std::vector<QuerySpec> queries;
};

// Label key a query is scored against.
std::string label_key(const QuerySpec& q);

// n generated scene pairs named pair_0000..; pair i uses a seed derived from
// (seed, i).
Corpus synthetic_corpus(std::uint64_t seed, int n, int size,
                        double nuisance_strength = 1.0);
std::vector<synthetic::SceneSpec> synthetic_specs(std::uint64_t seed, int n, int size,
                                                  double nuisance_strength = 1.0);

Corpus load_dataset(const std::filesystem::path& root);
void write_dataset(const std::filesystem::path& root, const Corpus& corpus);

nlohmann::json queries_to_json(const std::vector<QuerySpec>& queries);
std::vector<QuerySpec> queries_from_json(const nlohmann::json& j);

// Runs the pipeline on every pair and scores each query against its label.
// Failed queries count as empty predictions.
EvalReport evaluate_corpus(const Corpus& corpus, const PipelineConfig& cfg,
                           const Backends& backends);

// Scores prediction masks laid out like label/ against a dataset's labels.
// `gt` may be the dataset root or its label/ directory. Throws IoError when a
// prediction is missing.
EvalReport evaluate_predictions(const std::filesystem::path& pred,
                                const std::filesystem::path& gt);

}  // namespace ovcd
