#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ovcd/raster.hpp"

namespace ovcd {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double iou = 0.0;
};

ConfusionCounts count_confusion(const BitMask& pred, const BitMask& gt);

// Change-class metrics. 0/0 evaluates to 1 when prediction and ground truth
// are both empty and to 0 otherwise. F1 is computed as 2tp/(2tp+fp+fn), so
// F1 == 2 IoU / (1 + IoU) holds for any counts.
Metrics derive_metrics(const ConfusionCounts& c);

struct PairResult {
  std::string pair;
  std::string category;
  ConfusionCounts counts;
  Metrics metrics;
};

enum class AggregationMode { Micro, Macro };

struct EvalReport {
  std::vector<PairResult> pairs;
  std::map<std::string, ConfusionCounts> category_counts;
  std::map<std::string, Metrics> category_metrics;  // pooled within category
  ConfusionCounts pooled;
  Metrics micro;      // over summed counts
  double mf1 = 0.0;   // unweighted mean over categories
  double miou = 0.0;
};

// Builds the report from per-(pair, category) results. Throws on empty input.
EvalReport aggregate(const std::vector<PairResult>& results);

// Headline metrics of a report in the requested mode. Macro precision and
// recall are category means as well.
Metrics headline(const EvalReport& report, AggregationMode mode);

// "Prec 91.2 Rec 88.0 F1 89.6 IoU 81.1" style line, percent with one decimal.
std::string format_metrics(const Metrics& m);

std::string report_csv(const EvalReport& report);
std::string report_text(const EvalReport& report);

}  // namespace ovcd
