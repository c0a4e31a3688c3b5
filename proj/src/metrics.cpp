#include "ovcd/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "ovcd/error.hpp"
#include "ovcd/kernels.hpp"

namespace ovcd {

namespace {

double ratio_or(std::uint64_t num, std::uint64_t den, bool both_empty) {
  if (den == 0) return both_empty ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
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

}  // namespace

ConfusionCounts count_confusion(const BitMask& pred, const BitMask& gt) {
  require_same_dims(pred, gt, "count_confusion");
  const auto c = kernels::parallel::confusion(pred.bits(), gt.bits());
  return {c.tp, c.fp, c.fn, c.tn};
}

Metrics derive_metrics(const ConfusionCounts& c) {
  const bool both_empty = c.tp + c.fp + c.fn == 0;
  Metrics m;
  m.precision = ratio_or(c.tp, c.tp + c.fp, both_empty);
  m.recall = ratio_or(c.tp, c.tp + c.fn, both_empty);
  m.f1 = ratio_or(2 * c.tp, 2 * c.tp + c.fp + c.fn, both_empty);
  m.iou = ratio_or(c.tp, c.tp + c.fp + c.fn, both_empty);
  return m;
}

EvalReport aggregate(const std::vector<PairResult>& results) {
  if (results.empty()) throw InvalidArgument("aggregate: no results");
  EvalReport r;
  r.pairs = results;
  for (const auto& p : results) {
    r.category_counts[p.category] += p.counts;
    r.pooled += p.counts;
  }
  for (const auto& [cat, counts] : r.category_counts) {
    r.category_metrics[cat] = derive_metrics(counts);
  }
  r.micro = derive_metrics(r.pooled);
  double f1 = 0.0, iou = 0.0;
  for (const auto& [cat, m] : r.category_metrics) {
    f1 += m.f1;
    iou += m.iou;
  }
  const double n = static_cast<double>(r.category_metrics.size());
  r.mf1 = f1 / n;
  r.miou = iou / n;
  return r;
}

Metrics headline(const EvalReport& report, AggregationMode mode) {
  if (mode == AggregationMode::Micro) return report.micro;
  Metrics m;
  for (const auto& [cat, cm] : report.category_metrics) {
    m.precision += cm.precision;
    m.recall += cm.recall;
  }
  const double n = static_cast<double>(report.category_metrics.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 = report.mf1;
  m.iou = report.miou;
  return m;
}

std::string format_metrics(const Metrics& m) {
  return "Prec " + pct(m.precision) + " Rec " + pct(m.recall) + " F1 " + pct(m.f1) +
         " IoU " + pct(m.iou);
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "pair,category,tp,fp,fn,tn,precision,recall,f1,iou\n";
  auto row = [&](const std::string& pair, const std::string& cat,
                 const ConfusionCounts& c, const Metrics& m) {
    os << pair << ',' << cat << ',' << c.tp << ',' << c.fp << ',' << c.fn << ','
       << c.tn << ',' << fixed6(m.precision) << ',' << fixed6(m.recall) << ','
       << fixed6(m.f1) << ',' << fixed6(m.iou) << '\n';
  };
  for (const auto& p : report.pairs) row(p.pair, p.category, p.counts, p.metrics);
  for (const auto& [cat, c] : report.category_counts) {
    row("*", cat, c, report.category_metrics.at(cat));
  }
  row("*", "*", report.pooled, report.micro);
  return os.str();
}

std::string report_text(const EvalReport& report) {
  std::ostringstream os;
  os << "pairs evaluated: " << report.pairs.size() << "\n";
  for (const auto& [cat, m] : report.category_metrics) {
    os << "  " << cat << ": " << format_metrics(m) << "\n";
  }
  os << "micro: " << format_metrics(report.micro) << "\n";
  os << "macro: mF1 " << pct(report.mf1) << " mIoU " << pct(report.miou) << "\n";
  return os.str();
}

}  // namespace ovcd
