#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vulnbench/error.hpp"
#include "vulnbench/matcher.hpp"

namespace vulnbench {

struct MetricsRecord {
  std::string analyzer_id;
  std::string project_id;
  std::size_t total_found = 0;
  std::size_t true_positives = 0;
  std::size_t known = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  // Full precision; round only for display.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct AggregateMetrics {
  std::string analyzer_id;
  std::size_t project_count = 0;
  double avg_precision = 0.0;
  double avg_recall = 0.0;
  double avg_f1 = 0.0;
  double fp_ratio = 0.0;       // pooled: sum FP / sum total found
  double fp_ratio_mean = 0.0;  // mean of per-project FP/total over projects with findings
  std::size_t total_found = 0;
  std::size_t false_positives = 0;
};

/// n/d with 0/0 defined as 0.
inline double safe_ratio(double n, double d) { return d == 0.0 ? 0.0 : n / d; }

/// Harmonic mean; 0 when both inputs are 0.
inline double f1_score(double precision, double recall) {
  return safe_ratio(2.0 * precision * recall, precision + recall);
}

inline MetricsRecord compute_metrics(const RawCounts& counts, std::string analyzer_id, std::string project_id) {
  if (counts.true_positives > counts.total_found || counts.true_positives > counts.known_vulnerabilities) {
    throw Error(ErrorCode::InconsistentReport, "true positives exceed total found or known",
                analyzer_id + "/" + project_id);
  }
  MetricsRecord m;
  m.analyzer_id = std::move(analyzer_id);
  m.project_id = std::move(project_id);
  m.total_found = counts.total_found;
  m.true_positives = counts.true_positives;
  m.known = counts.known_vulnerabilities;
  m.false_positives = counts.total_found - counts.true_positives;
  m.false_negatives = counts.known_vulnerabilities - counts.true_positives;
  const auto tp = static_cast<double>(m.true_positives);
  m.precision = safe_ratio(tp, tp + static_cast<double>(m.false_positives));
  m.recall = safe_ratio(tp, tp + static_cast<double>(m.false_negatives));
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

/// Unweighted means across projects. `totals` must be aligned with `records`.
inline AggregateMetrics aggregate(const std::vector<MetricsRecord>& records, const std::vector<RawCounts>& totals) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no metrics records to aggregate");
  if (totals.size() != records.size()) {
    throw Error(ErrorCode::InconsistentReport, "records and totals differ in length");
  }
  AggregateMetrics agg;
  agg.analyzer_id = records.front().analyzer_id;
  agg.project_count = records.size();
  double ratio_sum = 0.0;
  std::size_t ratio_n = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const MetricsRecord& r = records[i];
    if (r.analyzer_id != agg.analyzer_id) {
      throw Error(ErrorCode::MixedAnalyzers, "'" + r.analyzer_id + "' mixed with '" + agg.analyzer_id + "'");
    }
    agg.avg_precision += r.precision;
    agg.avg_recall += r.recall;
    agg.avg_f1 += r.f1;
    const RawCounts& t = totals[i];
    if (t.true_positives > t.total_found) {
      throw Error(ErrorCode::InconsistentReport, "true positives exceed total found", r.project_id);
    }
    const std::size_t fp = t.total_found - t.true_positives;
    agg.total_found += t.total_found;
    agg.false_positives += fp;
    if (t.total_found > 0) {
      ratio_sum += static_cast<double>(fp) / static_cast<double>(t.total_found);
      ++ratio_n;
    }
  }
  const auto n = static_cast<double>(records.size());
  agg.avg_precision /= n;
  agg.avg_recall /= n;
  agg.avg_f1 /= n;
  agg.fp_ratio = safe_ratio(static_cast<double>(agg.false_positives), static_cast<double>(agg.total_found));
  agg.fp_ratio_mean = safe_ratio(ratio_sum, static_cast<double>(ratio_n));
  return agg;
}

inline AggregateMetrics aggregate(const std::vector<MetricsRecord>& records) {
  std::vector<RawCounts> totals;
  totals.reserve(records.size());
  for (const auto& r : records) totals.push_back({r.total_found, r.true_positives, r.known});
  return aggregate(records, totals);
}

}  // namespace vulnbench
