#pragma once

// Benchmark result model and its JSON form (result.json).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vulnbench/error.hpp"
#include "vulnbench/matcher.hpp"
#include "vulnbench/metrics.hpp"

namespace vulnbench {

/// Per-(analyzer, project) accounting carried alongside the SARIF file.
struct RunSummary {
  std::size_t finding_count = 0;
  std::size_t draft_count = 0;
  std::size_t rejected_draft_count = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  int retries = 0;
  std::vector<std::string> notes;
  bool operator==(const RunSummary&) const = default;
};

/// One (analyzer, project) cell. Either `error` is set or metrics are valid.
struct Cell {
  std::string analyzer_id;
  std::string project_id;
  std::optional<std::string> error;
  RawCounts counts;
  MetricsRecord metrics;
  double seconds = 0.0;
  bool timing_measured = false;
  std::optional<RunSummary> run;
  std::optional<MatchReport> match;
  std::string policy;  // strictness used for matching, empty for replayed counts

  bool ok() const { return !error.has_value(); }
};

struct BenchmarkResult {
  std::string mode;                    // "benchmark" or "replay"
  std::vector<std::string> analyzers;  // config order
  std::vector<std::string> projects;   // lexicographic
  std::vector<Cell> cells;             // analyzer-major, then project
  std::vector<AggregateMetrics> aggregates;

  const Cell* find(const std::string& analyzer, const std::string& project) const {
    for (const Cell& c : cells) {
      if (c.analyzer_id == analyzer && c.project_id == project) return &c;
    }
    return nullptr;
  }
};

/// Fills `aggregates` from successful cells, one entry per analyzer that has any.
inline void compute_aggregates(BenchmarkResult& result) {
  result.aggregates.clear();
  for (const std::string& a : result.analyzers) {
    std::vector<MetricsRecord> records;
    for (const Cell& c : result.cells) {
      if (c.analyzer_id == a && c.ok()) records.push_back(c.metrics);
    }
    if (!records.empty()) result.aggregates.push_back(aggregate(records));
  }
}

using nlohmann::ordered_json;

inline ordered_json to_json(const BenchmarkResult& result) {
  ordered_json doc;
  doc["mode"] = result.mode;
  doc["analyzers"] = result.analyzers;
  doc["projects"] = result.projects;
  ordered_json cells = ordered_json::array();
  for (const Cell& c : result.cells) {
    ordered_json j;
    j["analyzer"] = c.analyzer_id;
    j["project"] = c.project_id;
    if (c.error) {
      j["status"] = "failed";
      j["error"] = *c.error;
    } else {
      j["status"] = "ok";
      j["total_found"] = c.counts.total_found;
      j["true_positives"] = c.counts.true_positives;
      j["known"] = c.counts.known_vulnerabilities;
      j["false_positives"] = c.metrics.false_positives;
      j["false_negatives"] = c.metrics.false_negatives;
      j["precision"] = c.metrics.precision;
      j["recall"] = c.metrics.recall;
      j["f1"] = c.metrics.f1;
    }
    if (!c.policy.empty()) j["policy"] = c.policy;
    j["seconds"] = c.seconds;
    j["timing_measured"] = c.timing_measured;
    if (c.run) {
      ordered_json r;
      r["finding_count"] = c.run->finding_count;
      r["draft_count"] = c.run->draft_count;
      r["rejected_draft_count"] = c.run->rejected_draft_count;
      r["prompt_tokens"] = c.run->prompt_tokens;
      r["completion_tokens"] = c.run->completion_tokens;
      r["retries"] = c.run->retries;
      r["notes"] = c.run->notes;
      j["run"] = std::move(r);
    }
    if (c.match) {
      ordered_json m;
      ordered_json pairs = ordered_json::array();
      for (const auto& p : c.match->pairs) pairs.push_back({{"finding", p.finding_index}, {"vuln", p.vuln_id}});
      m["pairs"] = std::move(pairs);
      m["unmatched_findings"] = c.match->unmatched_findings;
      m["unmatched_vulns"] = c.match->unmatched_vulns;
      j["match"] = std::move(m);
    }
    cells.push_back(std::move(j));
  }
  doc["cells"] = std::move(cells);

  ordered_json aggs = ordered_json::array();
  for (const AggregateMetrics& a : result.aggregates) {
    ordered_json j;
    j["analyzer"] = a.analyzer_id;
    j["projects"] = a.project_count;
    j["avg_precision"] = a.avg_precision;
    j["avg_recall"] = a.avg_recall;
    j["avg_f1"] = a.avg_f1;
    j["fp_ratio_pooled"] = a.fp_ratio;
    j["fp_ratio_mean"] = a.fp_ratio_mean;
    j["total_found"] = a.total_found;
    j["false_positives"] = a.false_positives;
    aggs.push_back(std::move(j));
  }
  doc["aggregates"] = std::move(aggs);
  return doc;
}

inline BenchmarkResult result_from_json(std::string_view text) {
  using nlohmann::json;
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::MalformedJson, "result file is not a JSON object");
  BenchmarkResult result;
  try {
    result.mode = doc.value("mode", std::string("benchmark"));
    result.analyzers = doc.at("analyzers").get<std::vector<std::string>>();
    result.projects = doc.at("projects").get<std::vector<std::string>>();
    for (const json& j : doc.at("cells")) {
      Cell c;
      c.analyzer_id = j.at("analyzer").get<std::string>();
      c.project_id = j.at("project").get<std::string>();
      if (j.value("status", std::string("ok")) == "failed") {
        c.error = j.value("error", std::string("unknown failure"));
      } else {
        c.counts = {j.at("total_found").get<std::size_t>(), j.at("true_positives").get<std::size_t>(),
                    j.at("known").get<std::size_t>()};
        c.metrics = compute_metrics(c.counts, c.analyzer_id, c.project_id);
      }
      c.policy = j.value("policy", std::string());
      c.seconds = j.value("seconds", 0.0);
      c.timing_measured = j.value("timing_measured", false);
      if (auto r = j.find("run"); r != j.end()) {
        RunSummary s;
        s.finding_count = r->value("finding_count", std::size_t{0});
        s.draft_count = r->value("draft_count", std::size_t{0});
        s.rejected_draft_count = r->value("rejected_draft_count", std::size_t{0});
        s.prompt_tokens = r->value("prompt_tokens", std::int64_t{0});
        s.completion_tokens = r->value("completion_tokens", std::int64_t{0});
        s.retries = r->value("retries", 0);
        s.notes = r->value("notes", std::vector<std::string>{});
        c.run = std::move(s);
      }
      if (auto m = j.find("match"); m != j.end()) {
        MatchReport rep;
        for (const json& p : m->at("pairs")) rep.pairs.push_back({p.at("finding").get<std::size_t>(), p.at("vuln").get<std::string>()});
        rep.unmatched_findings = m->at("unmatched_findings").get<std::vector<std::size_t>>();
        rep.unmatched_vulns = m->at("unmatched_vulns").get<std::vector<std::string>>();
        c.match = std::move(rep);
      }
      result.cells.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, e.what(), "result");
  }
  compute_aggregates(result);
  return result;
}

}  // namespace vulnbench
