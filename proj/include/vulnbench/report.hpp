#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "vulnbench/result.hpp"
#include "vulnbench/rounding.hpp"

namespace vulnbench {

enum class ReportFormat { markdown, csv, json };

/// Which FP-ratio column the markdown/csv averages show.
enum class FpRatioMode { pooled, mean };

inline std::optional<ReportFormat> parse_report_format(std::string_view s) {
  if (s == "md" || s == "markdown") return ReportFormat::markdown;
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  return std::nullopt;
}

inline std::string format_seconds(double seconds) { return format_fixed3(seconds) + "s"; }

namespace detail {

inline std::string md_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n' || c == '\r') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline const AggregateMetrics* aggregate_for(const BenchmarkResult& r, const std::string& analyzer) {
  for (const auto& a : r.aggregates) {
    if (a.analyzer_id == analyzer) return &a;
  }
  return nullptr;
}

inline std::string render_markdown(const BenchmarkResult& r, FpRatioMode fp_mode) {
  std::ostringstream out;
  out << "# Vulnerability detection benchmark\n";

  for (const std::string& a : r.analyzers) {
    out << "\n## " << md_escape(a) << "\n\n"
        << "| Project | Total Found | True Positive | False Positive | False Negative | Precision | Recall | F1 Score |\n"
        << "|---|---|---|---|---|---|---|---|\n";
    for (const std::string& p : r.projects) {
      const Cell* c = r.find(a, p);
      if (c == nullptr) continue;
      if (!c->ok()) {
        out << "| " << md_escape(p) << " | FAILED: " << md_escape(*c->error) << " | | | | | | |\n";
        continue;
      }
      const MetricsRecord& m = c->metrics;
      out << "| " << md_escape(p) << " | " << m.total_found << " | " << m.true_positives << " | "
          << m.false_positives << " | " << m.false_negatives << " | " << format_fixed3(m.precision) << " | "
          << format_fixed3(m.recall) << " | " << format_fixed3(m.f1) << " |\n";
    }
  }

  const char* ratio_label = fp_mode == FpRatioMode::pooled ? "FP Ratio (pooled)" : "FP Ratio (mean)";
  out << "\n## Averages\n\n"
      << "| Tool | Avg. Precision | Avg. Recall | Avg. F1 Score | " << ratio_label << " |\n"
      << "|---|---|---|---|---|\n";
  for (const std::string& a : r.analyzers) {
    const AggregateMetrics* g = aggregate_for(r, a);
    if (g == nullptr) {
      out << "| " << md_escape(a) << " | n/a | n/a | n/a | n/a |\n";
      continue;
    }
    const double ratio = fp_mode == FpRatioMode::pooled ? g->fp_ratio : g->fp_ratio_mean;
    out << "| " << md_escape(a) << " | " << format_fixed3(g->avg_precision) << " | " << format_fixed3(g->avg_recall)
        << " | " << format_fixed3(g->avg_f1) << " | " << format_fixed3(ratio) << " |\n";
  }

  out << "\n## Execution time\n\n| Project |";
  for (const std::string& a : r.analyzers) out << ' ' << md_escape(a) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < r.analyzers.size(); ++i) out << "---|";
  out << '\n';
  for (const std::string& p : r.projects) {
    out << "| " << md_escape(p) << " |";
    for (const std::string& a : r.analyzers) {
      const Cell* c = r.find(a, p);
      out << ' ' << (c && c->timing_measured ? format_seconds(c->seconds) : std::string("n/a")) << " |";
    }
    out << '\n';
  }
  if (r.mode != "replay" && !r.analyzers.empty()) {
    out << "\nModel timings are end-to-end wall clock, provider queueing included; "
           "imported tool timings come from their .time sidecars.\n";
  }
  return out.str();
}

inline std::string render_csv(const BenchmarkResult& r, FpRatioMode fp_mode) {
  std::ostringstream out;
  out << "analyzer,project,metric,value\n";
  const auto row = [&](const std::string& a, const std::string& p, std::string_view metric, const std::string& value) {
    out << csv_field(a) << ',' << csv_field(p) << ',' << metric << ',' << csv_field(value) << '\n';
  };
  for (const std::string& a : r.analyzers) {
    for (const std::string& p : r.projects) {
      const Cell* c = r.find(a, p);
      if (c == nullptr) continue;
      if (!c->ok()) {
        row(a, p, "error", *c->error);
        continue;
      }
      const MetricsRecord& m = c->metrics;
      row(a, p, "total_found", std::to_string(m.total_found));
      row(a, p, "true_positives", std::to_string(m.true_positives));
      row(a, p, "known", std::to_string(m.known));
      row(a, p, "false_positives", std::to_string(m.false_positives));
      row(a, p, "false_negatives", std::to_string(m.false_negatives));
      row(a, p, "precision", format_fixed3(m.precision));
      row(a, p, "recall", format_fixed3(m.recall));
      row(a, p, "f1", format_fixed3(m.f1));
      if (c->timing_measured) row(a, p, "seconds", format_fixed3(c->seconds));
    }
  }
  for (const std::string& a : r.analyzers) {
    const AggregateMetrics* g = aggregate_for(r, a);
    if (g == nullptr) continue;
    row(a, "ALL", "avg_precision", format_fixed3(g->avg_precision));
    row(a, "ALL", "avg_recall", format_fixed3(g->avg_recall));
    row(a, "ALL", "avg_f1", format_fixed3(g->avg_f1));
    if (fp_mode == FpRatioMode::pooled) {
      row(a, "ALL", "fp_ratio_pooled", format_fixed3(g->fp_ratio));
    } else {
      row(a, "ALL", "fp_ratio_mean", format_fixed3(g->fp_ratio_mean));
    }
  }
  return out.str();
}

}  // namespace detail

/// Deterministic rendering: analyzers in config order, projects by id.
inline std::string render_report(const BenchmarkResult& result, ReportFormat format,
                                 FpRatioMode fp_mode = FpRatioMode::pooled) {
  switch (format) {
    case ReportFormat::markdown: return detail::render_markdown(result, fp_mode);
    case ReportFormat::csv: return detail::render_csv(result, fp_mode);
    case ReportFormat::json: return to_json(result).dump(2) + "\n";
  }
  return {};
}

}  // namespace vulnbench
