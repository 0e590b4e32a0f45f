#pragma once

// Benchmark orchestration: corpus discovery, per-cell analysis or import,
// matching, metrics and on-disk artifacts.
//
// Output layout under output_dir:
//   <analyzer>/<project>.sarif     normalized SARIF 2.1.0
//   <analyzer>/<project>.time      wall seconds, 3 decimals (when measured)
//   <analyzer>/<project>.run.json  draft/rejection/token accounting
//   result.json, report.md, report.csv

#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vulnbench/config.hpp"
#include "vulnbench/corpus.hpp"
#include "vulnbench/error.hpp"
#include "vulnbench/llm_analyzer.hpp"
#include "vulnbench/matcher.hpp"
#include "vulnbench/metrics.hpp"
#include "vulnbench/report.hpp"
#include "vulnbench/result.hpp"
#include "vulnbench/rounding.hpp"
#include "vulnbench/sarif.hpp"

namespace vulnbench {

struct CorpusProject {
  std::string id;
  fs::path dir;
  std::optional<ProjectSource> source;
  std::optional<GroundTruthManifest> manifest;
  std::optional<std::string> error;  // load failure, reported on every cell of this project
};

/// Every non-hidden subdirectory of `root` with a ground-truth manifest, by id.
inline std::vector<CorpusProject> load_corpus(const fs::path& root, const std::vector<std::string>& extensions) {
  std::vector<CorpusProject> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.empty() || name.front() == '.') continue;
    if (!fs::exists(entry.path() / kGroundTruthFile)) continue;

    CorpusProject p;
    p.id = name;
    p.dir = entry.path();
    try {
      p.manifest = load_ground_truth(entry.path() / kGroundTruthFile);
      if (p.manifest->project_id != name) {
        throw Error(ErrorCode::ProjectMismatch,
                    "manifest projectId '" + p.manifest->project_id + "' differs from directory name", name);
      }
      p.source = load_project(entry.path(), extensions);
      check_manifest_paths(*p.source, *p.manifest);
    } catch (const Error& e) {
      p.error = e.what();
    }
    out.push_back(std::move(p));
  }
  if (ec) throw Error(ErrorCode::IoError, ec.message(), root.string());
  std::sort(out.begin(), out.end(), [](const CorpusProject& a, const CorpusProject& b) { return a.id < b.id; });
  return out;
}

namespace detail {

inline void write_text(const fs::path& path, std::string_view text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write file", path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed", path.string());
}

inline std::string policy_label(const MatchPolicy& p) {
  return std::string(to_string(p.strictness)) + (p.require_category_match ? "+category" : "");
}

}  // namespace detail

/// Seconds from a `<project>.time` sidecar, if present.
inline std::optional<double> read_timing_sidecar(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  std::string text = detail::read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  const auto last = text.find_last_not_of(" \t\r\n");
  if (first == std::string::npos) throw Error(ErrorCode::IoError, "empty timing sidecar", path.string());
  text = text.substr(first, last - first + 1);
  if (!text.empty() && text.back() == 's') text.pop_back();
  double seconds = 0.0;
  const auto [ptr, err] = std::from_chars(text.data(), text.data() + text.size(), seconds);
  if (err != std::errc() || ptr != text.data() + text.size() || seconds < 0) {
    throw Error(ErrorCode::IoError, "timing sidecar is not a non-negative number of seconds", path.string());
  }
  return round_half_up(seconds, 3);
}

/// Wraps an externally produced SARIF report as a run. The project id is the
/// file stem; timing comes from the sibling `<project>.time` when it exists.
inline AnalysisRun import_external_sarif(const fs::path& path, const std::string& analyzer_id) {
  AnalysisRun run;
  run.analyzer_id = analyzer_id;
  run.project_id = path.stem().string();
  run.sarif = parse_sarif(detail::read_file(path));
  const std::size_t findings = findings_of(run.sarif, analyzer_id).size();
  run.draft_count = findings;
  if (auto seconds = read_timing_sidecar(fs::path(path).replace_extension(".time"))) {
    run.wall_time_seconds = *seconds;
    run.timing_measured = true;
  } else {
    run.wall_time_seconds = 0.0;
    run.timing_measured = false;
  }
  return run;
}

struct CellRun {
  std::string analyzer_id;
  std::string project_id;
  std::optional<AnalysisRun> run;
  std::optional<std::string> error;
};

struct CellFilter {
  std::optional<std::string> project;
  std::optional<std::string> analyzer;
  bool admits(const std::string& a, const std::string& p) const {
    return (!analyzer || *analyzer == a) && (!project || *project == p);
  }
};

inline RunSummary summarize(const AnalysisRun& run) {
  RunSummary s;
  s.finding_count = run.draft_count - run.rejected_draft_count;
  s.draft_count = run.draft_count;
  s.rejected_draft_count = run.rejected_draft_count;
  s.prompt_tokens = run.prompt_tokens;
  s.completion_tokens = run.completion_tokens;
  s.retries = run.retries;
  s.notes = run.notes;
  return s;
}

inline void write_run_artifacts(const fs::path& output_dir, const AnalysisRun& run) {
  const fs::path dir = output_dir / run.analyzer_id;
  detail::write_text(dir / (run.project_id + ".sarif"), emit_sarif(run.sarif));
  const fs::path time_path = dir / (run.project_id + ".time");
  if (run.timing_measured) {
    detail::write_text(time_path, format_fixed3(run.wall_time_seconds) + "\n");
  } else {
    std::error_code ec;
    fs::remove(time_path, ec);
  }
  const RunSummary s = summarize(run);
  nlohmann::ordered_json j;
  j["draft_count"] = s.draft_count;
  j["rejected_draft_count"] = s.rejected_draft_count;
  j["prompt_tokens"] = s.prompt_tokens;
  j["completion_tokens"] = s.completion_tokens;
  j["retries"] = s.retries;
  j["notes"] = s.notes;
  detail::write_text(dir / (run.project_id + ".run.json"), j.dump(2) + "\n");
}

/// Produces an AnalysisRun for every admitted (analyzer, project) cell on a
/// bounded worker pool. LLM calls respect each model's max_concurrency. A
/// failing cell records its error and never affects the others.
inline std::vector<CellRun> run_analyses(const BenchmarkConfig& cfg, const std::vector<CorpusProject>& corpus,
                                         const CellFilter& filter = {}, const ChatTransport& transport = request_analysis,
                                         bool write_artifacts = true) {
  struct Task {
    std::size_t analyzer;
    std::size_t project;
  };
  std::vector<Task> tasks;
  for (std::size_t a = 0; a < cfg.analyzers.size(); ++a) {
    for (std::size_t p = 0; p < corpus.size(); ++p) {
      if (filter.admits(cfg.analyzers[a].id, corpus[p].id)) tasks.push_back({a, p});
    }
  }

  std::vector<std::unique_ptr<std::counting_semaphore<>>> limits;
  for (const AnalyzerSpec& spec : cfg.analyzers) {
    const int n = spec.model ? spec.model->max_concurrency : 1;
    limits.push_back(std::make_unique<std::counting_semaphore<>>(std::max(1, n)));
  }

  std::vector<CellRun> results(tasks.size());
  const auto run_cell = [&](const Task& t) {
    const AnalyzerSpec& spec = cfg.analyzers[t.analyzer];
    const CorpusProject& proj = corpus[t.project];
    CellRun& out = results[&t - tasks.data()];
    out.analyzer_id = spec.id;
    out.project_id = proj.id;
    try {
      if (proj.error) throw Error(ErrorCode::IoError, *proj.error, proj.id);
      AnalysisRun run;
      if (spec.kind == AnalyzerKind::llm) {
        auto& sem = *limits[t.analyzer];
        sem.acquire();
        struct Release {
          std::counting_semaphore<>& s;
          ~Release() { s.release(); }
        } release{sem};
        run = analyze_project(*proj.source, *spec.model, transport);
      } else {
        const fs::path file = *spec.sarif_dir / (proj.id + ".sarif");
        std::error_code ec;
        if (!fs::exists(file, ec)) throw Error(ErrorCode::IoError, "no SARIF report for project", file.string());
        run = import_external_sarif(file, spec.id);
      }
      if (write_artifacts) write_run_artifacts(cfg.output_dir, run);
      out.run = std::move(run);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  };

  const std::size_t wanted = cfg.workers ? cfg.workers : cfg.analyzers.size();
  const std::size_t n_workers = std::max<std::size_t>(1, std::min(wanted, tasks.size()));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) run_cell(tasks[i]);
      });
    }
  }
  return results;
}

/// Reads previously written `<analyzer>/<project>.sarif` artifacts.
inline std::vector<CellRun> load_runs(const BenchmarkConfig& cfg, const std::vector<CorpusProject>& corpus,
                                      const CellFilter& filter = {}) {
  std::vector<CellRun> out;
  for (const AnalyzerSpec& spec : cfg.analyzers) {
    for (const CorpusProject& proj : corpus) {
      if (!filter.admits(spec.id, proj.id)) continue;
      CellRun cell{spec.id, proj.id, std::nullopt, std::nullopt};
      try {
        const fs::path file = cfg.output_dir / spec.id / (proj.id + ".sarif");
        std::error_code ec;
        if (!fs::exists(file, ec)) throw Error(ErrorCode::IoError, "no analysis output; run 'analyze' first", file.string());
        AnalysisRun run = import_external_sarif(file, spec.id);
        const fs::path meta = cfg.output_dir / spec.id / (proj.id + ".run.json");
        if (fs::exists(meta, ec)) {
          auto j = nlohmann::json::parse(detail::read_file(meta), nullptr, false);
          if (j.is_object()) {
            run.draft_count = j.value("draft_count", run.draft_count);
            run.rejected_draft_count = j.value("rejected_draft_count", std::size_t{0});
            run.prompt_tokens = j.value("prompt_tokens", std::int64_t{0});
            run.completion_tokens = j.value("completion_tokens", std::int64_t{0});
            run.retries = j.value("retries", 0);
            run.notes = j.value("notes", std::vector<std::string>{});
          }
        }
        cell.run = std::move(run);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      out.push_back(std::move(cell));
    }
  }
  return out;
}

/// Matches every run against its manifest and assembles the metric grid.
inline BenchmarkResult evaluate_runs(const BenchmarkConfig& cfg, const std::vector<CorpusProject>& corpus,
                                     const std::vector<CellRun>& runs) {
  BenchmarkResult result;
  result.mode = "benchmark";
  for (const AnalyzerSpec& spec : cfg.analyzers) result.analyzers.push_back(spec.id);
  for (const CorpusProject& p : corpus) result.projects.push_back(p.id);

  for (const AnalyzerSpec& spec : cfg.analyzers) {
    const MatchPolicy policy = policy_for(cfg, spec);
    for (const CorpusProject& proj : corpus) {
      auto it = std::find_if(runs.begin(), runs.end(), [&](const CellRun& r) {
        return r.analyzer_id == spec.id && r.project_id == proj.id;
      });
      if (it == runs.end()) continue;
      Cell cell;
      cell.analyzer_id = spec.id;
      cell.project_id = proj.id;
      cell.policy = detail::policy_label(policy);
      try {
        if (it->error) throw std::runtime_error(*it->error);
        if (proj.error) throw std::runtime_error(*proj.error);
        const AnalysisRun& run = *it->run;
        const std::vector<Finding> findings = findings_of(run.sarif, spec.id);
        MatchReport report = match_findings(findings, *proj.manifest, policy, proj.id);
        cell.counts = confusion_counts(report, findings.size(), proj.manifest->vulnerabilities.size());
        cell.metrics = compute_metrics(cell.counts, spec.id, proj.id);
        cell.match = std::move(report);
        cell.run = summarize(run);
        cell.run->finding_count = findings.size();
        cell.seconds = run.wall_time_seconds;
        cell.timing_measured = run.timing_measured;
      } catch (const std::exception& e) {
        cell.error = e.what();
        if (it->run) {
          cell.seconds = it->run->wall_time_seconds;
          cell.timing_measured = it->run->timing_measured;
        }
      }
      result.cells.push_back(std::move(cell));
    }
  }
  compute_aggregates(result);
  return result;
}

inline void write_result_files(const BenchmarkResult& result, const fs::path& output_dir,
                               FpRatioMode fp_mode = FpRatioMode::pooled) {
  detail::write_text(output_dir / "result.json", render_report(result, ReportFormat::json, fp_mode));
  detail::write_text(output_dir / "report.md", render_report(result, ReportFormat::markdown, fp_mode));
  detail::write_text(output_dir / "report.csv", render_report(result, ReportFormat::csv, fp_mode));
}

/// analyze + evaluate for the whole config; artifacts land in output_dir.
inline BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, const ChatTransport& transport = request_analysis) {
  if (cfg.analyzers.empty()) throw Error(ErrorCode::EmptyConfig, "config lists no analyzers");
  const auto corpus = load_corpus(cfg.corpus_root, cfg.extensions);
  if (corpus.empty()) throw Error(ErrorCode::EmptyProject, "corpus has no projects", cfg.corpus_root.string());
  const auto runs = run_analyses(cfg, corpus, {}, transport, true);
  BenchmarkResult result = evaluate_runs(cfg, corpus, runs);
  write_result_files(result, cfg.output_dir);
  return result;
}

// ---- counts replay ---------------------------------------------------------

struct CountsRecord {
  std::string analyzer;
  std::string project;
  RawCounts counts;
  std::optional<double> seconds;
};

/// JSON array of {analyzer, project, total, tp, known[, seconds]}.
inline std::vector<CountsRecord> parse_counts(std::string_view text) {
  using nlohmann::json;
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::MalformedJson, "counts file is not valid JSON");
  if (doc.is_object() && doc.contains("records")) doc = doc["records"];
  if (!doc.is_array()) throw Error(ErrorCode::SchemaViolation, "expected an array of count records", "$");
  std::vector<CountsRecord> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "[" + std::to_string(i) + "]";
    try {
      CountsRecord r;
      const json& j = doc[i];
      r.analyzer = j.at("analyzer").get<std::string>();
      r.project = j.at("project").get<std::string>();
      r.counts = {j.at("total").get<std::size_t>(), j.at("tp").get<std::size_t>(), j.at("known").get<std::size_t>()};
      if (j.contains("seconds") && !j["seconds"].is_null()) r.seconds = j["seconds"].get<double>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::SchemaViolation, e.what(), where);
    }
  }
  return out;
}

/// Metric grid straight from raw counts. Analyzers keep first-appearance
/// order; a missing (analyzer, project) combination becomes a failed cell.
inline BenchmarkResult replay_counts(const std::vector<CountsRecord>& records) {
  BenchmarkResult result;
  result.mode = "replay";
  for (const CountsRecord& r : records) {
    if (std::find(result.analyzers.begin(), result.analyzers.end(), r.analyzer) == result.analyzers.end()) {
      result.analyzers.push_back(r.analyzer);
    }
    if (std::find(result.projects.begin(), result.projects.end(), r.project) == result.projects.end()) {
      result.projects.push_back(r.project);
    }
  }
  std::sort(result.projects.begin(), result.projects.end());

  for (const std::string& a : result.analyzers) {
    for (const std::string& p : result.projects) {
      Cell cell;
      cell.analyzer_id = a;
      cell.project_id = p;
      const CountsRecord* match = nullptr;
      for (const CountsRecord& r : records) {
        if (r.analyzer != a || r.project != p) continue;
        if (match) throw Error(ErrorCode::InconsistentReport, "duplicate counts record", a + "/" + p);
        match = &r;
      }
      if (!match) {
        cell.error = "no counts record";
      } else {
        if (match->counts.true_positives > std::min(match->counts.total_found, match->counts.known_vulnerabilities)) {
          throw Error(ErrorCode::InconsistentReport, "tp exceeds min(total, known)", a + "/" + p);
        }
        cell.counts = match->counts;
        cell.metrics = compute_metrics(cell.counts, a, p);
        if (match->seconds) {
          cell.seconds = round_half_up(*match->seconds, 3);
          cell.timing_measured = true;
        }
      }
      result.cells.push_back(std::move(cell));
    }
  }
  compute_aggregates(result);
  return result;
}

}  // namespace vulnbench
