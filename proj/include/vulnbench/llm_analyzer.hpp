#pragma once

// Project -> prompt -> model -> fenced JSON -> SARIF.

#include <chrono>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "vulnbench/chat_client.hpp"
#include "vulnbench/corpus.hpp"
#include "vulnbench/error.hpp"
#include "vulnbench/extract.hpp"
#include "vulnbench/prompt.hpp"
#include "vulnbench/rounding.hpp"
#include "vulnbench/sarif.hpp"

namespace vulnbench {

struct AnalysisRun {
  std::string analyzer_id;
  std::string project_id;
  SarifLog sarif;
  double wall_time_seconds = 0.0;  // rounded half-up to 3 decimals
  bool timing_measured = true;
  std::size_t draft_count = 0;  // results in sarif + rejected drafts
  std::size_t rejected_draft_count = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  int retries = 0;
  std::vector<std::string> notes;  // rejections and region normalizations
};

/// Anything that turns a prompt into model text; the HTTP client by default.
using ChatTransport = std::function<RawModelResponse(const PromptBundle&, const ModelConfig&)>;

/// Converts drafts into a single-run log. Rules are deduplicated by id in
/// first-appearance order. Region coordinates below 1 are raised to 1 and
/// inverted ranges collapsed onto their start; each adjustment appends a note.
inline SarifLog drafts_to_sarif(const std::vector<FindingDraft>& drafts, std::string_view analyzer_id,
                                std::string_view model_name, std::vector<std::string>* notes = nullptr) {
  const auto note = [&](std::size_t i, const std::string& what) {
    if (notes) notes->push_back("draft " + std::to_string(i) + ": " + what);
  };

  Run run;
  run.tool_name = std::string(analyzer_id);
  run.tool_version = std::string(model_name);
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    const FindingDraft& d = drafts[i];
    ResultEntry e;
    e.rule_id = d.rule_id.empty() ? "UNSPECIFIED" : d.rule_id;
    e.rule_index = run.intern_rule(e.rule_id, d.rule_description);
    e.level = d.level;
    e.message = !d.message.empty() ? d.message : !d.rule_description.empty() ? d.rule_description : e.rule_id;

    e.location.artifact_uri = normalize_path(d.path);
    if (e.location.artifact_uri.empty()) {
      e.location.artifact_uri = "unknown";
      note(i, "empty path replaced with 'unknown'");
    }

    Region g{d.start_line, d.end_line, d.start_column, d.end_column};
    const auto clamp = [&](std::int64_t& v, const char* name) {
      if (v < 1) {
        note(i, std::string(name) + " " + std::to_string(v) + " clamped to 1");
        v = 1;
      }
    };
    clamp(g.start_line, "startLine");
    clamp(g.end_line, "endLine");
    clamp(g.start_column, "startColumn");
    clamp(g.end_column, "endColumn");
    if (g.end_line < g.start_line) {
      note(i, "endLine " + std::to_string(g.end_line) + " raised to startLine");
      g.end_line = g.start_line;
    }
    if (g.end_line == g.start_line && g.end_column < g.start_column) {
      note(i, "endColumn " + std::to_string(g.end_column) + " raised to startColumn");
      g.end_column = g.start_column;
    }
    e.location.region = g;
    run.results.push_back(std::move(e));
  }

  SarifLog log;
  log.runs.push_back(std::move(run));
  return log;
}

/// Full pipeline for one (project, model) cell. Wall time covers prompt
/// construction through SARIF conversion. Errors are rethrown with
/// "<analyzer>/<project>" as their location.
inline AnalysisRun analyze_project(const ProjectSource& src, const ModelConfig& cfg,
                                   const ChatTransport& transport = request_analysis) {
  const std::string cell = cfg.analyzer_id + "/" + src.project_id;
  try {
    const auto started = std::chrono::steady_clock::now();
    const PromptBundle prompt = build_prompt(src);
    const RawModelResponse resp = transport(prompt, cfg);
    ExtractionResult extracted = extract_findings(resp.content);

    AnalysisRun run;
    run.analyzer_id = cfg.analyzer_id;
    run.project_id = src.project_id;
    run.notes = std::move(extracted.rejection_reasons);
    run.sarif = drafts_to_sarif(extracted.drafts, cfg.analyzer_id, cfg.model_name, &run.notes);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    run.wall_time_seconds = round_half_up(elapsed, 3);
    run.draft_count = extracted.drafts.size() + extracted.rejected;
    run.rejected_draft_count = extracted.rejected;
    run.prompt_tokens = resp.prompt_tokens;
    run.completion_tokens = resp.completion_tokens;
    run.retries = resp.retries;
    return run;
  } catch (const Error& e) {
    std::string detail = e.detail();
    if (!e.where().empty() && e.where() != cell) detail += " [" + e.where() + "]";
    throw Error(e.code(), detail, cell);
  }
}

}  // namespace vulnbench
