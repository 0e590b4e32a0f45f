// vulnbench: run LLM analyses, import tool SARIF, score against ground truth.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vulnbench/vulnbench.hpp"

namespace fs = std::filesystem;
using namespace vulnbench;

namespace {

struct Options {
  std::string config;
  std::string counts;
  std::string result;
  std::string corpus;
  std::string out;
  std::string format = "md";
  std::string fp_ratio = "pooled";
  std::optional<std::string> project;
  std::optional<std::string> analyzer;
  std::vector<std::string> extensions{"cs", "csproj", "sln"};
};

FpRatioMode fp_mode(const Options& o) { return o.fp_ratio == "mean" ? FpRatioMode::mean : FpRatioMode::pooled; }

BenchmarkConfig config_from(const Options& o) {
  BenchmarkConfig cfg = load_config(o.config);
  if (!o.out.empty()) cfg.output_dir = fs::absolute(o.out);
  return cfg;
}

int report_cells(const BenchmarkResult& result) {
  int failed = 0;
  for (const Cell& c : result.cells) {
    if (!c.ok()) {
      ++failed;
      std::cerr << "warning: " << c.analyzer_id << "/" << c.project_id << " failed: " << *c.error << "\n";
    }
  }
  return failed ? 2 : 0;
}

int cmd_analyze(const Options& o) {
  const BenchmarkConfig cfg = config_from(o);
  const auto corpus = load_corpus(cfg.corpus_root, cfg.extensions);
  const auto runs = run_analyses(cfg, corpus, {o.project, o.analyzer});
  int failed = 0;
  for (const CellRun& r : runs) {
    if (r.error) {
      ++failed;
      std::cerr << r.analyzer_id << "/" << r.project_id << ": FAILED " << *r.error << "\n";
      continue;
    }
    const AnalysisRun& run = *r.run;
    std::cout << r.analyzer_id << "/" << r.project_id << ": " << (run.draft_count - run.rejected_draft_count)
              << " finding(s), " << run.rejected_draft_count << " rejected, "
              << (run.timing_measured ? format_seconds(run.wall_time_seconds) : std::string("unmeasured")) << "\n";
  }
  std::cout << "artifacts written to " << cfg.output_dir.string() << "\n";
  return failed ? 2 : 0;
}

int cmd_evaluate(const Options& o) {
  const BenchmarkConfig cfg = config_from(o);
  const auto corpus = load_corpus(cfg.corpus_root, cfg.extensions);
  const BenchmarkResult result = evaluate_runs(cfg, corpus, load_runs(cfg, corpus, {o.project, o.analyzer}));
  write_result_files(result, cfg.output_dir, fp_mode(o));
  std::cout << render_report(result, ReportFormat::markdown, fp_mode(o));
  return report_cells(result);
}

int cmd_run(const Options& o) {
  const BenchmarkConfig cfg = config_from(o);
  const BenchmarkResult result = run_benchmark(cfg);
  if (fp_mode(o) != FpRatioMode::pooled) write_result_files(result, cfg.output_dir, fp_mode(o));
  std::cout << render_report(result, ReportFormat::markdown, fp_mode(o));
  return report_cells(result);
}

int cmd_replay(const Options& o) {
  const BenchmarkResult result = replay_counts(parse_counts(detail::read_file(o.counts)));
  if (!o.out.empty()) write_result_files(result, o.out, fp_mode(o));
  std::cout << render_report(result, *parse_report_format(o.format), fp_mode(o));
  return report_cells(result);
}

int cmd_report(const Options& o) {
  const BenchmarkResult result = result_from_json(detail::read_file(o.result));
  const std::string text = render_report(result, *parse_report_format(o.format), fp_mode(o));
  if (!o.out.empty()) {
    const char* ext = o.format == "csv" ? "report.csv" : o.format == "json" ? "result.json" : "report.md";
    detail::write_text(fs::path(o.out) / ext, text);
  } else {
    std::cout << text;
  }
  return 0;
}

int cmd_stats(const Options& o) {
  fs::path root = o.corpus;
  std::vector<std::string> ext = o.extensions;
  if (!o.config.empty()) {
    const BenchmarkConfig cfg = load_config(o.config);
    root = cfg.corpus_root;
    ext = cfg.extensions;
  }
  std::cout << "| Project | Number of files | Number of characters | Number of vuln. |\n|---|---|---|---|\n";
  int failed = 0;
  for (const CorpusProject& p : load_corpus(root, ext)) {
    if (p.error) {
      ++failed;
      std::cout << "| " << p.id << " | FAILED: " << *p.error << " | | |\n";
      continue;
    }
    const ProjectStats s = corpus_stats(*p.source, *p.manifest);
    std::cout << "| " << p.id << " | " << s.file_count << " | " << s.char_count << " | " << s.vuln_count << " |\n";
  }
  std::cout << "\nCharacters are Unicode code points, whitespace and newlines included.\n";
  return failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark harness for LLM and static-analysis vulnerability detection"};
  app.require_subcommand(1);
  Options o;

  const auto add_fp = [&](CLI::App* sub) {
    sub->add_option("--fp-ratio", o.fp_ratio, "FP ratio shown in averages")
        ->check(CLI::IsMember({"pooled", "mean"}));
  };
  const auto add_format = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"md", "csv", "json"}));
    if (required) opt->required();
  };

  auto* analyze = app.add_subcommand("analyze", "Run analyzers over the corpus and write SARIF per cell");
  analyze->add_option("--config", o.config, "Benchmark config file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--project", o.project, "Only this project id");
  analyze->add_option("--analyzer", o.analyzer, "Only this analyzer id");
  analyze->add_option("--out", o.out, "Output directory (overrides output_dir)");

  auto* evaluate = app.add_subcommand("evaluate", "Match existing SARIF outputs and compute metrics");
  evaluate->add_option("--config", o.config, "Benchmark config file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--project", o.project, "Only this project id");
  evaluate->add_option("--analyzer", o.analyzer, "Only this analyzer id");
  evaluate->add_option("--out", o.out, "Output directory (overrides output_dir)");
  add_fp(evaluate);

  auto* run = app.add_subcommand("run", "analyze followed by evaluate");
  run->add_option("--config", o.config, "Benchmark config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", o.out, "Output directory (overrides output_dir)");
  add_fp(run);

  auto* replay = app.add_subcommand("replay", "Compute metric tables from a counts file");
  replay->add_option("--counts", o.counts, "JSON counts file")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", o.out, "Also write result.json/report.md/report.csv here");
  add_format(replay, false);
  add_fp(replay);

  auto* report = app.add_subcommand("report", "Render a stored result.json");
  report->add_option("--result", o.result, "result.json")->required()->check(CLI::ExistingFile);
  report->add_option("--out", o.out, "Write into this directory instead of stdout");
  add_format(report, true);
  add_fp(report);

  auto* stats = app.add_subcommand("stats", "Files, characters and known vulnerabilities per project");
  auto* corpus_opt = stats->add_option("--corpus", o.corpus, "Corpus root")->check(CLI::ExistingDirectory);
  stats->add_option("--config", o.config, "Take corpus and extensions from a config")
      ->check(CLI::ExistingFile)
      ->excludes(corpus_opt);
  stats->add_option("--ext", o.extensions, "File extensions to include");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return cmd_analyze(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*run) return cmd_run(o);
    if (*replay) return cmd_replay(o);
    if (*report) return cmd_report(o);
    if (*stats) {
      if (o.corpus.empty() && o.config.empty()) {
        std::cerr << "stats: one of --corpus or --config is required\n";
        return 1;
      }
      return cmd_stats(o);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
