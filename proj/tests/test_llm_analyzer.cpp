#include <gtest/gtest.h>

#include "cases.hpp"

using namespace vulnbench;

namespace {

FindingDraft draft(std::string rule, std::int64_t line) {
  FindingDraft d;
  d.rule_id = std::move(rule);
  d.rule_description = "desc of " + d.rule_id;
  d.level = Severity::error;
  d.message = "msg";
  d.path = "a.cs";
  d.start_line = d.end_line = line;
  d.start_column = 1;
  d.end_column = 5;
  return d;
}

ProjectSource small_project() { return {"P1", {}, {{"a.cs", "class A {}"}}}; }

ChatTransport canned(std::string content) {
  return [content](const PromptBundle&, const ModelConfig&) {
    RawModelResponse r;
    r.content = content;
    r.prompt_tokens = 12;
    r.completion_tokens = 3;
    return r;
  };
}

ModelConfig model() {
  ModelConfig m;
  m.analyzer_id = "GPT-test";
  m.model_name = "gpt-test-1";
  return m;
}

}  // namespace

TEST(DraftsToSarif, SameRuleDeduplicated) {
  const SarifLog log = drafts_to_sarif({draft("R", 1), draft("R", 9)}, "A", "m");
  ASSERT_EQ(log.runs.size(), 1u);
  const vulnbench::Run& run = log.runs[0];
  EXPECT_EQ(run.tool_name, "A");
  EXPECT_EQ(run.tool_version, "m");
  ASSERT_EQ(run.rules.size(), 1u);
  ASSERT_EQ(run.results.size(), 2u);
  EXPECT_EQ(run.results[0].rule_index, 0u);
  EXPECT_EQ(run.results[1].rule_index, 0u);
  EXPECT_TRUE(validate(log).empty());
}

TEST(DraftsToSarif, RuleOrderIsFirstAppearance) {
  const SarifLog log = drafts_to_sarif({draft("B", 1), draft("A", 2), draft("B", 3)}, "A", "m");
  ASSERT_EQ(log.runs[0].rules.size(), 2u);
  EXPECT_EQ(log.runs[0].rules[0].id, "B");
  EXPECT_EQ(log.runs[0].results[1].rule_index, 1u);
}

TEST(DraftsToSarif, EmptyDraftsGiveValidEmptyRun) {
  const SarifLog log = drafts_to_sarif({}, "A", "m");
  EXPECT_TRUE(validate(log).empty());
  EXPECT_TRUE(log.runs[0].results.empty());
  EXPECT_NE(emit_sarif(log).find("\"results\": []"), std::string::npos);
}

TEST(DraftsToSarif, ZeroLineClampedWithNote) {
  FindingDraft d = draft("R", 0);
  std::vector<std::string> notes;
  const SarifLog log = drafts_to_sarif({d}, "A", "m", &notes);
  EXPECT_EQ(log.runs[0].results[0].location.region.start_line, 1);
  ASSERT_FALSE(notes.empty());
  EXPECT_NE(notes[0].find("startLine"), std::string::npos);
}

TEST(DraftsToSarif, InvertedAndEmptyRegionsRepaired) {
  FindingDraft d = draft("R", 10);
  d.end_line = 4;
  d.path = "";
  std::vector<std::string> notes;
  const SarifLog log = drafts_to_sarif({d}, "A", "m", &notes);
  EXPECT_TRUE(validate(log).empty());
  EXPECT_EQ(log.runs[0].results[0].location.region.end_line, 10);
  EXPECT_EQ(log.runs[0].results[0].location.artifact_uri, "unknown");
  EXPECT_EQ(notes.size(), 2u);
}

TEST(DraftsToSarif, AlwaysValidForRandomDrafts) {
  testkit::Rng rng(99);
  for (int i = 0; i < 300; ++i) {
    const auto payload = testkit::random_payload(rng);
    const auto drafts = extract_findings(payload.content).drafts;
    const SarifLog log = drafts_to_sarif(drafts, "A", "m");
    ASSERT_TRUE(validate(log).empty()) << payload.content;
    ASSERT_EQ(log.runs[0].results.size(), drafts.size());
    ASSERT_EQ(parse_sarif(emit_sarif(log)), log);
  }
}

TEST(AnalyzeProject, TwoValidDrafts) {
  const std::string content = "```json\n[" + testkit::complete_object("a.cs") + "," +
                              testkit::complete_object("b.cs", "note") + "]\n```";
  const AnalysisRun run = analyze_project(small_project(), model(), canned(content));
  EXPECT_EQ(run.analyzer_id, "GPT-test");
  EXPECT_EQ(run.project_id, "P1");
  EXPECT_EQ(findings_of(run.sarif, run.analyzer_id).size(), 2u);
  EXPECT_EQ(run.rejected_draft_count, 0u);
  EXPECT_EQ(run.draft_count, 2u);
  EXPECT_EQ(run.prompt_tokens, 12);
  EXPECT_EQ(run.sarif.runs[0].tool_version, "gpt-test-1");
  EXPECT_TRUE(run.timing_measured);
}

TEST(AnalyzeProject, NoFenceErrorNamesAnalyzerAndProject) {
  try {
    analyze_project(small_project(), model(), canned("Sorry, I cannot help with that."));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoFindingsPayload);
    EXPECT_EQ(e.where(), "GPT-test/P1");
    EXPECT_NE(std::string(e.what()).find("GPT-test/P1"), std::string::npos);
  }
}

TEST(AnalyzeProject, TransportErrorsWrapped) {
  const ChatTransport failing = [](const PromptBundle&, const ModelConfig&) -> RawModelResponse {
    throw Error(ErrorCode::ProviderError, "HTTP 400: bad", "GPT-test");
  };
  try {
    analyze_project(small_project(), model(), failing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProviderError);
    EXPECT_EQ(e.where(), "GPT-test/P1");
  }
}

TEST(AnalyzeProject, WallTimeRoundedToMilliseconds) {
  const ChatTransport slow = [](const PromptBundle&, const ModelConfig&) {
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    RawModelResponse r;
    r.content = "```json\n[]\n```";
    return r;
  };
  const AnalysisRun run = analyze_project(small_project(), model(), slow);
  EXPECT_GE(run.wall_time_seconds, 0.030);
  EXPECT_DOUBLE_EQ(run.wall_time_seconds, round_half_up(run.wall_time_seconds, 3));
}

TEST(Rounding, HalfUpToThreeDecimals) {
  EXPECT_EQ(format_fixed3(round_half_up(12.7406)), "12.741");
  EXPECT_EQ(format_seconds(round_half_up(12.7406)), "12.741s");
  EXPECT_EQ(format_fixed3(round_half_up(0.0005)), "0.001");
  EXPECT_EQ(format_fixed3(round_half_up(2.0 / 3.0)), "0.667");
  EXPECT_EQ(format_fixed3(round_half_up(0.8333333)), "0.833");
  EXPECT_EQ(format_fixed3(round_half_up(1.0)), "1.000");
}
