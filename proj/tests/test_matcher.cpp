#include <gtest/gtest.h>

#include "testkit.hpp"

using namespace vulnbench;
using C = CanonicalCategory;

namespace {

Finding finding(std::string rule, std::string path, std::int64_t line, std::int64_t end = 0) {
  Finding f;
  f.analyzer_id = "T";
  f.rule_id = std::move(rule);
  f.message = "m";
  f.path = std::move(path);
  f.region = {line, end ? end : line, 1, 1};
  return f;
}

KnownVulnerability vuln(std::string id, C cat, std::string path, std::int64_t start, std::int64_t end) {
  KnownVulnerability kv;
  kv.vuln_id = std::move(id);
  kv.category = cat;
  kv.path = std::move(path);
  kv.region = {start, end, 1, 1};
  return kv;
}

MatchPolicy policy(LocationStrictness s, bool category = true) {
  MatchPolicy p;
  p.strictness = s;
  p.require_category_match = category;
  return p;
}

// Each vulnerability takes the first free compatible finding.
std::size_t greedy_pairs(const std::vector<std::vector<std::size_t>>& adj, std::size_t n) {
  std::vector<bool> used(n, false);
  std::size_t pairs = 0;
  for (const auto& cands : adj) {
    for (std::size_t i : cands) {
      if (!used[i]) {
        used[i] = true;
        ++pairs;
        break;
      }
    }
  }
  return pairs;
}

}  // namespace

TEST(NormalizeCategory, Examples) {
  EXPECT_EQ(normalize_category("SQL Injection vulnerability"), C::sql_injection);
  EXPECT_EQ(normalize_category("XSS"), C::xss);
  EXPECT_EQ(normalize_category("VULNERABLE_LIBRARY: package is outdated"), C::outdated_dependency);
  EXPECT_EQ(normalize_category("Cross-Site Scripting"), C::xss);
  EXPECT_EQ(normalize_category("HARDCODED_CREDENTIALS"), C::hardcoded_secret);
  EXPECT_EQ(normalize_category("Use of DES cipher"), C::weak_crypto);
  EXPECT_EQ(normalize_category("WEAK_HASH_MD5"), C::weak_crypto);
  EXPECT_EQ(normalize_category("Path Traversal"), C::insecure_file_handling);
  EXPECT_EQ(normalize_category("PATH_TRAVERSAL"), C::insecure_file_handling);
  EXPECT_EQ(normalize_category("Missing input sanitization"), C::input_validation);
  EXPECT_EQ(normalize_category("Null dereference"), C::other);
  EXPECT_EQ(normalize_category(""), C::other);
}

TEST(NormalizeCategory, ShortKeywordsNeedWholeWords) {
  EXPECT_EQ(normalize_category("Insecure Deserialization"), C::insecure_deserialization);
  EXPECT_EQ(normalize_category("csharp/unsafe-deserialization"), C::insecure_deserialization);
  EXPECT_EQ(normalize_category("Microsoft.Data.Sqlite usage"), C::other);
  EXPECT_EQ(normalize_category("SqlInjection"), C::sql_injection);
  EXPECT_EQ(normalize_category("DESCryptoServiceProvider"), C::weak_crypto);
}

TEST(NormalizeCategory, TableOrderDecides) {
  // "sql" precedes "command" in the table.
  EXPECT_EQ(normalize_category("SQL command built from input"), C::sql_injection);
  std::vector<Synonym> table = default_synonyms();
  table.insert(table.begin(), {"redirect", C::input_validation});
  EXPECT_EQ(normalize_category("Open redirect", table), C::input_validation);
  EXPECT_EQ(normalize_category("Open redirect"), C::other);
}

TEST(Matcher, ExactRegionGivesOnePair) {
  GroundTruthManifest m{"P", {vuln("V1", C::sql_injection, "a.cs", 27, 27)}};
  const auto rep = match_findings({finding("SQL_INJECTION", "a.cs", 27)}, m, policy(LocationStrictness::region_overlap));
  ASSERT_EQ(rep.pairs.size(), 1u);
  EXPECT_EQ(rep.pairs[0], (MatchPair{0, "V1"}));
  EXPECT_TRUE(rep.unmatched_findings.empty());
  EXPECT_TRUE(rep.unmatched_vulns.empty());
}

TEST(Matcher, DuplicateFindingsStayUnmatched) {
  GroundTruthManifest m{"P", {vuln("V1", C::xss, "a.cs", 3, 4)}};
  const std::vector<Finding> f = {finding("XSS", "a.cs", 50), finding("XSS", "a.cs", 60)};
  const auto rep = match_findings(f, m, policy(LocationStrictness::file_only));
  EXPECT_EQ(rep.pairs.size(), 1u);
  EXPECT_EQ(rep.unmatched_findings, (std::vector<std::size_t>{1}));
  EXPECT_EQ(confusion_counts(rep, 2, 1), (RawCounts{2, 1, 1}));
}

TEST(Matcher, OptimalBeatsGreedy) {
  GroundTruthManifest m{"P",
                        {vuln("V0", C::sql_injection, "a.cs", 10, 20), vuln("V1", C::sql_injection, "a.cs", 5, 10),
                         vuln("V2", C::sql_injection, "a.cs", 20, 30)}};
  const std::vector<Finding> f = {finding("SQL", "a.cs", 10), finding("SQL", "a.cs", 20), finding("SQL", "a.cs", 25),
                                  finding("SQL", "a.cs", 100)};
  const MatchPolicy p = policy(LocationStrictness::region_overlap);
  const auto adj = candidate_edges(f, m, p);
  ASSERT_EQ(greedy_pairs(adj, f.size()), 2u);
  ASSERT_EQ(testkit::brute_force_max_matching(adj, f.size()), 3u);
  const auto rep = match_findings(f, m, p);
  EXPECT_EQ(rep.pairs.size(), 3u);
  EXPECT_EQ(rep.unmatched_findings, (std::vector<std::size_t>{3}));
  EXPECT_EQ(rep.pairs[0], (MatchPair{1, "V0"}));
  EXPECT_EQ(rep.pairs[1], (MatchPair{0, "V1"}));
  EXPECT_EQ(rep.pairs[2], (MatchPair{2, "V2"}));
}

TEST(Matcher, PolicyControls) {
  GroundTruthManifest m{"P", {vuln("V1", C::sql_injection, "dir/a.cs", 10, 12)}};
  const std::vector<Finding> near = {finding("SQL_INJECTION", "./dir/a.cs", 11)};
  const std::vector<Finding> far = {finding("SQL_INJECTION", "dir/a.cs", 40)};
  const std::vector<Finding> wrong_cat = {finding("XSS", "dir/a.cs", 10)};
  const std::vector<Finding> wrong_file = {finding("SQL_INJECTION", "dir/b.cs", 10)};
  EXPECT_EQ(match_findings(near, m, policy(LocationStrictness::region_overlap)).pairs.size(), 1u);
  EXPECT_EQ(match_findings(near, m, policy(LocationStrictness::same_line)).pairs.size(), 0u);
  EXPECT_EQ(match_findings(far, m, policy(LocationStrictness::region_overlap)).pairs.size(), 0u);
  EXPECT_EQ(match_findings(far, m, policy(LocationStrictness::file_only)).pairs.size(), 1u);
  EXPECT_EQ(match_findings(wrong_cat, m, policy(LocationStrictness::file_only)).pairs.size(), 0u);
  EXPECT_EQ(match_findings(wrong_cat, m, policy(LocationStrictness::file_only, false)).pairs.size(), 1u);
  EXPECT_EQ(match_findings(wrong_file, m, policy(LocationStrictness::file_only, false)).pairs.size(), 0u);
}

TEST(Matcher, CategoryFallsBackToDescriptionThenMessage) {
  GroundTruthManifest m{"P", {vuln("V1", C::input_validation, "a.cs", 1, 1)}};
  Finding f = finding("OPEN_REDIRECT", "a.cs", 1);
  f.rule_description = "Unvalidated redirect target";
  EXPECT_EQ(match_findings({f}, m, policy(LocationStrictness::file_only)).pairs.size(), 1u);
  f.rule_description = "";
  f.message = "target is not validated";
  EXPECT_EQ(match_findings({f}, m, policy(LocationStrictness::file_only)).pairs.size(), 1u);
}

TEST(Matcher, ProjectMismatch) {
  GroundTruthManifest m{"P", {}};
  EXPECT_THROW(match_findings({}, m, policy(LocationStrictness::file_only), "Q"), Error);
  EXPECT_NO_THROW(match_findings({}, m, policy(LocationStrictness::file_only), "P"));
}

TEST(Matcher, ConfusionCountsExamples) {
  MatchReport four;
  for (int i = 0; i < 4; ++i) four.pairs.push_back({static_cast<std::size_t>(i), "V" + std::to_string(i)});
  EXPECT_EQ(confusion_counts(four, 6, 8), (RawCounts{6, 4, 8}));
  EXPECT_EQ(confusion_counts(MatchReport{}, 0, 1), (RawCounts{0, 0, 1}));
  MatchReport eight;
  for (int i = 0; i < 8; ++i) eight.pairs.push_back({static_cast<std::size_t>(i), "V" + std::to_string(i)});
  EXPECT_EQ(confusion_counts(eight, 13, 8), (RawCounts{13, 8, 8}));
  try {
    confusion_counts(four, 3, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentReport);
  }
}

TEST(MatcherProperty, AgreesWithBruteForce) {
  testkit::Rng rng(1234);
  const LocationStrictness modes[] = {LocationStrictness::region_overlap, LocationStrictness::same_line,
                                      LocationStrictness::file_only};
  for (int i = 0; i < 600; ++i) {
    const auto inst = testkit::random_match_instance(rng);
    const MatchPolicy p = policy(modes[i % 3], i % 5 != 0);
    const auto adj = testkit::oracle_edges(inst, p);
    ASSERT_EQ(candidate_edges(inst.findings, inst.manifest, p), adj);
    const auto rep = match_findings(inst.findings, inst.manifest, p);
    ASSERT_TRUE(testkit::is_valid_matching(rep, inst, p)) << "instance " << i;
    ASSERT_EQ(rep.pairs.size(), testkit::brute_force_max_matching(adj, inst.findings.size())) << "instance " << i;
    ASSERT_EQ(match_findings(inst.findings, inst.manifest, p), rep);  // deterministic
  }
}

TEST(MatcherProperty, MaximalNoAugmentableLeftover) {
  testkit::Rng rng(55);
  for (int i = 0; i < 300; ++i) {
    const auto inst = testkit::random_match_instance(rng);
    const MatchPolicy p = policy(LocationStrictness::file_only);
    const auto rep = match_findings(inst.findings, inst.manifest, p);
    for (std::size_t fi : rep.unmatched_findings) {
      for (const std::string& vid : rep.unmatched_vulns) {
        const auto& kv = *std::find_if(inst.manifest.vulnerabilities.begin(), inst.manifest.vulnerabilities.end(),
                                       [&](const KnownVulnerability& k) { return k.vuln_id == vid; });
        ASSERT_FALSE(testkit::oracle_edge(inst.findings[fi], kv, p));
      }
    }
  }
}

TEST(MatcherProperty, StrictnessMonotone) {
  testkit::Rng rng(4321);
  for (int i = 0; i < 500; ++i) {
    const auto inst = testkit::random_match_instance(rng);
    const auto n = [&](LocationStrictness s) { return match_findings(inst.findings, inst.manifest, policy(s)).pairs.size(); };
    const std::size_t region = n(LocationStrictness::region_overlap);
    const std::size_t line = n(LocationStrictness::same_line);
    const std::size_t file = n(LocationStrictness::file_only);
    ASSERT_GE(file, line);
    ASSERT_GE(file, region);
    // same_line implies overlapping intervals, so it can never exceed region_overlap.
    ASSERT_GE(region, line);
  }
}

TEST(MatcherProperty, PermutationInvariantCardinality) {
  testkit::Rng rng(777);
  for (int i = 0; i < 300; ++i) {
    auto inst = testkit::random_match_instance(rng);
    const MatchPolicy p = policy(i % 2 ? LocationStrictness::region_overlap : LocationStrictness::file_only);
    const std::size_t before = match_findings(inst.findings, inst.manifest, p).pairs.size();
    std::shuffle(inst.findings.begin(), inst.findings.end(), rng);
    ASSERT_EQ(match_findings(inst.findings, inst.manifest, p).pairs.size(), before);
  }
}
