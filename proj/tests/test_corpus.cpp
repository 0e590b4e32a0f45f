#include <gtest/gtest.h>

#include "testkit.hpp"

using namespace vulnbench;
using testkit::fixtures;
using testkit::spit;
using testkit::TempDir;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no vulnbench::Error thrown";
  return ErrorCode::IoError;
}

// Counts code points by skipping continuation bytes; assumes valid UTF-8.
std::size_t count_code_points(const std::string& bytes) {
  return static_cast<std::size_t>(std::count_if(bytes.begin(), bytes.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

const std::vector<std::string> kCsExt{"cs", "csproj", "sln"};

}  // namespace

TEST(Corpus, LoadsFiveMatchingFiles) {
  TempDir dir;
  spit(dir / "P/Program.cs", "class P {}\n");
  spit(dir / "P/P.csproj", "<Project />\n");
  spit(dir / "P/P.sln", "sln\n");
  spit(dir / "P/Sub/Deep/A.CS", "class A {}\n");
  spit(dir / "P/Sub/b.cs", "class B {}\n");
  spit(dir / "P/notes.txt", "ignored");
  spit(dir / "P/.vs/cache.cs", "hidden");
  spit(dir / "P/groundtruth.json", "{}");

  const ProjectSource src = load_project(dir / "P", kCsExt);
  EXPECT_EQ(src.project_id, "P");

  // Independent walk of the tree, by hand.
  std::vector<std::string> expected;
  for (const auto& e : fs::recursive_directory_iterator(dir / "P")) {
    const std::string rel = fs::relative(e.path(), dir / "P").generic_string();
    if (!e.is_regular_file() || rel.find(".vs/") == 0) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".cs" || ext == ".csproj" || ext == ".sln") expected.push_back(rel);
  }
  std::sort(expected.begin(), expected.end());
  ASSERT_EQ(expected.size(), 5u);
  ASSERT_EQ(src.files.size(), 5u);
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(src.files[i].path, expected[i]);

  EXPECT_EQ(load_project(dir / "P", kCsExt), src);  // deterministic
  EXPECT_EQ(load_project(dir / "P", {".CS"}).files.size(), 3u);
}

TEST(Corpus, EmptyDirectoryIsEmptyProject) {
  TempDir dir;
  fs::create_directories(dir / "E");
  EXPECT_EQ(code_of([&] { load_project(dir / "E", kCsExt); }), ErrorCode::EmptyProject);
}

TEST(Corpus, TxtExcluded) {
  TempDir dir;
  spit(dir / "P/readme.txt", "text");
  spit(dir / "P/a.cs", "x");
  const ProjectSource src = load_project(dir / "P", {"cs"});
  ASSERT_EQ(src.files.size(), 1u);
  EXPECT_EQ(src.files[0].path, "a.cs");
}

TEST(Corpus, MissingDirectoryIsIoError) {
  TempDir dir;
  EXPECT_EQ(code_of([&] { load_project(dir / "nope", kCsExt); }), ErrorCode::IoError);
}

TEST(Corpus, InvalidUtf8NamesFile) {
  TempDir dir;
  spit(dir / "P/ok.cs", "ok");
  spit(dir / "P/bad.cs", std::string("abc\xC3\x28", 5));
  try {
    load_project(dir / "P", kCsExt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EncodingError);
    EXPECT_EQ(e.where(), "bad.cs");
  }
}

TEST(Corpus, BomStripped) {
  TempDir dir;
  spit(dir / "P/a.cs", "\xEF\xBB\xBFxy");
  EXPECT_EQ(load_project(dir / "P", kCsExt).files[0].content, "xy");
}

TEST(Corpus, Utf8CodePoints) {
  EXPECT_EQ(utf8_code_points("abc"), 3u);
  EXPECT_EQ(utf8_code_points("\xC3\xA9\xE2\x86\x92\xF0\x9F\x98\x80"), 3u);
  EXPECT_FALSE(utf8_code_points("\xC0\xAF").has_value());          // overlong
  EXPECT_FALSE(utf8_code_points("\xED\xA0\x80").has_value());      // surrogate
  EXPECT_FALSE(utf8_code_points("\xE2\x86").has_value());          // truncated
}

TEST(Corpus, EightEntryManifest) {
  const GroundTruthManifest m = load_ground_truth(fixtures() / "manifests" / "s01_analog.json");
  EXPECT_EQ(m.project_id, "S01");
  EXPECT_EQ(m.vulnerabilities.size(), 8u);
  EXPECT_EQ(m.vulnerabilities[0].category, CanonicalCategory::sql_injection);
  EXPECT_EQ(m.vulnerabilities[7].category, CanonicalCategory::auth_issue);
}

TEST(Corpus, EmptyManifestValid) {
  const auto m = parse_ground_truth(R"({"projectId":"X","vulnerabilities":[]})");
  EXPECT_TRUE(m.vulnerabilities.empty());
}

TEST(Corpus, DuplicateIdRejected) {
  const std::string text = R"({"projectId":"X","vulnerabilities":[
    {"id":"A","category":"xss","path":"a.cs","region":{"startLine":1}},
    {"id":"A","category":"xss","path":"b.cs","region":{"startLine":2}}]})";
  EXPECT_EQ(code_of([&] { parse_ground_truth(text); }), ErrorCode::MalformedManifest);
}

TEST(Corpus, ManifestErrors) {
  EXPECT_EQ(code_of([] { parse_ground_truth("{not json"); }), ErrorCode::MalformedManifest);
  EXPECT_EQ(code_of([] { parse_ground_truth(R"({"vulnerabilities":[]})"); }), ErrorCode::MalformedManifest);
  EXPECT_EQ(code_of([] {
              parse_ground_truth(
                  R"({"projectId":"X","vulnerabilities":[{"id":"A","category":"SQL Injection","path":"a.cs","region":{"startLine":1}}]})");
            }),
            ErrorCode::UnknownCategory);
  EXPECT_EQ(code_of([] {
              parse_ground_truth(
                  R"({"projectId":"X","vulnerabilities":[{"id":"A","category":"xss","path":"a.cs","region":{"startLine":5,"endLine":2}}]})");
            }),
            ErrorCode::MalformedManifest);
  TempDir dir;
  EXPECT_EQ(code_of([&] { load_ground_truth(dir / "missing.json"); }), ErrorCode::MalformedManifest);
}

TEST(Corpus, ManifestPathsChecked) {
  ProjectSource src{"X", {}, {{"a.cs", "x"}}};
  auto m = parse_ground_truth(R"({"projectId":"X","vulnerabilities":[{"id":"A","category":"xss","path":"./a.cs","region":{"startLine":1}}]})");
  EXPECT_NO_THROW(check_manifest_paths(src, m));
  m.vulnerabilities[0].path = "b.cs";
  EXPECT_EQ(code_of([&] { check_manifest_paths(src, m); }), ErrorCode::MalformedManifest);
}

TEST(Corpus, StatsExamples) {
  ProjectSource one{"X", {}, {{"a.cs", "abc"}}};
  GroundTruthManifest empty{"X", {}};
  EXPECT_EQ(corpus_stats(one, empty), (ProjectStats{1, 3, 0}));

  ProjectSource two{"X", {}, {{"a.cs", "ab"}, {"b.cs", "c"}}};
  GroundTruthManifest m{"X", {}};
  m.vulnerabilities.resize(2);
  EXPECT_EQ(corpus_stats(two, m), (ProjectStats{2, 3, 2}));

  GroundTruthManifest other{"Y", {}};
  EXPECT_EQ(code_of([&] { corpus_stats(one, other); }), ErrorCode::ProjectMismatch);
}

TEST(Corpus, FixtureStatsMatchIndependentCount) {
  for (const std::string id : {"F01", "F02", "F03"}) {
    const fs::path root = fixtures() / "corpus" / id;
    const ProjectSource src = load_project(root, kCsExt);
    const GroundTruthManifest m = load_ground_truth(root / kGroundTruthFile);
    check_manifest_paths(src, m);
    const ProjectStats s = corpus_stats(src, m);

    std::size_t files = 0;
    std::size_t chars = 0;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      const auto ext = e.path().extension();
      if (ext != ".cs" && ext != ".csproj") continue;
      ++files;
      chars += count_code_points(testkit::slurp(e.path()));
    }
    EXPECT_EQ(s.file_count, files) << id;
    EXPECT_EQ(s.char_count, chars) << id;
    EXPECT_EQ(s.vuln_count, m.vulnerabilities.size()) << id;
    EXPECT_LE(s.file_count, 10u) << id;
    EXPECT_GE(s.char_count, 3500u) << id;
    EXPECT_LE(s.char_count, 5500u) << id;
  }
}

TEST(Corpus, LoadCorpusSortsAndIsolatesFailures) {
  TempDir dir;
  spit(dir / "B/a.cs", "x");
  spit(dir / "B/groundtruth.json", R"({"projectId":"B","vulnerabilities":[]})");
  spit(dir / "A/a.cs", "x");
  spit(dir / "A/groundtruth.json", R"({"projectId":"WRONG","vulnerabilities":[]})");
  spit(dir / "C/readme.md", "no manifest, not a project");
  spit(dir / ".hidden/groundtruth.json", "{}");
  const auto corpus = load_corpus(dir.path(), kCsExt);
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus[0].id, "A");
  EXPECT_TRUE(corpus[0].error.has_value());
  EXPECT_EQ(corpus[1].id, "B");
  EXPECT_FALSE(corpus[1].error.has_value());
}
