#pragma once

// Benchmark projects on disk and their ground-truth manifests.

#include <algorithm>
#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vulnbench/error.hpp"
#include "vulnbench/sarif.hpp"

namespace vulnbench {

namespace fs = std::filesystem;

inline constexpr std::string_view kGroundTruthFile = "groundtruth.json";

enum class CanonicalCategory {
  sql_injection,
  xss,
  hardcoded_secret,
  command_injection,
  weak_crypto,
  outdated_dependency,
  insecure_deserialization,
  auth_issue,
  input_validation,
  insecure_file_handling,
  other,
};

inline constexpr std::array<CanonicalCategory, 11> kAllCategories = {
    CanonicalCategory::sql_injection,       CanonicalCategory::xss,
    CanonicalCategory::hardcoded_secret,    CanonicalCategory::command_injection,
    CanonicalCategory::weak_crypto,         CanonicalCategory::outdated_dependency,
    CanonicalCategory::insecure_deserialization, CanonicalCategory::auth_issue,
    CanonicalCategory::input_validation,    CanonicalCategory::insecure_file_handling,
    CanonicalCategory::other,
};

constexpr std::string_view to_string(CanonicalCategory c) noexcept {
  switch (c) {
    case CanonicalCategory::sql_injection: return "sql_injection";
    case CanonicalCategory::xss: return "xss";
    case CanonicalCategory::hardcoded_secret: return "hardcoded_secret";
    case CanonicalCategory::command_injection: return "command_injection";
    case CanonicalCategory::weak_crypto: return "weak_crypto";
    case CanonicalCategory::outdated_dependency: return "outdated_dependency";
    case CanonicalCategory::insecure_deserialization: return "insecure_deserialization";
    case CanonicalCategory::auth_issue: return "auth_issue";
    case CanonicalCategory::input_validation: return "input_validation";
    case CanonicalCategory::insecure_file_handling: return "insecure_file_handling";
    case CanonicalCategory::other: return "other";
  }
  return "other";
}

/// Exact snake_case name; anything else is not a category.
inline std::optional<CanonicalCategory> parse_category(std::string_view name) {
  for (CanonicalCategory c : kAllCategories) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

struct SourceFile {
  std::string path;  // forward-slash, relative to the project root
  std::string content;
  bool operator==(const SourceFile&) const = default;
};

struct ProjectSource {
  std::string project_id;
  fs::path root_dir;
  std::vector<SourceFile> files;  // sorted by path
  bool operator==(const ProjectSource&) const = default;
};

struct KnownVulnerability {
  std::string vuln_id;
  CanonicalCategory category = CanonicalCategory::other;
  std::string path;
  Region region;
  std::string description;
  bool operator==(const KnownVulnerability&) const = default;
};

struct GroundTruthManifest {
  std::string project_id;
  std::vector<KnownVulnerability> vulnerabilities;
  bool operator==(const GroundTruthManifest&) const = default;
};

struct ProjectStats {
  std::size_t file_count = 0;
  std::size_t char_count = 0;  // Unicode code points, whitespace included
  std::size_t vuln_count = 0;
  bool operator==(const ProjectStats&) const = default;
};

/// Number of code points if `bytes` is well-formed UTF-8.
inline std::optional<std::size_t> utf8_code_points(std::string_view bytes) {
  std::size_t count = 0;
  std::size_t i = 0;
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(bytes[k]); };
  while (i < bytes.size()) {
    const unsigned char lead = byte(i);
    std::size_t len = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      len = 1;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      len = 2;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
      cp = lead & 0x07;
    } else {
      return std::nullopt;
    }
    if (i + len > bytes.size()) return std::nullopt;
    for (std::size_t k = 1; k < len; ++k) {
      if ((byte(i + k) & 0xC0) != 0x80) return std::nullopt;
      cp = (cp << 6) | (byte(i + k) & 0x3F);
    }
    constexpr char32_t kMinForLen[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLen[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
    i += len;
    ++count;
  }
  return count;
}

namespace detail {

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open file", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed", path.string());
  return std::move(buf).str();
}

inline std::string normalize_extension(std::string_view ext) {
  while (!ext.empty() && ext.front() == '.') ext.remove_prefix(1);
  return ascii_lower(ext);
}

}  // namespace detail

/// Collects every file under `root_dir` whose extension is listed
/// (case-insensitive, leading dot optional). Dot-prefixed directories and the
/// ground-truth manifest are skipped; a leading UTF-8 BOM is dropped.
inline ProjectSource load_project(const fs::path& root_dir, const std::vector<std::string>& extensions) {
  std::set<std::string> wanted;
  for (const auto& e : extensions) wanted.insert(detail::normalize_extension(e));

  std::error_code ec;
  if (!fs::is_directory(root_dir, ec)) {
    throw Error(ErrorCode::IoError, "not a readable directory", root_dir.string());
  }

  ProjectSource src;
  src.project_id = root_dir.filename().string();
  if (src.project_id.empty()) src.project_id = root_dir.parent_path().filename().string();
  src.root_dir = root_dir;

  try {
    for (auto it = fs::recursive_directory_iterator(root_dir); it != fs::recursive_directory_iterator(); ++it) {
      const fs::path& p = it->path();
      const std::string name = p.filename().string();
      if (it->is_directory()) {
        if (!name.empty() && name.front() == '.') it.disable_recursion_pending();
        continue;
      }
      if (!it->is_regular_file()) continue;
      const std::string rel = fs::relative(p, root_dir).generic_string();
      if (rel == kGroundTruthFile) continue;
      if (!wanted.contains(detail::normalize_extension(p.extension().string()))) continue;

      std::string content = detail::read_file(p);
      if (content.rfind("\xEF\xBB\xBF", 0) == 0) content.erase(0, 3);
      if (!utf8_code_points(content)) throw Error(ErrorCode::EncodingError, "file is not valid UTF-8", rel);
      src.files.push_back({rel, std::move(content)});
    }
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::IoError, e.what(), root_dir.string());
  }

  if (src.files.empty()) {
    throw Error(ErrorCode::EmptyProject, "no files with the requested extensions", root_dir.string());
  }
  std::sort(src.files.begin(), src.files.end(),
            [](const SourceFile& a, const SourceFile& b) { return a.path < b.path; });
  return src;
}

/// Parses a manifest document. `origin` names the source in error messages.
inline GroundTruthManifest parse_ground_truth(std::string_view text, const std::string& origin = "manifest") {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedManifest, e.what(), origin);
  }

  GroundTruthManifest m;
  std::set<std::string> ids;
  try {
    m.project_id = detail::as_string(detail::member(doc, "projectId", "$"), "projectId");
    const json& vulns = detail::as_array(detail::member(doc, "vulnerabilities", "$"), "vulnerabilities");
    for (std::size_t i = 0; i < vulns.size(); ++i) {
      const std::string vp = "vulnerabilities[" + std::to_string(i) + "]";
      const json& v = vulns[i];
      KnownVulnerability kv;
      kv.vuln_id = detail::as_string(detail::member(v, "id", vp), vp + ".id");
      if (kv.vuln_id.empty()) detail::schema_error(vp + ".id", "must be non-empty");
      if (!ids.insert(kv.vuln_id).second) detail::schema_error(vp + ".id", "duplicate id '" + kv.vuln_id + "'");

      const std::string cat = detail::as_string(detail::member(v, "category", vp), vp + ".category");
      auto parsed = parse_category(cat);
      if (!parsed) throw Error(ErrorCode::UnknownCategory, "unknown category '" + cat + "'", origin + ":" + vp + ".category");
      kv.category = *parsed;

      kv.path = normalize_path(detail::as_string(detail::member(v, "path", vp), vp + ".path"));
      if (kv.path.empty()) detail::schema_error(vp + ".path", "must be non-empty");
      kv.region = detail::parse_region(detail::member(v, "region", vp), vp + ".region");
      const Region& g = kv.region;
      if (g.start_line < 1 || g.end_line < g.start_line ||
          (g.start_line == g.end_line && g.end_column < g.start_column)) {
        detail::schema_error(vp + ".region", "invalid line/column range");
      }
      if (const json* d = detail::optional_member(v, "description")) {
        kv.description = detail::as_string(*d, vp + ".description");
      }
      m.vulnerabilities.push_back(std::move(kv));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SchemaViolation) throw;
    throw Error(ErrorCode::MalformedManifest, e.detail(), origin + ":" + e.where());
  }
  return m;
}

inline GroundTruthManifest load_ground_truth(const fs::path& path) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedManifest, e.detail(), path.string());
  }
  return parse_ground_truth(text, path.string());
}

/// Throws MalformedManifest if any manifest entry names a file the project lacks.
inline void check_manifest_paths(const ProjectSource& src, const GroundTruthManifest& manifest) {
  std::set<std::string_view> present;
  for (const auto& f : src.files) present.insert(f.path);
  for (const auto& v : manifest.vulnerabilities) {
    if (!present.contains(v.path)) {
      throw Error(ErrorCode::MalformedManifest, "path '" + v.path + "' is not a loaded project file",
                  manifest.project_id + ":" + v.vuln_id);
    }
  }
}

inline ProjectStats corpus_stats(const ProjectSource& src, const GroundTruthManifest& manifest) {
  if (src.project_id != manifest.project_id) {
    throw Error(ErrorCode::ProjectMismatch,
                "project '" + src.project_id + "' vs manifest '" + manifest.project_id + "'");
  }
  ProjectStats s;
  s.file_count = src.files.size();
  for (const auto& f : src.files) s.char_count += utf8_code_points(f.content).value_or(f.content.size());
  s.vuln_count = manifest.vulnerabilities.size();
  return s;
}

}  // namespace vulnbench
