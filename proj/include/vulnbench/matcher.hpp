#pragma once

// Finding <-> ground-truth assignment under a location policy.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vulnbench/corpus.hpp"
#include "vulnbench/error.hpp"
#include "vulnbench/sarif.hpp"

namespace vulnbench {

enum class LocationStrictness { region_overlap, same_line, file_only };

constexpr std::string_view to_string(LocationStrictness s) noexcept {
  switch (s) {
    case LocationStrictness::region_overlap: return "region_overlap";
    case LocationStrictness::same_line: return "same_line";
    case LocationStrictness::file_only: return "file_only";
  }
  return "file_only";
}

inline std::optional<LocationStrictness> parse_strictness(std::string_view text) {
  for (auto s : {LocationStrictness::region_overlap, LocationStrictness::same_line, LocationStrictness::file_only}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

struct Synonym {
  std::string keyword;
  CanonicalCategory category;
  bool operator==(const Synonym&) const = default;
};

/// Scan order matters: the first keyword found decides the category.
inline std::vector<Synonym> default_synonyms() {
  using C = CanonicalCategory;
  return {
      {"sql", C::sql_injection},
      {"xss", C::xss},
      {"cross-site", C::xss},
      {"secret", C::hardcoded_secret},
      {"credential", C::hardcoded_secret},
      {"hardcoded", C::hardcoded_secret},
      {"command", C::command_injection},
      {"crypt", C::weak_crypto},
      {"md5", C::weak_crypto},
      {"sha1", C::weak_crypto},
      {"des", C::weak_crypto},
      {"weak_algorithm", C::weak_crypto},
      {"outdated", C::outdated_dependency},
      {"deprecated", C::outdated_dependency},
      {"vulnerable_library", C::outdated_dependency},
      {"dependency", C::outdated_dependency},
      {"deserial", C::insecure_deserialization},
      {"auth", C::auth_issue},
      {"valid", C::input_validation},
      {"saniti", C::input_validation},
      {"path traversal", C::insecure_file_handling},
      {"upload", C::insecure_file_handling},
      {"file", C::insecure_file_handling},
  };
}

struct MatchPolicy {
  LocationStrictness strictness = LocationStrictness::region_overlap;
  bool require_category_match = true;
  std::vector<Synonym> category_synonyms = default_synonyms();
};

namespace detail {

/// Lowercase with '_' and '-' folded to spaces.
inline std::string fold_separators(std::string_view s) {
  std::string out = ascii_lower(s);
  std::replace(out.begin(), out.end(), '_', ' ');
  std::replace(out.begin(), out.end(), '-', ' ');
  return out;
}

/// Lowercased alphanumeric words, splitting camelCase ("DESCrypto" -> des, crypto).
inline std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  const auto flush = [&] {
    if (!cur.empty()) out.push_back(ascii_lower(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (!std::isalnum(c)) {
      flush();
      continue;
    }
    if (!cur.empty() && std::isupper(c)) {
      const auto prev = static_cast<unsigned char>(cur.back());
      const bool next_lower = i + 1 < s.size() && std::islower(static_cast<unsigned char>(s[i + 1]));
      if (std::islower(prev) || std::isdigit(prev) || (std::isupper(prev) && next_lower)) flush();
    }
    cur.push_back(static_cast<char>(c));
  }
  flush();
  return out;
}

}  // namespace detail

/// Keyword scan in table order. Keywords of three characters or fewer
/// ("sql", "xss", "des", "md5") must equal a whole word so that "Sqlite" or
/// "deserialize" do not trigger them; longer keywords match as substrings.
inline CanonicalCategory normalize_category(std::string_view free_text,
                                            const std::vector<Synonym>& table = default_synonyms()) {
  const std::string folded = detail::fold_separators(free_text);
  const std::vector<std::string> tokens = detail::words(free_text);
  for (const Synonym& syn : table) {
    const std::string kw = detail::fold_separators(syn.keyword);
    if (kw.empty()) continue;
    const bool whole_word = kw.size() <= 3 && kw.find(' ') == std::string::npos;
    if (whole_word) {
      if (std::find(tokens.begin(), tokens.end(), kw) != tokens.end()) return syn.category;
    } else if (folded.find(kw) != std::string::npos) {
      return syn.category;
    }
  }
  return CanonicalCategory::other;
}

/// Category of a finding: rule id first, then rule description, then message.
inline CanonicalCategory finding_category(const Finding& f, const std::vector<Synonym>& table = default_synonyms()) {
  for (std::string_view text : {std::string_view(f.rule_id), std::string_view(f.rule_description),
                                std::string_view(f.message)}) {
    if (auto c = normalize_category(text, table); c != CanonicalCategory::other) return c;
  }
  return CanonicalCategory::other;
}

inline bool location_compatible(const Region& found, const Region& known, LocationStrictness s) {
  switch (s) {
    case LocationStrictness::file_only: return true;
    case LocationStrictness::same_line: return found.start_line == known.start_line;
    case LocationStrictness::region_overlap:
      return found.start_line <= known.end_line && known.start_line <= found.end_line;
  }
  return false;
}

struct MatchPair {
  std::size_t finding_index;
  std::string vuln_id;
  bool operator==(const MatchPair&) const = default;
};

struct MatchReport {
  std::vector<MatchPair> pairs;                // in manifest order
  std::vector<std::size_t> unmatched_findings;  // ascending
  std::vector<std::string> unmatched_vulns;     // in manifest order
  bool operator==(const MatchReport&) const = default;
};

struct RawCounts {
  std::size_t total_found = 0;
  std::size_t true_positives = 0;
  std::size_t known_vulnerabilities = 0;
  bool operator==(const RawCounts&) const = default;
};

/// Candidate (finding, vulnerability) edges: adjacency[v] lists finding
/// indices usable for manifest entry v, ascending.
inline std::vector<std::vector<std::size_t>> candidate_edges(const std::vector<Finding>& findings,
                                                             const GroundTruthManifest& manifest,
                                                             const MatchPolicy& policy) {
  std::vector<std::string> paths;
  std::vector<CanonicalCategory> cats;
  for (const Finding& f : findings) {
    paths.push_back(normalize_path(f.path));
    cats.push_back(policy.require_category_match ? finding_category(f, policy.category_synonyms)
                                                 : CanonicalCategory::other);
  }
  std::vector<std::vector<std::size_t>> adj(manifest.vulnerabilities.size());
  for (std::size_t v = 0; v < manifest.vulnerabilities.size(); ++v) {
    const KnownVulnerability& kv = manifest.vulnerabilities[v];
    const std::string kpath = normalize_path(kv.path);
    for (std::size_t i = 0; i < findings.size(); ++i) {
      if (paths[i] != kpath) continue;
      if (policy.require_category_match && cats[i] != kv.category) continue;
      if (!location_compatible(findings[i].region, kv.region, policy.strictness)) continue;
      adj[v].push_back(i);
    }
  }
  return adj;
}

/// Maximum-cardinality one-to-one assignment (augmenting paths). Vulnerabilities
/// are processed in manifest order and try findings in report order, so the
/// chosen pairs are deterministic; only their identities, never their number,
/// depend on report order.
inline MatchReport match_findings(const std::vector<Finding>& findings, const GroundTruthManifest& manifest,
                                  const MatchPolicy& policy, std::optional<std::string_view> project_id = {}) {
  if (project_id && *project_id != manifest.project_id) {
    throw Error(ErrorCode::ProjectMismatch,
                "findings for '" + std::string(*project_id) + "' vs manifest '" + manifest.project_id + "'");
  }
  const auto adj = candidate_edges(findings, manifest, policy);
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(findings.size(), kNone);  // finding -> vuln
  std::vector<char> visited;

  const auto augment = [&](auto&& self, std::size_t v) -> bool {
    for (std::size_t i : adj[v]) {
      if (visited[i]) continue;
      visited[i] = 1;
      if (owner[i] == kNone || self(self, owner[i])) {
        owner[i] = v;
        return true;
      }
    }
    return false;
  };
  for (std::size_t v = 0; v < adj.size(); ++v) {
    visited.assign(findings.size(), 0);
    augment(augment, v);
  }

  std::vector<std::size_t> mate(manifest.vulnerabilities.size(), kNone);  // vuln -> finding
  for (std::size_t i = 0; i < owner.size(); ++i) {
    if (owner[i] != kNone) mate[owner[i]] = i;
  }
  MatchReport report;
  for (std::size_t v = 0; v < mate.size(); ++v) {
    const std::string& id = manifest.vulnerabilities[v].vuln_id;
    if (mate[v] == kNone) {
      report.unmatched_vulns.push_back(id);
    } else {
      report.pairs.push_back({mate[v], id});
    }
  }
  for (std::size_t i = 0; i < owner.size(); ++i) {
    if (owner[i] == kNone) report.unmatched_findings.push_back(i);
  }
  return report;
}

inline RawCounts confusion_counts(const MatchReport& report, std::size_t total_found, std::size_t known) {
  if (report.pairs.size() > std::min(total_found, known)) {
    throw Error(ErrorCode::InconsistentReport, std::to_string(report.pairs.size()) + " pairs exceed min(total " +
                                                   std::to_string(total_found) + ", known " +
                                                   std::to_string(known) + ")");
  }
  return {total_found, report.pairs.size(), known};
}

}  // namespace vulnbench
