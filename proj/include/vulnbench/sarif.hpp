#pragma once

// Minimal SARIF 2.1.0 model: the field subset a findings report needs
// (tool driver, rules, results with one physical location each).

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vulnbench/error.hpp"

namespace vulnbench {

inline constexpr std::string_view kSarifSchemaUri = "https://json.schemastore.org/sarif-2.1.0.json";
inline constexpr std::string_view kSarifVersion = "2.1.0";

enum class Severity { error, warning, note, none };

constexpr std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::error: return "error";
    case Severity::warning: return "warning";
    case Severity::note: return "note";
    case Severity::none: return "none";
  }
  return "none";
}

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace detail

/// Case-insensitive; anything outside {error, warning, note, none} is rejected.
inline std::optional<Severity> parse_severity(std::string_view text) {
  const std::string lower = detail::ascii_lower(text);
  if (lower == "error") return Severity::error;
  if (lower == "warning") return Severity::warning;
  if (lower == "note") return Severity::note;
  if (lower == "none") return Severity::none;
  return std::nullopt;
}

/// 1-based, inclusive line and column range.
struct Region {
  std::int64_t start_line = 1;
  std::int64_t end_line = 1;
  std::int64_t start_column = 1;
  std::int64_t end_column = 1;
  bool operator==(const Region&) const = default;
};

struct PhysicalLocation {
  std::string artifact_uri;
  Region region;
  bool operator==(const PhysicalLocation&) const = default;
};

struct RuleMeta {
  std::string id;
  std::string short_description;
  bool operator==(const RuleMeta&) const = default;
};

struct ResultEntry {
  std::string rule_id;
  std::size_t rule_index = 0;
  Severity level = Severity::warning;
  std::string message;
  PhysicalLocation location;
  bool operator==(const ResultEntry&) const = default;
};

struct Run {
  std::string tool_name;
  std::string tool_semantic_version;  // carried for fidelity; tool_version is authoritative
  std::string tool_version;
  std::vector<RuleMeta> rules;
  std::vector<ResultEntry> results;

  /// Index of the rule with `id`, appending a new rule when absent.
  std::size_t intern_rule(std::string_view id, std::string_view description) {
    for (std::size_t i = 0; i < rules.size(); ++i) {
      if (rules[i].id == id) return i;
    }
    rules.push_back({std::string(id), std::string(description)});
    return rules.size() - 1;
  }

  bool operator==(const Run&) const = default;
};

struct SarifLog {
  std::string schema_uri{kSarifSchemaUri};
  std::string version{kSarifVersion};
  std::vector<Run> runs;
  bool operator==(const SarifLog&) const = default;
};

/// Analyzer-agnostic view of one result, with its rule metadata resolved.
struct Finding {
  std::string analyzer_id;
  std::string rule_id;
  std::string rule_description;
  Severity level = Severity::warning;
  std::string message;
  std::string path;
  Region region;
  bool operator==(const Finding&) const = default;
};

struct Violation {
  std::string path;
  std::string rule;
  std::string describe() const { return path + ": " + rule; }
};

/// Forward slashes, no scheme, no leading "./" or "/".
inline std::string normalize_path(std::string_view raw) {
  std::string p(raw);
  std::replace(p.begin(), p.end(), '\\', '/');
  if (p.rfind("file://", 0) == 0) p.erase(0, 7);
  for (;;) {
    if (p.rfind("./", 0) == 0) {
      p.erase(0, 2);
    } else if (!p.empty() && p.front() == '/') {
      p.erase(0, 1);
    } else {
      break;
    }
  }
  std::string out;
  out.reserve(p.size());
  for (char c : p) {
    if (c == '/' && !out.empty() && out.back() == '/') continue;
    out.push_back(c);
  }
  return out;
}

/// Checks every type invariant; an empty result means the log can be emitted.
inline std::vector<Violation> validate(const SarifLog& log) {
  std::vector<Violation> out;
  if (log.version != kSarifVersion) out.push_back({"version", "must be \"2.1.0\""});
  if (log.runs.empty()) out.push_back({"runs", "must be non-empty"});

  for (std::size_t r = 0; r < log.runs.size(); ++r) {
    const Run& run = log.runs[r];
    const std::string rp = "runs[" + std::to_string(r) + "]";
    if (run.tool_name.empty()) out.push_back({rp + ".tool.driver.name", "must be non-empty"});

    std::set<std::string_view> seen;
    std::set<std::string_view> reported;
    for (std::size_t k = 0; k < run.rules.size(); ++k) {
      const auto& id = run.rules[k].id;
      if (id.empty()) {
        out.push_back({rp + ".tool.driver.rules[" + std::to_string(k) + "].id", "must be non-empty"});
        continue;
      }
      if (!seen.insert(id).second && reported.insert(id).second) {
        out.push_back({rp + ".tool.driver.rules", "duplicate rule id '" + id + "'"});
      }
    }

    for (std::size_t i = 0; i < run.results.size(); ++i) {
      const ResultEntry& res = run.results[i];
      const std::string ep = rp + ".results[" + std::to_string(i) + "]";
      if (res.rule_index >= run.rules.size()) {
        out.push_back({ep + ".ruleIndex", "index " + std::to_string(res.rule_index) + " out of range for " +
                                              std::to_string(run.rules.size()) + " rule(s)"});
      } else if (res.rule_id != run.rules[res.rule_index].id) {
        out.push_back({ep + ".ruleId", "'" + res.rule_id + "' does not match rules[" +
                                           std::to_string(res.rule_index) + "].id '" +
                                           run.rules[res.rule_index].id + "'"});
      }
      if (res.message.empty()) out.push_back({ep + ".message.text", "must be non-empty"});

      const std::string lp = ep + ".locations[0].physicalLocation";
      const std::string& uri = res.location.artifact_uri;
      if (uri.empty()) {
        out.push_back({lp + ".artifactLocation.uri", "must be non-empty"});
      } else if (uri.front() == '/' || uri.find('\\') != std::string::npos) {
        out.push_back({lp + ".artifactLocation.uri", "must be a forward-slash relative path"});
      }

      const Region& g = res.location.region;
      const std::string gp = lp + ".region";
      if (g.start_line < 1) out.push_back({gp + ".startLine", "must be >= 1"});
      if (g.end_line < g.start_line) out.push_back({gp + ".endLine", "must be >= startLine"});
      if (g.start_column < 1) out.push_back({gp + ".startColumn", "must be >= 1"});
      if (g.end_column < 1) out.push_back({gp + ".endColumn", "must be >= 1"});
      if (g.start_line == g.end_line && g.end_column < g.start_column) {
        out.push_back({gp + ".endColumn", "must be >= startColumn on a single-line region"});
      }
    }
  }
  return out;
}

namespace detail {

using nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, what, path);
}

inline const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "required field missing");
  return *it;
}

inline const json* optional_member(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected a string");
  return v.get<std::string>();
}

inline std::int64_t as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) schema_error(path, "expected an integer");
  return v.get<std::int64_t>();
}

inline const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array");
  return v;
}

inline Region parse_region(const json& region, const std::string& path) {
  Region g;
  g.start_line = as_integer(member(region, "startLine", path), path + ".startLine");
  const json* end_line = optional_member(region, "endLine");
  const json* start_col = optional_member(region, "startColumn");
  const json* end_col = optional_member(region, "endColumn");
  g.end_line = end_line ? as_integer(*end_line, path + ".endLine") : g.start_line;
  g.start_column = start_col ? as_integer(*start_col, path + ".startColumn") : 1;
  g.end_column = end_col ? as_integer(*end_col, path + ".endColumn") : g.start_column;
  return g;
}

inline ResultEntry parse_result(const json& res, Run& run, const std::string& path) {
  ResultEntry e;
  const json* rule_id = optional_member(res, "ruleId");
  const json* rule_index = optional_member(res, "ruleIndex");
  if (!rule_id && !rule_index) schema_error(path + ".ruleId", "required field missing");
  if (rule_id) e.rule_id = as_string(*rule_id, path + ".ruleId");
  if (rule_index) {
    const std::int64_t idx = as_integer(*rule_index, path + ".ruleIndex");
    if (idx < 0 || static_cast<std::size_t>(idx) >= run.rules.size()) {
      schema_error(path + ".ruleIndex", "index " + std::to_string(idx) + " out of range for " +
                                            std::to_string(run.rules.size()) + " rule(s)");
    }
    e.rule_index = static_cast<std::size_t>(idx);
    if (!rule_id) e.rule_id = run.rules[e.rule_index].id;
  } else {
    // Tools that omit ruleIndex still name the rule; register it if the driver did not.
    e.rule_index = run.intern_rule(e.rule_id, "");
  }

  if (const json* level = optional_member(res, "level")) {
    const std::string text = as_string(*level, path + ".level");
    auto sev = parse_severity(text);
    if (!sev) schema_error(path + ".level", "unknown severity '" + text + "'");
    e.level = *sev;
  }

  const json& message = member(res, "message", path);
  e.message = as_string(member(message, "text", path + ".message"), path + ".message.text");

  const json& locations = as_array(member(res, "locations", path), path + ".locations");
  if (locations.empty()) schema_error(path + ".locations", "at least one location required");
  const std::string lp = path + ".locations[0].physicalLocation";
  const json& phys = member(locations[0], "physicalLocation", path + ".locations[0]");
  const json& artifact = member(phys, "artifactLocation", lp);
  e.location.artifact_uri =
      normalize_path(as_string(member(artifact, "uri", lp + ".artifactLocation"), lp + ".artifactLocation.uri"));
  e.location.region = parse_region(member(phys, "region", lp), lp + ".region");
  return e;
}

inline Run parse_run(const json& run_json, const std::string& path) {
  Run run;
  const std::string dp = path + ".tool.driver";
  const json& driver = member(member(run_json, "tool", path), "driver", path + ".tool");
  run.tool_name = as_string(member(driver, "name", dp), dp + ".name");
  if (const json* v = optional_member(driver, "semanticVersion")) {
    run.tool_semantic_version = as_string(*v, dp + ".semanticVersion");
  }
  if (const json* v = optional_member(driver, "version")) run.tool_version = as_string(*v, dp + ".version");

  if (const json* rules = optional_member(driver, "rules")) {
    as_array(*rules, dp + ".rules");
    for (std::size_t k = 0; k < rules->size(); ++k) {
      const std::string kp = dp + ".rules[" + std::to_string(k) + "]";
      RuleMeta rule;
      rule.id = as_string(member((*rules)[k], "id", kp), kp + ".id");
      if (const json* sd = optional_member((*rules)[k], "shortDescription")) {
        if (const json* text = optional_member(*sd, "text")) {
          rule.short_description = as_string(*text, kp + ".shortDescription.text");
        }
      }
      run.rules.push_back(std::move(rule));
    }
  }

  if (const json* results = optional_member(run_json, "results")) {
    as_array(*results, path + ".results");
    for (std::size_t i = 0; i < results->size(); ++i) {
      run.results.push_back(parse_result((*results)[i], run, path + ".results[" + std::to_string(i) + "]"));
    }
  }
  return run;
}

}  // namespace detail

/// Parses SARIF 2.1.0 text. Fields outside the supported subset are ignored.
/// Paths are normalized to forward-slash relative form.
inline SarifLog parse_sarif(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what(), "$");
  }
  if (!doc.is_object()) detail::schema_error("$", "top level must be an object");

  SarifLog log;
  log.schema_uri.clear();
  if (const json* schema = detail::optional_member(doc, "$schema")) {
    log.schema_uri = detail::as_string(*schema, "$schema");
  }
  log.version = detail::as_string(detail::member(doc, "version", "$"), "version");
  if (log.version != kSarifVersion) {
    detail::schema_error("version", "unsupported SARIF version '" + log.version + "'");
  }
  const json& runs = detail::as_array(detail::member(doc, "runs", "$"), "runs");
  for (std::size_t r = 0; r < runs.size(); ++r) {
    log.runs.push_back(detail::parse_run(runs[r], "runs[" + std::to_string(r) + "]"));
  }

  for (const Violation& v : validate(log)) {
    if (v.path == "runs") continue;  // an empty run list is readable, just not emittable
    detail::schema_error(v.path, v.rule);
  }
  return log;
}

/// Deterministic 2-space-indented JSON with keys in the canonical SARIF order.
inline std::string emit_sarif(const SarifLog& log) {
  if (auto violations = validate(log); !violations.empty()) {
    throw Error(ErrorCode::InvariantViolation, violations.front().rule, violations.front().path);
  }
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["$schema"] = kSarifSchemaUri;
  doc["version"] = log.version;
  ordered_json runs = ordered_json::array();
  for (const Run& run : log.runs) {
    ordered_json driver;
    driver["name"] = run.tool_name;
    if (!run.tool_semantic_version.empty()) driver["semanticVersion"] = run.tool_semantic_version;
    driver["version"] = run.tool_version;
    ordered_json rules = ordered_json::array();
    for (const RuleMeta& rule : run.rules) {
      ordered_json r;
      r["id"] = rule.id;
      r["shortDescription"]["text"] = rule.short_description;
      rules.push_back(std::move(r));
    }
    driver["rules"] = std::move(rules);

    ordered_json results = ordered_json::array();
    for (const ResultEntry& res : run.results) {
      ordered_json e;
      e["ruleId"] = res.rule_id;
      e["ruleIndex"] = res.rule_index;
      e["level"] = to_string(res.level);
      e["message"]["text"] = res.message;
      ordered_json phys;
      phys["artifactLocation"]["uri"] = res.location.artifact_uri;
      const Region& g = res.location.region;
      phys["region"]["startLine"] = g.start_line;
      phys["region"]["endLine"] = g.end_line;
      phys["region"]["startColumn"] = g.start_column;
      phys["region"]["endColumn"] = g.end_column;
      ordered_json loc;
      loc["physicalLocation"] = std::move(phys);
      e["locations"] = ordered_json::array({std::move(loc)});
      results.push_back(std::move(e));
    }

    ordered_json run_json;
    run_json["tool"]["driver"] = std::move(driver);
    run_json["results"] = std::move(results);
    runs.push_back(std::move(run_json));
  }
  doc["runs"] = std::move(runs);
  return doc.dump(2) + "\n";
}

/// One Finding per result, in run-then-result order.
inline std::vector<Finding> findings_of(const SarifLog& log, std::string_view analyzer_id) {
  std::vector<Finding> out;
  for (const Run& run : log.runs) {
    for (const ResultEntry& res : run.results) {
      Finding f;
      f.analyzer_id = std::string(analyzer_id);
      f.rule_id = res.rule_id;
      if (res.rule_index < run.rules.size()) f.rule_description = run.rules[res.rule_index].short_description;
      f.level = res.level;
      f.message = res.message;
      f.path = res.location.artifact_uri;
      f.region = res.location.region;
      out.push_back(std::move(f));
    }
  }
  return out;
}

}  // namespace vulnbench
