#pragma once

// Pulls the JSON finding array out of free-form model output.

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vulnbench/error.hpp"
#include "vulnbench/sarif.hpp"

namespace vulnbench {

/// One model-reported issue, exactly the fields the system prompt requests.
struct FindingDraft {
  std::string rule_id;
  std::string rule_description;
  Severity level = Severity::warning;
  std::string message;
  std::string path;
  std::string category;
  std::int64_t start_line = 0;
  std::int64_t end_line = 0;
  std::int64_t start_column = 0;
  std::int64_t end_column = 0;
  bool operator==(const FindingDraft&) const = default;
};

struct ExtractionResult {
  std::vector<FindingDraft> drafts;
  std::size_t rejected = 0;
  std::vector<std::string> rejection_reasons;  // one per rejected element
  bool fenced = false;                         // payload came from a ```json block
};

namespace detail {

inline std::optional<std::size_t> find_ci(std::string_view hay, std::string_view needle, std::size_t from = 0) {
  if (needle.size() > hay.size()) return std::nullopt;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < needle.size() && ok; ++k) {
      ok = std::tolower(static_cast<unsigned char>(hay[i + k])) == std::tolower(static_cast<unsigned char>(needle[k]));
    }
    if (ok) return i;
  }
  return std::nullopt;
}

/// End (exclusive) of the bracketed value opening at `open`, string-aware.
inline std::optional<std::size_t> balanced_end(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      ++depth;
    } else if (c == ']' || c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

inline const nlohmann::json* field_ci(const nlohmann::json& obj, std::string_view key) {
  if (auto it = obj.find(std::string(key)); it != obj.end()) return &*it;
  const std::string lower = ascii_lower(key);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (ascii_lower(it.key()) == lower) return &*it;
  }
  return nullptr;
}

inline std::optional<std::int64_t> integral(const nlohmann::json& v) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  return std::nullopt;
}

/// Converts one array element; returns the rejection reason on failure.
inline std::optional<std::string> to_draft(const nlohmann::json& v, FindingDraft& out) {
  if (!v.is_object()) return std::string("element is not an object");
  const auto text = [&](std::string_view key, std::string& dst, bool non_empty) -> std::optional<std::string> {
    const nlohmann::json* f = field_ci(v, key);
    if (f == nullptr) return "missing " + std::string(key);
    if (!f->is_string()) return std::string(key) + " is not a string";
    dst = f->get<std::string>();
    if (non_empty && dst.empty()) return std::string(key) + " is empty";
    return std::nullopt;
  };
  const auto number = [&](std::string_view key, std::int64_t& dst) -> std::optional<std::string> {
    const nlohmann::json* f = field_ci(v, key);
    if (f == nullptr) return "missing " + std::string(key);
    auto n = integral(*f);
    if (!n) return std::string(key) + " is not an integer";
    dst = *n;
    return std::nullopt;
  };

  std::string level;
  if (auto e = text("RuleId", out.rule_id, true)) return e;
  if (auto e = text("RuleDescription", out.rule_description, false)) return e;
  if (auto e = text("Level", level, false)) return e;
  if (auto e = text("Message", out.message, true)) return e;
  if (auto e = text("Path", out.path, true)) return e;
  if (auto e = text("Category", out.category, false)) return e;
  if (auto e = number("StartLine", out.start_line)) return e;
  if (auto e = number("EndLine", out.end_line)) return e;
  if (auto e = number("StartColumn", out.start_column)) return e;
  if (auto e = number("EndColumn", out.end_column)) return e;
  auto sev = parse_severity(level);
  if (!sev) return "unparseable Level '" + level + "'";
  out.level = *sev;
  return std::nullopt;
}

}  // namespace detail

/// Reads the first ```json fenced block, or failing that the first
/// parseable top-level JSON array. Elements that lack a required field or
/// carry an unknown Level are counted as rejected; they never fail the call.
inline ExtractionResult extract_findings(std::string_view content) {
  using nlohmann::json;
  ExtractionResult out;
  json payload;

  if (auto fence = detail::find_ci(content, "```json")) {
    out.fenced = true;
    std::size_t body_begin = *fence + 7;
    const auto close = content.find("```", body_begin);
    std::string_view body = content.substr(body_begin, close == std::string_view::npos ? std::string_view::npos
                                                                                       : close - body_begin);
    try {
      payload = json::parse(body.begin(), body.end());
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::MalformedJson, std::string("fenced payload: ") + e.what());
    }
    if (!payload.is_array()) throw Error(ErrorCode::MalformedJson, "fenced payload is not a JSON array");
  } else {
    bool found = false;
    for (auto open = content.find('['); open != std::string_view::npos; open = content.find('[', open + 1)) {
      auto end = detail::balanced_end(content, open);
      if (!end) continue;
      const std::string_view candidate = content.substr(open, *end - open);
      payload = json::parse(candidate.begin(), candidate.end(), nullptr, false);
      if (!payload.is_discarded() && payload.is_array()) {
        found = true;
        break;
      }
    }
    if (!found) throw Error(ErrorCode::NoFindingsPayload, "response has neither a ```json fence nor a JSON array");
  }

  for (std::size_t i = 0; i < payload.size(); ++i) {
    FindingDraft draft;
    if (auto reason = detail::to_draft(payload[i], draft)) {
      ++out.rejected;
      out.rejection_reasons.push_back("element " + std::to_string(i) + ": " + *reason);
    } else {
      out.drafts.push_back(std::move(draft));
    }
  }
  return out;
}

}  // namespace vulnbench
