#pragma once

// Benchmark configuration file. Keys mirror the struct field names; relative
// paths resolve against the directory holding the config file.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vulnbench/chat_client.hpp"
#include "vulnbench/corpus.hpp"
#include "vulnbench/error.hpp"
#include "vulnbench/matcher.hpp"

namespace vulnbench {

enum class AnalyzerKind { llm, sarif_import };

constexpr std::string_view to_string(AnalyzerKind k) noexcept {
  return k == AnalyzerKind::llm ? "llm" : "sarif_import";
}

struct AnalyzerSpec {
  AnalyzerKind kind = AnalyzerKind::llm;
  std::string id;
  std::optional<ModelConfig> model;   // iff kind == llm
  std::optional<fs::path> sarif_dir;  // iff kind == sarif_import; holds <project_id>.sarif
};

struct BenchmarkConfig {
  fs::path corpus_root;
  std::vector<std::string> extensions{"cs", "csproj", "sln"};
  std::vector<AnalyzerSpec> analyzers;
  fs::path output_dir{"out"};
  std::map<std::string, MatchPolicy> match_overrides;
  std::size_t workers = 0;  // 0: one worker per analyzer
};

/// llm -> file_only (model regions are unreliable), sarif_import -> region_overlap.
inline MatchPolicy default_policy(AnalyzerKind kind) {
  MatchPolicy p;
  p.strictness = kind == AnalyzerKind::llm ? LocationStrictness::file_only : LocationStrictness::region_overlap;
  return p;
}

inline MatchPolicy policy_for(const BenchmarkConfig& cfg, const AnalyzerSpec& spec) {
  if (auto it = cfg.match_overrides.find(spec.id); it != cfg.match_overrides.end()) return it->second;
  return default_policy(spec.kind);
}

namespace detail {

[[noreturn]] inline void config_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, what, where);
}

inline fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

inline ModelConfig parse_model(const nlohmann::json& j, const std::string& id) {
  ModelConfig m;
  m.analyzer_id = id;
  m.endpoint_url = j.at("endpoint_url").get<std::string>();
  m.model_name = j.at("model_name").get<std::string>();
  m.auth_token_env = j.at("auth_token_env").get<std::string>();
  m.max_output_tokens = j.value("max_output_tokens", m.max_output_tokens);
  m.temperature = j.value("temperature", m.temperature);
  m.timeout_seconds = j.value("timeout", m.timeout_seconds);
  m.max_retries = j.value("max_retries", m.max_retries);
  m.initial_backoff_seconds = j.value("initial_backoff", m.initial_backoff_seconds);
  m.max_concurrency = j.value("max_concurrency", m.max_concurrency);
  check_model_config(m);
  return m;
}

// Rejected anywhere in the document, not just inside model blocks.
inline void reject_inline_tokens(const nlohmann::json& j, const std::string& where) {
  if (j.is_object()) {
    for (auto kv = j.begin(); kv != j.end(); ++kv) {
      const std::string at = where.empty() ? kv.key() : where + "." + kv.key();
      if (kv.key() == "auth_token") config_error(at, "tokens belong in the environment, not the config file");
      reject_inline_tokens(kv.value(), at);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) reject_inline_tokens(j[i], where + "[" + std::to_string(i) + "]");
  }
}

inline MatchPolicy parse_policy(const nlohmann::json& j, MatchPolicy base, const std::string& where) {
  if (auto it = j.find("strictness"); it != j.end()) {
    auto s = parse_strictness(it->get<std::string>());
    if (!s) config_error(where + ".strictness", "unknown strictness '" + it->get<std::string>() + "'");
    base.strictness = *s;
  }
  base.require_category_match = j.value("require_category_match", base.require_category_match);
  if (auto it = j.find("category_synonyms"); it != j.end()) {
    for (auto kv = it->begin(); kv != it->end(); ++kv) {
      auto cat = parse_category(kv.value().get<std::string>());
      if (!cat) throw Error(ErrorCode::UnknownCategory, "unknown category '" + kv.value().get<std::string>() + "'", where);
      base.category_synonyms.push_back({kv.key(), *cat});
    }
  }
  return base;
}

}  // namespace detail

inline BenchmarkConfig parse_config(std::string_view text, const fs::path& base_dir) {
  using nlohmann::json;
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::InvalidConfig, "config is not a JSON object");
  detail::reject_inline_tokens(doc, "");

  BenchmarkConfig cfg;
  try {
    cfg.corpus_root = detail::resolve(base_dir, doc.at("corpus_root").get<std::string>());
    if (doc.contains("extensions")) cfg.extensions = doc["extensions"].get<std::vector<std::string>>();
    cfg.output_dir = detail::resolve(base_dir, doc.value("output_dir", std::string("out")));
    cfg.workers = doc.value("workers", std::size_t{0});

    std::set<std::string> ids;
    const json& analyzers = doc.value("analyzers", json::array());
    for (std::size_t i = 0; i < analyzers.size(); ++i) {
      const json& a = analyzers[i];
      const std::string where = "analyzers[" + std::to_string(i) + "]";
      AnalyzerSpec spec;
      spec.id = a.at("id").get<std::string>();
      if (spec.id.empty()) detail::config_error(where + ".id", "must be non-empty");
      if (!ids.insert(spec.id).second) detail::config_error(where + ".id", "duplicate analyzer id '" + spec.id + "'");
      const std::string kind = a.at("kind").get<std::string>();
      if (kind == "llm") {
        spec.kind = AnalyzerKind::llm;
        if (!a.contains("model")) detail::config_error(where, "llm analyzers require 'model'");
        if (a.contains("sarif_dir")) detail::config_error(where, "llm analyzers take no 'sarif_dir'");
        spec.model = detail::parse_model(a["model"], spec.id);
      } else if (kind == "sarif_import") {
        spec.kind = AnalyzerKind::sarif_import;
        if (!a.contains("sarif_dir")) detail::config_error(where, "sarif_import analyzers require 'sarif_dir'");
        if (a.contains("model")) detail::config_error(where, "sarif_import analyzers take no 'model'");
        spec.sarif_dir = detail::resolve(base_dir, a["sarif_dir"].get<std::string>());
      } else {
        detail::config_error(where + ".kind", "unknown analyzer kind '" + kind + "'");
      }
      cfg.analyzers.push_back(std::move(spec));
    }

    if (auto it = doc.find("match_overrides"); it != doc.end()) {
      for (auto kv = it->begin(); kv != it->end(); ++kv) {
        auto spec = std::find_if(cfg.analyzers.begin(), cfg.analyzers.end(),
                                 [&](const AnalyzerSpec& s) { return s.id == kv.key(); });
        if (spec == cfg.analyzers.end()) {
          detail::config_error("match_overrides." + kv.key(), "no analyzer with this id");
        }
        cfg.match_overrides[kv.key()] =
            detail::parse_policy(kv.value(), default_policy(spec->kind), "match_overrides." + kv.key());
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }

  if (cfg.analyzers.empty()) throw Error(ErrorCode::EmptyConfig, "config lists no analyzers");
  std::error_code ec;
  if (!fs::is_directory(cfg.corpus_root, ec)) {
    throw Error(ErrorCode::InvalidConfig, "corpus_root is not a directory", cfg.corpus_root.string());
  }
  return cfg;
}

inline BenchmarkConfig load_config(const fs::path& path) {
  const std::string text = detail::read_file(path);
  return parse_config(text, fs::absolute(path).parent_path());
}

}  // namespace vulnbench
