#pragma once

// Provider-agnostic chat-completions client: POST {model, messages,
// temperature, max_tokens} with a bearer token, read back
// choices[0].message.content and usage counts.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "vulnbench/error.hpp"
#include "vulnbench/prompt.hpp"

namespace vulnbench {

struct ModelConfig {
  std::string analyzer_id;
  std::string endpoint_url;
  std::string model_name;
  std::string auth_token_env;
  std::int64_t max_output_tokens = 4096;
  double temperature = 0.0;
  double timeout_seconds = 120.0;
  int max_retries = 2;
  double initial_backoff_seconds = 1.0;  // doubles after each retry
  int max_concurrency = 1;               // in-flight requests per analyzer
};

struct RawModelResponse {
  std::string content;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  double latency_seconds = 0.0;
  int retries = 0;
};

struct Endpoint {
  std::string scheme_host_port;  // e.g. "https://models.example.com:443"
  std::string path;              // e.g. "/v1/chat/completions"
};

/// Splits an absolute http(s) URL; returns InvalidConfig otherwise.
inline Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidConfig, "endpoint_url must be absolute", url);
  const std::string scheme = detail::ascii_lower(url.substr(0, scheme_end));
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::InvalidConfig, "endpoint_url scheme must be http or https", url);
  }
  const auto host_begin = scheme_end + 3;
  const auto path_begin = url.find('/', host_begin);
  Endpoint ep;
  ep.scheme_host_port = scheme + "://" + url.substr(host_begin, path_begin - host_begin);
  ep.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
  if (path_begin == host_begin || ep.scheme_host_port.size() == scheme.size() + 3) {
    throw Error(ErrorCode::InvalidConfig, "endpoint_url has no host", url);
  }
  return ep;
}

inline void check_model_config(const ModelConfig& cfg) {
  const std::string& where = cfg.analyzer_id;
  split_endpoint(cfg.endpoint_url);
  if (cfg.model_name.empty()) throw Error(ErrorCode::InvalidConfig, "model_name is required", where);
  if (cfg.auth_token_env.empty()) throw Error(ErrorCode::InvalidConfig, "auth_token_env is required", where);
  if (!(cfg.timeout_seconds > 0)) throw Error(ErrorCode::InvalidConfig, "timeout must be > 0", where);
  if (cfg.max_retries < 0) throw Error(ErrorCode::InvalidConfig, "max_retries must be >= 0", where);
  if (cfg.initial_backoff_seconds < 0) throw Error(ErrorCode::InvalidConfig, "backoff must be >= 0", where);
  if (cfg.max_concurrency < 1) throw Error(ErrorCode::InvalidConfig, "max_concurrency must be >= 1", where);
  if (cfg.max_output_tokens < 1) throw Error(ErrorCode::InvalidConfig, "max_output_tokens must be >= 1", where);
}

inline std::string chat_request_body(const PromptBundle& prompt, const ModelConfig& cfg) {
  nlohmann::ordered_json body;
  body["model"] = cfg.model_name;
  body["messages"] = nlohmann::ordered_json::array({
      {{"role", "system"}, {"content", prompt.system_message}},
      {{"role", "user"}, {"content", prompt.user_message}},
  });
  body["temperature"] = cfg.temperature;
  body["max_tokens"] = cfg.max_output_tokens;
  return body.dump();
}

namespace detail {

inline std::string provider_message(const std::string& body) {
  auto doc = nlohmann::json::parse(body, nullptr, false);
  if (!doc.is_discarded() && doc.is_object()) {
    if (auto it = doc.find("error"); it != doc.end()) {
      if (it->is_string()) return it->get<std::string>();
      if (it->is_object() && it->contains("message") && (*it)["message"].is_string()) {
        return (*it)["message"].get<std::string>();
      }
    }
    if (auto it = doc.find("message"); it != doc.end() && it->is_string()) return it->get<std::string>();
  }
  return body.substr(0, 500);
}

inline RawModelResponse parse_completion(const std::string& body, const std::string& where) {
  auto doc = nlohmann::json::parse(body, nullptr, false);
  const auto fail = [&](const char* what) -> RawModelResponse {
    throw Error(ErrorCode::ProviderError, std::string("malformed completion response: ") + what, where);
  };
  if (doc.is_discarded() || !doc.is_object()) return fail("not a JSON object");
  auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty()) return fail("no choices");
  const auto& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object()) return fail("no message");
  const auto& message = first["message"];
  if (!message.contains("content") || !message["content"].is_string()) return fail("no message content");

  RawModelResponse out;
  out.content = message["content"].get<std::string>();
  if (auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
    if (usage->contains("prompt_tokens") && (*usage)["prompt_tokens"].is_number_integer()) {
      out.prompt_tokens = (*usage)["prompt_tokens"].get<std::int64_t>();
    }
    if (usage->contains("completion_tokens") && (*usage)["completion_tokens"].is_number_integer()) {
      out.completion_tokens = (*usage)["completion_tokens"].get<std::int64_t>();
    }
  }
  return out;
}

}  // namespace detail

/// Sends one system+user chat request. HTTP 429, 5xx and transport failures
/// are retried up to `max_retries` times with exponential backoff; other
/// 4xx responses fail immediately. Latency spans every attempt.
inline RawModelResponse request_analysis(const PromptBundle& prompt, const ModelConfig& cfg) {
  const std::string where = cfg.analyzer_id.empty() ? cfg.model_name : cfg.analyzer_id;
  const char* token = cfg.auth_token_env.empty() ? nullptr : std::getenv(cfg.auth_token_env.c_str());
  if (token == nullptr || *token == '\0') {
    throw Error(ErrorCode::AuthMissing, "environment variable '" + cfg.auth_token_env + "' is not set", where);
  }
  const Endpoint ep = split_endpoint(cfg.endpoint_url);

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (ep.scheme_host_port.rfind("https://", 0) == 0) {
    throw Error(ErrorCode::TransportError, "https endpoints need a TLS-enabled build", where);
  }
#endif

  httplib::Client client(ep.scheme_host_port);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(cfg.timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const httplib::Headers headers = {{"Authorization", std::string("Bearer ") + token},
                                    {"Accept", "application/json"}};
  const std::string body = chat_request_body(prompt, cfg);

  const auto started = std::chrono::steady_clock::now();
  std::string last_failure;
  for (int attempt = 0;; ++attempt) {
    auto res = client.Post(ep.path, headers, body, "application/json");
    bool retryable = false;
    if (!res) {
      last_failure = "transport failure: " + httplib::to_string(res.error());
      retryable = true;
    } else if (res->status >= 200 && res->status < 300) {
      RawModelResponse out = detail::parse_completion(res->body, where);
      out.latency_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      out.retries = attempt;
      return out;
    } else if (res->status == 429 || res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status) + ": " + detail::provider_message(res->body);
      retryable = true;
    } else {
      throw Error(ErrorCode::ProviderError,
                  "HTTP " + std::to_string(res->status) + ": " + detail::provider_message(res->body), where);
    }

    if (!retryable || attempt >= cfg.max_retries) {
      throw Error(ErrorCode::TransportError,
                  last_failure + " (after " + std::to_string(attempt + 1) + " attempt(s))", where);
    }
    const double backoff = cfg.initial_backoff_seconds * static_cast<double>(1LL << attempt);
    std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
  }
}

}  // namespace vulnbench
