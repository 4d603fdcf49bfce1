#pragma once

// HTTP clients for remote embedding, paraphrase and completion services.
// Each request opens its own connection, so one client object can be used
// from many threads.

#include <chrono>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "inkflux/error.hpp"
#include "inkflux/orchestrator.hpp"
#include "inkflux/textmetrics.hpp"

namespace inkflux::remote {

inline constexpr const char* kApiKeyEnv = "INKFLUX_API_KEY";

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // base path without trailing slash, may be empty

  /// Splits "http://host:8080/api/v1" into origin and base path.
  static Endpoint parse(std::string_view url) {
    const auto scheme = url.find("://");
    if (scheme == std::string_view::npos) {
      throw Error(ErrorKind::InvalidConfig,
                  "endpoint needs a scheme: '" + std::string(url) + "'");
    }
    const std::string_view s = url.substr(0, scheme);
    if (s != "http" && s != "https") {
      throw Error(ErrorKind::InvalidConfig,
                  "unsupported scheme '" + std::string(s) + "'");
    }
    const auto slash = url.find('/', scheme + 3);
    Endpoint ep;
    ep.origin = std::string(url.substr(0, slash));
    if (slash != std::string_view::npos) {
      ep.path = std::string(url.substr(slash));
      while (!ep.path.empty() && ep.path.back() == '/') ep.path.pop_back();
    }
    return ep;
  }
};

struct HttpOptions {
  std::chrono::milliseconds timeout{30000};
  std::size_t max_retries = 2;  // on connection errors, 429 and 5xx
  std::chrono::milliseconds retry_backoff{250};
  std::optional<std::string> api_key;  // sent as a bearer token
};

inline std::optional<std::string> api_key_from_env() {
  if (const char* v = std::getenv(kApiKeyEnv); v && *v) return std::string(v);
  return std::nullopt;
}

namespace detail {

inline bool retryable(int status) { return status == 429 || status >= 500; }

/// POSTs JSON and returns the parsed response body; throws ProviderFailure.
inline nlohmann::json post_json(const Endpoint& ep, std::string_view route,
                                const nlohmann::json& body,
                                const HttpOptions& opts) {
  const std::string path = ep.path + std::string(route);
  const std::string payload = body.dump();
  std::string last_error;
  auto backoff = opts.retry_backoff;
  for (std::size_t attempt = 0; attempt <= opts.max_retries; ++attempt) {
    if (attempt > 0 && backoff.count() > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client cli(ep.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(opts.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (opts.api_key) headers.emplace("Authorization", "Bearer " + *opts.api_key);
    auto res = cli.Post(path, headers, payload, "application/json");
    if (!res) {
      last_error = "POST " + ep.origin + path + ": " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "POST " + ep.origin + path + ": HTTP " + std::to_string(res->status);
      if (retryable(res->status)) continue;
      break;
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ProviderFailure,
                  "POST " + ep.origin + path + ": bad JSON response: " + e.what());
    }
  }
  throw Error(ErrorKind::ProviderFailure, last_error);
}

inline std::vector<double> as_vector(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorKind::ProviderFailure, "vector is not an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) throw Error(ErrorKind::ProviderFailure, "non-numeric vector entry");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace detail

/// POST {endpoint}/embed {"texts": [...]} -> {"vectors": [[...], ...]}.
class HttpEmbeddingProvider final : public textmetrics::EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string_view endpoint, HttpOptions opts = {},
                        std::size_t dimension = 0)
      : ep_(Endpoint::parse(endpoint)), opts_(std::move(opts)), dimension_(dimension) {}

  /// Configured dimension, or 0 when it is taken from the service.
  std::size_t dimension() const override { return dimension_; }

  std::vector<double> embed(std::string_view text) const override {
    const std::string t(text);
    return embed_batch(std::span<const std::string>(&t, 1)).front();
  }

  std::vector<std::vector<double>> embed_batch(
      std::span<const std::string> texts) const override {
    nlohmann::json body;
    body["texts"] = std::vector<std::string>(texts.begin(), texts.end());
    const auto res = detail::post_json(ep_, "/embed", body, opts_);
    auto it = res.find("vectors");
    if (it == res.end() || !it->is_array() || it->size() != texts.size()) {
      throw Error(ErrorKind::ProviderFailure,
                  "embed response must carry one vector per text");
    }
    std::vector<std::vector<double>> out;
    for (const auto& v : *it) {
      out.push_back(detail::as_vector(v));
      if (out.back().size() != out.front().size() || out.back().empty() ||
          (dimension_ != 0 && out.back().size() != dimension_)) {
        throw Error(ErrorKind::ProviderFailure, "embedding dimension mismatch");
      }
    }
    return out;
  }

 private:
  Endpoint ep_;
  HttpOptions opts_;
  std::size_t dimension_;
};

/// POST {endpoint}/paraphrase {"pairs": [["a","b"], ...]} -> {"scores": [...]}.
class HttpParaphraseProvider final : public textmetrics::ParaphraseProvider {
 public:
  HttpParaphraseProvider(std::string_view endpoint, HttpOptions opts = {})
      : ep_(Endpoint::parse(endpoint)), opts_(std::move(opts)) {}

  double score(std::string_view a, std::string_view b) const override {
    const std::pair<std::string, std::string> p{std::string(a), std::string(b)};
    return score_batch(std::span(&p, 1)).front();
  }

  std::vector<double> score_batch(
      std::span<const std::pair<std::string, std::string>> pairs) const override {
    nlohmann::json body;
    body["pairs"] = nlohmann::json::array();
    for (const auto& [a, b] : pairs) body["pairs"].push_back({a, b});
    const auto res = detail::post_json(ep_, "/paraphrase", body, opts_);
    auto it = res.find("scores");
    if (it == res.end() || !it->is_array() || it->size() != pairs.size()) {
      throw Error(ErrorKind::ProviderFailure,
                  "paraphrase response must carry one score per pair");
    }
    return detail::as_vector(*it);
  }

 private:
  Endpoint ep_;
  HttpOptions opts_;
};

struct CompletionOptions {
  std::string model = orchestrator::kDefaultModelId;
  int max_tokens = 100;
  double temperature = 0.8;
};

/// POST {endpoint}/complete {"model","prompt","max_tokens","temperature"}
/// -> {"text": "..."}. Plot tasks send the rendered plot prompt;
/// continuation tasks send the raw snippet. Latency is measured wall time.
class HttpCompletionProvider final : public orchestrator::SuggestionProvider {
 public:
  HttpCompletionProvider(std::string_view endpoint, CompletionOptions completion = {},
                         HttpOptions opts = {})
      : ep_(Endpoint::parse(endpoint)),
        completion_(std::move(completion)),
        opts_(std::move(opts)) {}

  static std::string prompt_for(const orchestrator::SuggestionTask& task) {
    if (task.task_type == oplog::TaskType::gpt3_continuation) return task.snippet;
    return orchestrator::render_plot_prompt(task.snippet,
                                            task.instruction.value_or(""));
  }

  nlohmann::ordered_json request_body(const orchestrator::SuggestionTask& task) const {
    nlohmann::ordered_json body;
    body["model"] = completion_.model;
    body["prompt"] = prompt_for(task);
    body["max_tokens"] = completion_.max_tokens;
    body["temperature"] = completion_.temperature;
    return body;
  }

  std::vector<orchestrator::GeneratedIdea> generate(
      const orchestrator::SuggestionTask& task, stats::SeededRng&) const override {
    std::vector<orchestrator::GeneratedIdea> out;
    const nlohmann::json body = nlohmann::json::parse(request_body(task).dump());
    for (std::uint32_t i = 0; i < task.num_ideas; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = detail::post_json(ep_, "/complete", body, opts_);
      const auto t1 = std::chrono::steady_clock::now();
      auto it = res.find("text");
      if (it == res.end() || !it->is_string()) {
        throw Error(ErrorKind::ProviderFailure, "completion response lacks 'text'");
      }
      out.push_back({std::chrono::duration<double>(t1 - t0).count(),
                     it->get<std::string>()});
    }
    return out;
  }

 private:
  Endpoint ep_;
  CompletionOptions completion_;
  HttpOptions opts_;
};

}  // namespace inkflux::remote
