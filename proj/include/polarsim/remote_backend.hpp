#pragma once

#include <atomic>
#include <cstddef>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "polarsim/backend.hpp"

namespace polarsim {

// scheme://host[:port] plus request path.
struct Endpoint {
  std::string origin;
  std::string path;
};

Endpoint parse_endpoint(std::string_view url);  // throws ConfigError

/// Chat-completion client. The request body is a single user message:
///   {"model": ..., "temperature": ..., "messages": [{"role": "user", "content": <prompt>}]}
/// and the completion is read from choices[0].message.content.
///
/// Transport errors, 408/429/5xx responses, malformed bodies and blank
/// completions are retried max_retries times with exponential backoff.
/// Other 4xx responses fail at once. Concurrent callers are admitted up to
/// max_in_flight at a time.
class RemoteBackend : public GenerationBackend {
 public:
  /// Reads the API key from the environment variable named in the config.
  /// Throws ConfigError when it is unset or empty.
  explicit RemoteBackend(BackendConfig config);

  std::string generate(const GenerationRequest& request) override;
  int max_retries() const override { return config_.max_retries; }

  std::size_t attempts() const { return attempts_.load(); }

  static nlohmann::json request_body(std::string_view model, double temperature, std::string_view prompt);
  static std::optional<std::string> extract_completion(const nlohmann::json& body);
  static std::string api_key_from_env(std::string_view variable);

 private:
  BackendConfig config_;
  Endpoint endpoint_;
  std::string api_key_;
  std::counting_semaphore<> gate_;
  std::atomic<std::size_t> attempts_{0};
};

}  // namespace polarsim
