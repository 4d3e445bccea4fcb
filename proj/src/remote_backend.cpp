#include "polarsim/remote_backend.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "polarsim/errors.hpp"

namespace polarsim {

using nlohmann::json;

Endpoint parse_endpoint(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw ConfigError("endpoint \"" + std::string(url) + "\" has no scheme");
  const std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw ConfigError("endpoint scheme must be http or https, got \"" + std::string(scheme) + "\"");
  const auto host_start = scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  Endpoint out;
  out.origin = std::string(url.substr(0, path_start));
  out.path = path_start == std::string_view::npos ? "/" : std::string(url.substr(path_start));
  if (out.origin.size() == host_start) throw ConfigError("endpoint \"" + std::string(url) + "\" has no host");
  return out;
}

std::string RemoteBackend::api_key_from_env(std::string_view variable) {
  const char* value = std::getenv(std::string(variable).c_str());
  if (value == nullptr || *value == '\0')
    throw ConfigError("environment variable " + std::string(variable) + " is not set; the remote backend needs an API key");
  return value;
}

RemoteBackend::RemoteBackend(BackendConfig config)
    : config_(std::move(config)), gate_(std::max(1, config_.max_in_flight)) {
  config_.validate();
  endpoint_ = parse_endpoint(config_.endpoint);
  api_key_ = api_key_from_env(config_.api_key_env_var);
}

json RemoteBackend::request_body(std::string_view model, double temperature, std::string_view prompt) {
  return json{{"model", model},
              {"temperature", temperature},
              {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})}};
}

std::optional<std::string> RemoteBackend::extract_completion(const json& body) {
  if (!body.is_object()) return std::nullopt;
  auto choices = body.find("choices");
  if (choices == body.end() || !choices->is_array() || choices->empty()) return std::nullopt;
  const json& first = choices->front();
  if (auto message = first.find("message"); message != first.end() && message->is_object()) {
    if (auto content = message->find("content"); content != message->end() && content->is_string())
      return content->get<std::string>();
  }
  if (auto text = first.find("text"); text != first.end() && text->is_string()) return text->get<std::string>();
  return std::nullopt;
}

namespace {

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

bool retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

// Holds one admission slot for the duration of a call.
class Admission {
 public:
  explicit Admission(std::counting_semaphore<>& gate) : gate_(gate) { gate_.acquire(); }
  ~Admission() { gate_.release(); }
  Admission(const Admission&) = delete;
  Admission& operator=(const Admission&) = delete;

 private:
  std::counting_semaphore<>& gate_;
};

}  // namespace

std::string RemoteBackend::generate(const GenerationRequest& request) {
  const std::string body = request_body(config_.model_id, config_.temperature, assemble_prompt(request)).dump();
  const httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};

  std::string last_error;
  bool last_was_blank = false;
  const int attempts = config_.max_retries + 1;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) std::this_thread::sleep_for(retry_delay(config_, attempt - 1));

    Admission slot(gate_);
    ++attempts_;
    httplib::Client client(endpoint_.origin);
    const auto seconds = config_.timeout.count() / 1000;
    const auto micros = (config_.timeout.count() % 1000) * 1000;
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);

    auto result = client.Post(endpoint_.path, headers, body, "application/json");
    last_was_blank = false;
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      last_error = "HTTP " + std::to_string(result->status);
      if (!retryable_status(result->status)) throw BackendFailure(last_error + " from " + config_.endpoint);
      continue;
    }
    const json parsed = json::parse(result->body, nullptr, false);
    auto completion = extract_completion(parsed);
    if (!completion) {
      last_error = "response has no completion text";
      continue;
    }
    if (blank(*completion)) {
      last_error = "blank completion";
      last_was_blank = true;
      continue;
    }
    return *completion;
  }
  const std::string what = "remote backend gave up after " + std::to_string(attempts) + " attempts: " + last_error;
  if (last_was_blank) throw EmptyCompletion(what);
  throw BackendFailure(what);
}

}  // namespace polarsim
