#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polarsim/scale.hpp"

namespace polarsim {

inline constexpr std::string_view kPromptTemplateVersion = "polarsim-prompt/1";
inline constexpr std::string_view kDefaultApiKeyEnv = "POLARSIM_API_KEY";

struct TranscriptLine {
  std::string author;
  std::string content;

  bool operator==(const TranscriptLine&) const = default;
};

// Marks a request as an out-of-band questionnaire probe.
struct ProbeTag {
  std::string item_id;
  std::string phase;

  bool operator==(const ProbeTag&) const = default;
};

struct GenerationRequest {
  std::string agent_name;
  std::string political_standpoint;
  std::string persona;
  std::string demographics;
  std::vector<TranscriptLine> transcript;  // memory order
  std::string trigger;
  std::string instruction;
  std::optional<ProbeTag> probe;

  bool operator==(const GenerationRequest&) const = default;
};

struct ScaleQuery {
  GenerationRequest request;
  std::string question;
  Scale scale;
};

struct ScaleAnswer {
  int value = 0;
  bool clamped = false;
  std::string raw;  // text of the accepted reply
  int attempts = 0;
};

enum class BackendKind { scripted, remote };

std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view text);  // throws ConfigError

struct BackendConfig {
  BackendKind kind = BackendKind::scripted;

  // remote only
  std::string endpoint;
  std::string model_id;
  double temperature = 1.0;
  std::string api_key_env_var = std::string(kDefaultApiKeyEnv);

  int max_retries = 2;
  std::chrono::milliseconds timeout{30'000};
  int max_in_flight = 4;
  std::chrono::milliseconds backoff_initial{250};
  std::chrono::milliseconds backoff_cap{4'000};

  // scripted only: scenario document
  std::filesystem::path scenario_file;

  void validate() const;  // throws ConfigError
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;

  /// Returns non-empty text or throws BackendFailure.
  virtual std::string generate(const GenerationRequest& request) = 0;

  virtual int max_retries() const = 0;
};

/// Renders a request into the single prompt string sent to a model. Sections
/// come in a fixed order: persona, demographics, political standpoint,
/// trigger, transcript ("author: content" lines, SYSTEM entries omitted since
/// the trigger has its own section) and instruction.
std::string assemble_prompt(const GenerationRequest& request);

/// Asks the question through `generate` and parses the reply. A reply with no
/// integer is retried up to backend.max_retries() times before
/// UnparsableAnswer. The result is always inside the scale.
ScaleAnswer answer_scale(GenerationBackend& backend, const ScaleQuery& query, std::string_view item_id = {});

/// Backoff before retry number `attempt` (1-based): initial * 2^(attempt-1), capped.
std::chrono::milliseconds retry_delay(const BackendConfig& config, int attempt);

}  // namespace polarsim
