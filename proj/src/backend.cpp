#include "polarsim/backend.hpp"

#include <algorithm>
#include <sstream>

#include "polarsim/errors.hpp"
#include "polarsim/ids.hpp"

namespace polarsim {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::scripted: return "scripted";
    case BackendKind::remote: return "remote";
  }
  return "unknown";
}

BackendKind parse_backend_kind(std::string_view text) {
  if (text == "scripted") return BackendKind::scripted;
  if (text == "remote") return BackendKind::remote;
  throw ConfigError("unknown backend kind \"" + std::string(text) + "\" (expected scripted or remote)");
}

void BackendConfig::validate() const {
  if (max_retries < 0) throw ConfigError("backend.max_retries must be >= 0");
  if (timeout.count() <= 0) throw ConfigError("backend.timeout must be positive");
  if (max_in_flight < 1) throw ConfigError("backend.max_in_flight must be >= 1");
  if (backoff_initial.count() < 0 || backoff_cap.count() < 0) throw ConfigError("backend backoff must be >= 0");
  if (api_key_env_var.empty()) throw ConfigError("backend.api_key_env must name an environment variable");
  if (kind == BackendKind::remote) {
    if (endpoint.empty()) throw ConfigError("remote backend needs an endpoint");
    if (model_id.empty()) throw ConfigError("remote backend needs a model id");
  }
}

std::string assemble_prompt(const GenerationRequest& request) {
  std::ostringstream out;
  out << "## Persona\n" << request.persona << "\n\n";
  out << "## Demographics\n" << request.demographics << "\n\n";
  out << "## Political standpoint\n" << request.political_standpoint << "\n\n";
  out << "## Discussion\n" << request.trigger << "\n\n";

  bool header = false;
  for (const auto& line : request.transcript) {
    if (line.author == kSystemAuthor) continue;
    if (!header) {
      out << "## Conversation so far\n";
      header = true;
    }
    out << line.author << ": " << line.content << '\n';
  }
  if (header) out << '\n';

  out << "## Instructions\n";
  out << "You are " << request.agent_name << ". " << request.instruction << '\n';
  return out.str();
}

ScaleAnswer answer_scale(GenerationBackend& backend, const ScaleQuery& query, std::string_view item_id) {
  if (!query.scale.valid()) throw std::invalid_argument("scale_min must be below scale_max");

  GenerationRequest request = query.request;
  std::ostringstream instruction;
  instruction << query.question << "\nAnswer with a single whole number from " << query.scale.min << " to "
              << query.scale.max << '.';
  request.instruction = instruction.str();

  const int attempts = std::max(0, backend.max_retries()) + 1;
  std::string last;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    last = backend.generate(request);
    try {
      const ParsedAnswer parsed = parse_scale_answer(last, query.scale);
      return ScaleAnswer{parsed.value, parsed.clamped, last, attempt};
    } catch (const NoIntegerFound&) {
    }
  }
  throw UnparsableAnswer(std::string(item_id), "no usable number after " + std::to_string(attempts) +
                                                   " attempts for item \"" + std::string(item_id) +
                                                   "\"; last reply: \"" + last + "\"");
}

std::chrono::milliseconds retry_delay(const BackendConfig& config, int attempt) {
  auto delay = config.backoff_initial;
  for (int i = 1; i < attempt && delay < config.backoff_cap; ++i) delay *= 2;
  return std::min(delay, config.backoff_cap);
}

}  // namespace polarsim
