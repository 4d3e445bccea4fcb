#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polarsim/backend.hpp"

namespace polarsim {

/// Deterministic backend for tests and offline runs. Identical call
/// sequences always yield identical outputs.
class ScriptedBackend : public GenerationBackend {
 public:
  using ReplyFn = std::function<std::string(const GenerationRequest&)>;

  explicit ScriptedBackend(ReplyFn reply, int max_retries = 2);

  /// Pops replies in order; BackendFailure once the queue is empty.
  static std::unique_ptr<ScriptedBackend> from_queue(std::vector<std::string> replies, int max_retries = 2);

  /// Replies keyed by the author label of the last transcript line.
  static std::unique_ptr<ScriptedBackend> from_rules(std::map<std::string, std::string> by_last_author,
                                                     std::optional<std::string> fallback = std::nullopt,
                                                     int max_retries = 2);

  std::string generate(const GenerationRequest& request) override;
  int max_retries() const override { return max_retries_; }

  std::size_t calls() const;
  const std::vector<GenerationRequest>& requests() const { return requests_; }

 private:
  ReplyFn reply_;
  int max_retries_;
  mutable std::mutex mutex_;
  std::size_t calls_ = 0;
  std::vector<GenerationRequest> requests_;
};

/// Scripted scenario document (JSON). Layout:
///
///   {
///     "max_retries": 2,
///     "replies": { "<selector>": ["turn 0 text", "turn 1 text", ...] },
///     "answers": { "<selector>": { "pre": {"<item>": "7"}, "post": {"<item>": ["??", "8"]} } },
///     "runs": { "<run index>": { "replies": {...}, "answers": {...} } }
///   }
///
/// A selector is an agent id, "standpoint:<text>" (case-insensitive substring
/// of the political standpoint) or "*"; that is also the lookup priority, and
/// a "runs" entry for the current run wins over the top level. Reply lists
/// are indexed by how many messages the agent already wrote in the
/// conversation and repeat their last entry when exhausted. An answer list is
/// consumed one entry per attempt, so retries can be scripted. Placeholders
/// {agent}, {turn}, {run} and {last_author} are substituted in replies.
class ScriptedScenario {
 public:
  static ScriptedScenario load(const std::filesystem::path& path);
  static ScriptedScenario from_json(const nlohmann::json& doc);

  /// A fresh backend for one run; its answer cursors start at zero.
  std::unique_ptr<ScriptedBackend> make_backend(std::uint64_t run_index) const;

  int max_retries() const { return max_retries_; }

 private:
  nlohmann::json doc_;
  int max_retries_ = 2;
};

}  // namespace polarsim
