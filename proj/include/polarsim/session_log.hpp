#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "polarsim/experiment.hpp"

namespace polarsim {

inline constexpr int kSessionSchemaVersion = 1;

/// Session logs are line-delimited JSON, one file per run, one event per line:
/// run_start, questionnaire_answer, assessment, trigger, message, run_end.
/// Every line carries "event", "run_id", "seq" and an ISO-8601 "ts".
std::string run_log_name(const std::string& experiment, const std::string& run_id);

/// Timestamp source. The logical clock counts whole seconds from the epoch,
/// one per event, so scripted runs produce byte-identical logs.
using Clock = std::function<std::string()>;
Clock make_clock(ClockKind kind);

class SessionLogWriter {
 public:
  SessionLogWriter(const std::filesystem::path& path, Clock clock, std::string run_id);

  void write(std::string_view event, const nlohmann::ordered_json& fields);

  void run_start(const RunRecord& record);
  void answer(Phase phase, const AgentId& agent, const AnswerRecord& answer);
  void assessment(Phase phase, const AgentId& agent, const PolarizationAssessment& assessment);
  void trigger(const Conversation& conversation);
  void message(const Message& message);
  void run_end(const RunRecord& record);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  Clock clock_;
  std::string run_id_;
  std::uint64_t seq_ = 0;
};

/// Writes a complete record as one log; same event order as a live run.
std::filesystem::path persist_run(const RunRecord& record, const std::filesystem::path& dir,
                                  ClockKind clock = ClockKind::logical);

/// Rebuilds a record from its log. A log without run_end, or whose final
/// line is cut off, loads as aborted; a broken line elsewhere throws
/// CorruptLine.
RunRecord load_run_file(const std::filesystem::path& path);

/// Every *.log file in `dir`, ordered by experiment and run index.
std::vector<RunRecord> load_runs(const std::filesystem::path& dir);

}  // namespace polarsim
