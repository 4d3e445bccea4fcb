#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "polarsim/affect.hpp"
#include "polarsim/agent.hpp"
#include "polarsim/backend.hpp"
#include "polarsim/metrics.hpp"
#include "polarsim/protocol.hpp"

namespace polarsim {

/// How the agent pool is split into per-run agent sets.
struct Pairing {
  enum class Kind { all, groups, draw };
  Kind kind = Kind::all;
  std::vector<std::vector<AgentId>> groups;  // groups: run i uses groups[i % size]
  std::size_t draw_size = 0;                 // draw: seeded sample without replacement

  bool operator==(const Pairing&) const = default;
};

enum class ClockKind { logical, system };

struct ExperimentSpec {
  std::string name;
  std::filesystem::path agents_file;
  std::vector<GroupId> group_universe;
  DiscussionTrigger trigger;
  std::size_t runs = 1;
  TurnBudget budget;
  std::size_t word_limit = 50;
  TurnOrderPolicy order_policy;  // randomized orders are seeded from master_seed
  Questionnaire pre_questionnaire;
  Questionnaire post_questionnaire;
  BackendConfig backend;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir;
  Pairing pairing;
  MetricThresholds thresholds;
  std::vector<AgentId> focal_agents;  // empty: the observers of each run
  std::size_t workers = 1;
  ClockKind clock = ClockKind::logical;

  void validate() const;  // throws ConfigError
};

/// Parses an experiment spec document. Relative file references resolve
/// against `base_dir`. The trigger's instructions get the word limit appended.
ExperimentSpec parse_experiment_spec(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

/// Per-run seed: element run_index of the SplitMix64 stream of master_seed.
std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index);

std::string run_id_for(std::uint64_t run_index);

/// Fresh copies (empty memories) of the agents taking part in one run, in pool order.
std::vector<Agent> select_run_agents(std::span<const Agent> pool, const Pairing& pairing, std::uint64_t run_index,
                                     std::uint64_t run_seed);

enum class RunStatus { completed, aborted };

std::string_view to_string(RunStatus status);

struct AgentSnapshot {
  AgentId id;
  PersonaProfile profile;

  bool operator==(const AgentSnapshot&) const = default;
};

struct RunRecord {
  std::string experiment;
  std::string run_id;
  std::uint64_t run_index = 0;
  std::uint64_t seed = 0;
  std::uint64_t master_seed = 0;
  std::vector<AgentSnapshot> agents;  // run order
  std::vector<GroupId> groups;
  std::vector<AgentId> focal;
  MetricThresholds thresholds;
  std::size_t word_limit = 0;

  Conversation conversation;

  std::map<AgentId, std::vector<AnswerRecord>> pre_answers;
  std::map<AgentId, std::vector<AnswerRecord>> post_answers;
  std::map<AgentId, AffectiveState> pre_states;
  std::map<AgentId, AffectiveState> post_states;  // completed runs only
  std::map<AgentId, PolarizationAssessment> assessments_pre;
  std::map<AgentId, PolarizationAssessment> assessments_post;

  RunStatus status = RunStatus::aborted;
  std::string error;

  std::vector<std::size_t> word_counts() const;
  std::vector<AgentId> agent_ids() const;

  bool operator==(const RunRecord&) const = default;
};

/// Builds a backend for one run. Scripted backends are created per run;
/// a remote backend is a single shared instance.
using BackendFactory = std::function<std::shared_ptr<GenerationBackend>(std::uint64_t run_index, std::uint64_t seed)>;

/// Throws ConfigError for a missing scenario file or API key.
BackendFactory make_backend_factory(const BackendConfig& config);

struct RunOptions {
  BackendFactory backend_factory;                         // default: from spec.backend
  std::size_t workers = 0;                                // 0: spec.workers
  std::function<void(const RunRecord&)> on_run_finished;  // called from worker threads, serialized
};

/// Executes (or resumes) every run. A run whose log already holds a
/// completed record is loaded instead of re-executed; anything else is run
/// from scratch. Failures inside a run abort that run only. Throws
/// ConfigError before any run when the spec or agent file is unusable.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

/// Seeded categorical draw. Throws InvalidDistribution for negative weights,
/// a non-positive total or an empty list.
std::string sample_demographics(std::span<const std::pair<std::string, double>> distribution, std::uint64_t seed);

}  // namespace polarsim
