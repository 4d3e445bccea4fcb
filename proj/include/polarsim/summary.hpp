#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polarsim/experiment.hpp"
#include "polarsim/metrics.hpp"
#include "polarsim/rational.hpp"

namespace polarsim {

inline constexpr std::string_view kUnaffiliated = "unaffiliated";

/// The single group of the universe named in a political standpoint
/// (case-insensitive substring). Standpoints naming none or several groups
/// are "unaffiliated".
std::string party_label(std::string_view standpoint, std::span<const GroupId> groups);

// Per (party, target group, kind) aggregate of post - pre deltas.
struct DeltaRow {
  std::string party;
  GroupId target;
  AffectKind kind = AffectKind::warmth;
  bool out_group = false;  // party is a group and the target is another one
  DeltaAggregate aggregate;

  bool operator==(const DeltaRow&) const = default;
};

struct AgentDelta {
  std::string run_id;
  AgentId agent;
  std::string party;
  GroupId target;
  AffectKind kind = AffectKind::warmth;
  int pre = 0;
  int post = 0;
  int delta = 0;

  bool operator==(const AgentDelta&) const = default;
};

struct DegreeChange {
  std::string run_id;
  AgentId agent;
  std::string party;
  AgentType type_pre = AgentType::non_partisan;
  AgentType type_post = AgentType::non_partisan;
  std::optional<int> pre;
  std::optional<int> post;
  std::optional<int> delta;  // both degrees defined

  bool operator==(const DegreeChange&) const = default;
};

struct WordStats {
  std::size_t messages = 0;
  std::size_t runs = 0;
  std::size_t total_words = 0;
  std::size_t over_limit = 0;
  Rational median_words_per_message;
  Rational median_words_per_run;

  bool operator==(const WordStats&) const = default;
};

struct StudySummary {
  std::vector<GroupId> groups;
  std::size_t completed = 0;
  std::size_t aborted = 0;
  std::size_t clamped_answers = 0;
  std::vector<DeltaRow> deltas;
  std::vector<AgentDelta> agent_deltas;
  std::vector<DegreeChange> degree_changes;
  WordStats words;
  std::optional<AdoptionShares> focal_adoption;
  std::size_t focal_excluded = 0;  // focal agents that were not non-partisan before

  bool operator==(const StudySummary&) const = default;
};

/// Aggregates completed runs; aborted runs are only counted. Throws
/// EmptySample when no run completed.
StudySummary summarize(std::span<const RunRecord> records);

}  // namespace polarsim
