#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "polarsim/affect.hpp"
#include "polarsim/ids.hpp"
#include "polarsim/rational.hpp"

namespace polarsim {

/// Love and hate (0-10) toward every group of a universe with at least two
/// groups.
struct GroupScores {
  std::map<GroupId, int> love;
  std::map<GroupId, int> hate;

  void validate() const;  // throws std::invalid_argument

  bool operator==(const GroupScores&) const = default;
};

/// Love/hate scores for `groups` taken from a measured state; nullopt when
/// the state lacks a love or hate score for one of them.
std::optional<GroupScores> group_scores_from(const AffectiveState& state, std::span<const GroupId> groups);

struct MetricThresholds {
  int in_group_min_love = 5;
  int polarized_hate_threshold = 5;  // strict: hate must exceed it
  int extremist_cutoff = 9;

  void validate() const;  // throws ConfigError

  bool operator==(const MetricThresholds&) const = default;
};

enum class AgentType { non_partisan, partisan, extremist };

std::string_view to_string(AgentType type);
AgentType parse_agent_type(std::string_view text);

struct PolarizationAssessment {
  std::optional<GroupId> in_group;
  std::optional<GroupId> out_group;
  bool polarized = false;
  std::optional<int> degree;
  AgentType agent_type = AgentType::non_partisan;

  bool operator==(const PolarizationAssessment&) const = default;
};

/// The group whose love reaches in_group_min_love and is strictly higher
/// than the love for every other group. Ties at the top give no in-group.
std::optional<GroupId> classify_in_group(const GroupScores& scores, const MetricThresholds& thresholds = {});

/// Among the other groups with love below in_group_min_love: lowest love,
/// then highest hate, then smallest id. None without an in-group.
std::optional<GroupId> classify_out_group(const GroupScores& scores, const std::optional<GroupId>& in_group,
                                          const MetricThresholds& thresholds = {});

bool is_polarized(const GroupScores& scores, const MetricThresholds& thresholds = {});

/// love(in) + hate(out); undefined (not zero) when either group is missing.
std::optional<int> polarization_degree(const GroupScores& scores, const MetricThresholds& thresholds = {});

AgentType agent_type(const GroupScores& scores, const MetricThresholds& thresholds = {});

PolarizationAssessment assess(const GroupScores& scores, const MetricThresholds& thresholds = {});

struct DeltaAggregate {
  Rational median;
  Rational mean;
  std::size_t n = 0;

  bool operator==(const DeltaAggregate&) const = default;
};

/// Exact median (midpoint of the two middle values for even n) and mean.
/// Throws EmptySample.
DeltaAggregate aggregate_deltas(std::span<const int> deltas);

struct AdoptionShares {
  std::size_t n = 0;
  std::map<GroupId, Rational> in_group_share;  // every group of the universe
  Rational polarized_share;

  bool operator==(const AdoptionShares&) const = default;
};

/// Post-conversation in-group adoption and polarization among agents that
/// were non-partisan beforehand. Each pair is (pre, post). Throws EmptySample
/// for no pairs and std::invalid_argument when a pre assessment is partisan.
AdoptionShares adoption_shares(std::span<const std::pair<PolarizationAssessment, PolarizationAssessment>> pre_post,
                               std::span<const GroupId> groups);

}  // namespace polarsim
