#include "polarsim/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "polarsim/errors.hpp"

namespace polarsim {

void GroupScores::validate() const {
  if (love.size() < 2) throw std::invalid_argument("group universe needs at least two groups");
  if (love.size() != hate.size()) throw std::invalid_argument("every group needs both a love and a hate score");
  for (const auto& [group, value] : love) {
    auto h = hate.find(group);
    if (h == hate.end()) throw std::invalid_argument("group " + group.str() + " has no hate score");
    if (value < 0 || value > 10 || h->second < 0 || h->second > 10)
      throw std::invalid_argument("scores for " + group.str() + " must lie in 0-10");
  }
}

std::optional<GroupScores> group_scores_from(const AffectiveState& state, std::span<const GroupId> groups) {
  GroupScores out;
  for (const auto& group : groups) {
    auto love = state.scores.find({group, AffectKind::love});
    auto hate = state.scores.find({group, AffectKind::hate});
    if (love == state.scores.end() || hate == state.scores.end()) return std::nullopt;
    out.love[group] = love->second;
    out.hate[group] = hate->second;
  }
  if (out.love.size() < 2) return std::nullopt;
  return out;
}

void MetricThresholds::validate() const {
  for (int v : {in_group_min_love, polarized_hate_threshold, extremist_cutoff})
    if (v < 0 || v > 10) throw ConfigError("metric thresholds must lie in 0-10");
}

std::string_view to_string(AgentType type) {
  switch (type) {
    case AgentType::non_partisan: return "non_partisan";
    case AgentType::partisan: return "partisan";
    case AgentType::extremist: return "extremist";
  }
  return "unknown";
}

AgentType parse_agent_type(std::string_view text) {
  if (text == "non_partisan") return AgentType::non_partisan;
  if (text == "partisan") return AgentType::partisan;
  if (text == "extremist") return AgentType::extremist;
  throw std::invalid_argument("unknown agent type \"" + std::string(text) + "\"");
}

std::optional<GroupId> classify_in_group(const GroupScores& scores, const MetricThresholds& thresholds) {
  std::optional<GroupId> best;
  int best_love = -1;
  bool tied = false;
  for (const auto& [group, love] : scores.love) {
    if (love > best_love) {
      best = group;
      best_love = love;
      tied = false;
    } else if (love == best_love) {
      tied = true;
    }
  }
  if (!best || tied || best_love < thresholds.in_group_min_love) return std::nullopt;
  return best;
}

std::optional<GroupId> classify_out_group(const GroupScores& scores, const std::optional<GroupId>& in_group,
                                          const MetricThresholds& thresholds) {
  if (!in_group) return std::nullopt;
  std::optional<GroupId> best;
  for (const auto& [group, love] : scores.love) {
    if (group == *in_group || love >= thresholds.in_group_min_love) continue;
    if (!best) {
      best = group;
      continue;
    }
    const int best_love = scores.love.at(*best);
    const int hate = scores.hate.at(group);
    const int best_hate = scores.hate.at(*best);
    // Map iteration is in id order, so an equal candidate never displaces the earlier id.
    if (love < best_love || (love == best_love && hate > best_hate)) best = group;
  }
  return best;
}

bool is_polarized(const GroupScores& scores, const MetricThresholds& thresholds) {
  const auto in = classify_in_group(scores, thresholds);
  const auto out = classify_out_group(scores, in, thresholds);
  return in && out && scores.hate.at(*out) > thresholds.polarized_hate_threshold;
}

std::optional<int> polarization_degree(const GroupScores& scores, const MetricThresholds& thresholds) {
  const auto in = classify_in_group(scores, thresholds);
  const auto out = classify_out_group(scores, in, thresholds);
  if (!in || !out) return std::nullopt;
  return scores.love.at(*in) + scores.hate.at(*out);
}

AgentType agent_type(const GroupScores& scores, const MetricThresholds& thresholds) {
  const auto in = classify_in_group(scores, thresholds);
  if (!in) return AgentType::non_partisan;
  const auto out = classify_out_group(scores, in, thresholds);
  if (out && scores.love.at(*in) >= thresholds.extremist_cutoff && scores.hate.at(*out) >= thresholds.extremist_cutoff)
    return AgentType::extremist;
  return AgentType::partisan;
}

PolarizationAssessment assess(const GroupScores& scores, const MetricThresholds& thresholds) {
  PolarizationAssessment a;
  a.in_group = classify_in_group(scores, thresholds);
  a.out_group = classify_out_group(scores, a.in_group, thresholds);
  a.polarized = is_polarized(scores, thresholds);
  a.degree = polarization_degree(scores, thresholds);
  a.agent_type = agent_type(scores, thresholds);
  return a;
}

DeltaAggregate aggregate_deltas(std::span<const int> deltas) {
  if (deltas.empty()) throw EmptySample("no deltas to aggregate");
  std::vector<std::int64_t> sorted(deltas.begin(), deltas.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const Rational median =
      n % 2 == 1 ? Rational(sorted[n / 2]) : Rational(sorted[n / 2 - 1] + sorted[n / 2], 2);
  const std::int64_t sum = std::accumulate(sorted.begin(), sorted.end(), std::int64_t{0});
  return DeltaAggregate{median, Rational(sum, static_cast<std::int64_t>(n)), n};
}

AdoptionShares adoption_shares(std::span<const std::pair<PolarizationAssessment, PolarizationAssessment>> pre_post,
                               std::span<const GroupId> groups) {
  if (pre_post.empty()) throw EmptySample("no focal agents to compute adoption shares");
  std::map<GroupId, std::int64_t> adopted;
  for (const auto& g : groups) adopted[g] = 0;
  std::int64_t polarized = 0;
  for (const auto& [pre, post] : pre_post) {
    if (pre.agent_type != AgentType::non_partisan)
      throw std::invalid_argument("adoption shares are defined over agents that start non-partisan");
    if (post.in_group) ++adopted[*post.in_group];
    if (post.polarized) ++polarized;
  }
  AdoptionShares out;
  const auto n = static_cast<std::int64_t>(pre_post.size());
  out.n = pre_post.size();
  for (const auto& [g, count] : adopted) out.in_group_share[g] = Rational(count, n);
  out.polarized_share = Rational(polarized, n);
  return out;
}

}  // namespace polarsim
