#include "polarsim/summary.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <tuple>

#include "polarsim/errors.hpp"

namespace polarsim {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

Rational median_of(std::vector<std::size_t> values) {
  std::vector<int> as_int(values.begin(), values.end());
  return aggregate_deltas(as_int).median;
}

}  // namespace

std::string party_label(std::string_view standpoint, std::span<const GroupId> groups) {
  const std::string haystack = lower(standpoint);
  const GroupId* match = nullptr;
  for (const auto& g : groups) {
    if (haystack.find(lower(g.str())) == std::string::npos) continue;
    if (match) return std::string(kUnaffiliated);
    match = &g;
  }
  return match ? match->str() : std::string(kUnaffiliated);
}

StudySummary summarize(std::span<const RunRecord> records) {
  StudySummary summary;
  std::map<std::tuple<std::string, GroupId, AffectKind>, std::vector<int>> buckets;
  std::vector<std::pair<PolarizationAssessment, PolarizationAssessment>> focal_pairs;
  std::vector<std::size_t> message_words;
  std::vector<std::size_t> run_words;

  for (const RunRecord& record : records) {
    if (record.status != RunStatus::completed) {
      ++summary.aborted;
      continue;
    }
    ++summary.completed;
    if (summary.groups.empty()) summary.groups = record.groups;

    for (const auto& [agent, answers] : record.pre_answers)
      for (const auto& a : answers) summary.clamped_answers += a.clamped ? 1 : 0;
    for (const auto& [agent, answers] : record.post_answers)
      for (const auto& a : answers) summary.clamped_answers += a.clamped ? 1 : 0;

    for (const auto& snapshot : record.agents) {
      const std::string party = party_label(snapshot.profile.political_standpoint, record.groups);
      auto pre = record.pre_states.find(snapshot.id);
      auto post = record.post_states.find(snapshot.id);
      if (pre != record.pre_states.end() && post != record.post_states.end()) {
        for (const auto& [key, change] : delta(pre->second, post->second)) {
          buckets[{party, key.first, key.second}].push_back(change);
          summary.agent_deltas.push_back(AgentDelta{record.run_id, snapshot.id, party, key.first, key.second,
                                                    pre->second.scores.at(key), post->second.scores.at(key), change});
        }
      }

      auto a_pre = record.assessments_pre.find(snapshot.id);
      auto a_post = record.assessments_post.find(snapshot.id);
      if (a_pre == record.assessments_pre.end() || a_post == record.assessments_post.end()) continue;
      DegreeChange change{record.run_id, snapshot.id, party, a_pre->second.agent_type, a_post->second.agent_type,
                          a_pre->second.degree, a_post->second.degree, std::nullopt};
      if (change.pre && change.post) change.delta = *change.post - *change.pre;
      summary.degree_changes.push_back(std::move(change));

      if (std::find(record.focal.begin(), record.focal.end(), snapshot.id) != record.focal.end()) {
        if (a_pre->second.agent_type == AgentType::non_partisan)
          focal_pairs.emplace_back(a_pre->second, a_post->second);
        else
          ++summary.focal_excluded;
      }
    }

    std::size_t words = 0;
    for (const auto& m : record.conversation.transcript) {
      message_words.push_back(m.word_count);
      words += m.word_count;
      summary.words.over_limit += m.over_word_limit ? 1 : 0;
    }
    if (!record.conversation.transcript.empty()) run_words.push_back(words);
    summary.words.total_words += words;
  }

  if (summary.completed == 0) throw EmptySample("no completed runs to summarize");

  for (auto& [key, values] : buckets) {
    const auto& [party, target, kind] = key;
    const bool out_group = party != kUnaffiliated && party != target.str();
    summary.deltas.push_back(DeltaRow{party, target, kind, out_group, aggregate_deltas(values)});
  }

  summary.words.messages = message_words.size();
  summary.words.runs = run_words.size();
  if (!message_words.empty()) summary.words.median_words_per_message = median_of(message_words);
  if (!run_words.empty()) summary.words.median_words_per_run = median_of(run_words);

  if (!focal_pairs.empty()) summary.focal_adoption = adoption_shares(focal_pairs, summary.groups);
  return summary;
}

}  // namespace polarsim
