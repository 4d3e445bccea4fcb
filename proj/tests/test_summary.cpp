#include <gtest/gtest.h>

#include <numeric>

#include "polarsim/errors.hpp"
#include "polarsim/summary.hpp"
#include "support.hpp"

using namespace polarsim;
using namespace polarsim::testing;

namespace {

const std::vector<GroupId> kGroups{kR, kD};

struct Participant {
  std::string id;
  std::string standpoint;
  std::map<AffectKey, int> pre;
  std::map<AffectKey, int> post;
  bool observer = false;
};

std::string words(std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += (i ? " w" : "w");
  return out;
}

RunRecord make_record(std::uint64_t index, const std::vector<Participant>& people,
                      const std::vector<std::size_t>& message_words = {}) {
  RunRecord r;
  r.experiment = "synthetic";
  r.run_id = run_id_for(index);
  r.run_index = index;
  r.groups = kGroups;
  r.status = RunStatus::completed;
  r.conversation.id = ConversationId("synthetic/" + r.run_id);
  for (const auto& p : people) {
    const AgentId id(p.id);
    r.agents.push_back({id, PersonaProfile{"persona", "", p.standpoint, p.observer}});
    if (p.observer) r.focal.push_back(id);
    r.pre_states[id] = AffectiveState{Phase::pre, p.pre};
    r.post_states[id] = AffectiveState{Phase::post, p.post};
    for (auto [states, target] : {std::pair{&r.pre_states, &r.assessments_pre}, {&r.post_states, &r.assessments_post}})
      if (auto s = group_scores_from(states->at(id), kGroups)) (*target)[id] = assess(*s);
  }
  for (std::size_t k = 0; k < message_words.size(); ++k) {
    const std::string text = words(message_words[k]);
    r.conversation.transcript.push_back(
        Message{r.conversation.id, Author(AgentId(people[k % people.size()].id)), text, k, word_count(text), false});
  }
  return r;
}

std::map<AffectKey, int> warmth(int toward_r, int toward_d) {
  return {{{kR, AffectKind::warmth}, toward_r}, {{kD, AffectKind::warmth}, toward_d}};
}

std::map<AffectKey, int> love_hate(int love_r, int hate_r, int love_d, int hate_d) {
  return {{{kR, AffectKind::love}, love_r},
          {{kR, AffectKind::hate}, hate_r},
          {{kD, AffectKind::love}, love_d},
          {{kD, AffectKind::hate}, hate_d}};
}

const DeltaRow& row(const StudySummary& s, const std::string& party, const GroupId& target, AffectKind kind) {
  for (const auto& r : s.deltas)
    if (r.party == party && r.target == target && r.kind == kind) return r;
  throw std::runtime_error("no row for " + party);
}

}  // namespace

TEST(PartyLabel, SingleGroupNameMatches) {
  EXPECT_EQ(party_label("Republican", kGroups), "Republican");
  EXPECT_EQ(party_label("strong democrat", kGroups), "Democrat");
  EXPECT_EQ(party_label("Non-partisan", kGroups), "unaffiliated");
  EXPECT_EQ(party_label("Democrat who dislikes Republicans", kGroups), "unaffiliated");
}

TEST(Summarize, EngineeredWarmthDeltas) {
  std::vector<int> d_deltas(20, 0);
  d_deltas.insert(d_deltas.end(), 10, 3);
  d_deltas.insert(d_deltas.end(), 9, 5);
  d_deltas.insert(d_deltas.end(), 31, 10);
  d_deltas.insert(d_deltas.end(), 7, 15);
  ASSERT_EQ(d_deltas.size(), 77u);
  std::vector<RunRecord> records;
  for (std::size_t i = 0; i < 77; ++i)
    records.push_back(make_record(i, {{"r" + std::to_string(i), "Republican", warmth(85, 30), warmth(85, 30)},
                                      {"d" + std::to_string(i), "Democrat", warmth(30, 85),
                                       warmth(30 + d_deltas[i], 85)}}));
  const auto s = summarize(records);
  const auto& d_to_r = row(s, "Democrat", kR, AffectKind::warmth);
  EXPECT_TRUE(d_to_r.out_group);
  EXPECT_EQ(d_to_r.aggregate.n, 77u);
  EXPECT_EQ(d_to_r.aggregate.median, Rational(5));
  EXPECT_EQ(d_to_r.aggregate.mean, Rational(490, 77));
  EXPECT_NEAR(d_to_r.aggregate.mean.to_double(), 6.36, 0.005);
  EXPECT_FALSE(row(s, "Democrat", kD, AffectKind::warmth).out_group);
  EXPECT_EQ(row(s, "Republican", kD, AffectKind::warmth).aggregate.mean, Rational(0));
}

TEST(Summarize, WordStatistics) {
  std::vector<RunRecord> records;
  for (std::uint64_t i = 0; i < 3; ++i)
    records.push_back(make_record(i, {{"a", "Republican", warmth(1, 1), warmth(1, 1)},
                                      {"b", "Democrat", warmth(1, 1), warmth(1, 1)}},
                                  std::vector<std::size_t>(9, 29)));
  const auto s = summarize(records);
  EXPECT_EQ(s.words.messages, 27u);
  EXPECT_EQ(s.words.median_words_per_message, Rational(29));
  EXPECT_EQ(s.words.median_words_per_run, Rational(261));
  EXPECT_EQ(s.words.total_words, 3u * 261u);
}

TEST(Summarize, AbortedRunsAreOnlyCounted) {
  std::vector<RunRecord> records{make_record(0, {{"a", "Republican", warmth(10, 10), warmth(20, 10)}}),
                                 make_record(1, {{"a", "Republican", warmth(10, 10), warmth(90, 10)}})};
  records[1].status = RunStatus::aborted;
  const auto s = summarize(records);
  EXPECT_EQ(s.completed, 1u);
  EXPECT_EQ(s.aborted, 1u);
  EXPECT_EQ(row(s, "Republican", kR, AffectKind::warmth).aggregate.mean, Rational(10));
}

TEST(Summarize, AllAbortedIsEmpty) {
  std::vector<RunRecord> records{make_record(0, {{"a", "Republican", warmth(1, 1), warmth(1, 1)}})};
  records[0].status = RunStatus::aborted;
  EXPECT_THROW(summarize(records), EmptySample);
  EXPECT_THROW(summarize({}), EmptySample);
}

TEST(Summarize, DegreeChangesAndAdoption) {
  std::vector<RunRecord> records;
  records.push_back(make_record(0, {{"m1", "Republican, moderate", love_hate(7, 2, 3, 6), love_hate(8, 1, 2, 7)},
                                    {"m3", "Republican, moderate", love_hate(7, 2, 3, 4), love_hate(7, 2, 3, 4)},
                                    {"obs", "Non-partisan", love_hate(5, 5, 5, 5), love_hate(7, 2, 3, 7), true},
                                    {"pobs", "Non-partisan", love_hate(8, 1, 2, 7), love_hate(8, 1, 2, 7), true}}));
  const auto s = summarize(records);
  ASSERT_EQ(s.degree_changes.size(), 4u);
  EXPECT_EQ(s.degree_changes[0].delta, 2);
  EXPECT_EQ(s.degree_changes[1].delta, 0);
  EXPECT_EQ(s.degree_changes[2].pre, std::nullopt);
  EXPECT_EQ(s.degree_changes[2].delta, std::nullopt);
  EXPECT_EQ(s.degree_changes[2].type_post, AgentType::partisan);
  ASSERT_TRUE(s.focal_adoption.has_value());
  EXPECT_EQ(s.focal_adoption->n, 1u);
  EXPECT_EQ(s.focal_adoption->in_group_share.at(kR), Rational(1));
  EXPECT_EQ(s.focal_excluded, 1u);
}

TEST(Summarize, CountsClampedAnswers) {
  auto record = make_record(0, {{"a", "Republican", warmth(1, 1), warmth(1, 1)}});
  record.pre_answers[AgentId("a")] = {AnswerRecord{"w", kR, AffectKind::warmth, Scale::thermometer(), "150", 100, true, 1},
                                     AnswerRecord{"w2", kD, AffectKind::warmth, Scale::thermometer(), "5", 5, false, 1}};
  record.post_answers[AgentId("a")] = {AnswerRecord{"w", kR, AffectKind::warmth, Scale::thermometer(), "-2", 0, true, 2}};
  EXPECT_EQ(summarize(std::vector<RunRecord>{record}).clamped_answers, 2u);
}

TEST(Summarize, InputOrderDoesNotMatterForAggregates) {
  std::vector<RunRecord> records;
  for (std::uint64_t i = 0; i < 9; ++i)
    records.push_back(make_record(i, {{"d", "Democrat", warmth(20, 80), warmth(20 + static_cast<int>(i * 3 % 7), 80)}}));
  const auto forward = summarize(records).deltas;
  std::reverse(records.begin(), records.end());
  EXPECT_EQ(summarize(records).deltas, forward);
}
