#include <gtest/gtest.h>

#include <random>

#include "polarsim/backend.hpp"
#include "polarsim/errors.hpp"
#include "polarsim/protocol.hpp"
#include "polarsim/scripted_backend.hpp"
#include "support.hpp"

using namespace polarsim;
using polarsim::testing::make_agent;

namespace {

const ConversationId kConv1{"conv1"};
const ConversationId kConv2{"conv2"};

Message msg(const ConversationId& conv, const std::string& author, const std::string& content, std::size_t index = 0) {
  return Message{conv, Author(AgentId(author)), content, index, word_count(content), false};
}

void expect_dense(const Agent& agent) {
  for (const auto& conv : agent.memory().conversations()) {
    const auto entries = agent.memory().entries(conv);
    for (std::size_t i = 0; i < entries.size(); ++i) EXPECT_EQ(entries[i].turn_index, i) << conv;
  }
}

}  // namespace

TEST(AgentRecord, FirstEntryGetsIndexZero) {
  Agent a = make_agent("A");
  a.record(kConv1, Author::system(), "trigger");
  const auto entries = a.memory().entries(kConv1);
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_TRUE(entries[0].author.is_system());
  EXPECT_EQ(entries[0].content, "trigger");
  EXPECT_EQ(entries[0].turn_index, 0u);
}

TEST(AgentRecord, SuccessiveRecordsKeepOrder) {
  Agent a = make_agent("A");
  a.record(kConv1, Author::system(), "first");
  a.record(kConv1, AgentId("B"), "second");
  const auto entries = a.memory().entries(kConv1);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].content, "first");
  EXPECT_EQ(entries[1].content, "second");
  EXPECT_EQ(entries[1].turn_index, 1u);
}

TEST(AgentRecord, ConversationsAreIndexedSeparately) {
  Agent a = make_agent("A");
  a.record(kConv1, Author::system(), "x");
  a.record(kConv1, Author::system(), "y");
  a.record(kConv2, Author::system(), "z");
  EXPECT_EQ(a.memory().size(kConv1), 2u);
  ASSERT_EQ(a.memory().size(kConv2), 1u);
  EXPECT_EQ(a.memory().entries(kConv2)[0].turn_index, 0u);
  EXPECT_EQ(a.memory().entries(kConv1)[1].content, "y");
}

TEST(AgentRecord, UnknownConversationIsEmpty) {
  Agent a = make_agent("A");
  EXPECT_EQ(a.memory().size(kConv1), 0u);
  EXPECT_TRUE(a.memory().conversations().empty());
}

TEST(AgentConstruction, RejectsInvalidProfiles) {
  EXPECT_THROW(Agent(AgentId(""), PersonaProfile{"p", "d", "s", false}), std::invalid_argument);
  EXPECT_THROW(Agent(AgentId("SYSTEM"), PersonaProfile{"p", "d", "s", false}), std::invalid_argument);
  EXPECT_THROW(Agent(AgentId("a"), PersonaProfile{"", "d", "s", false}), std::invalid_argument);
  EXPECT_THROW(Agent(AgentId("a"), PersonaProfile{"p", "d", "", false}), std::invalid_argument);
  EXPECT_NO_THROW(Agent(AgentId("a"), PersonaProfile{"p", "", "s", false}));
}

TEST(AgentConstruction, ProfileIsStoredVerbatim) {
  PersonaProfile profile{"  You are a  teacher.\n", "age:\t30 ", " Republican ", false};
  Agent a(AgentId("a"), profile);
  EXPECT_EQ(a.profile(), profile);
}

TEST(AgentRespond, RecordsIncomingThenReply) {
  Agent a = make_agent("A");
  auto backend = ScriptedBackend::from_queue({"ok"});
  const Message reply = a.respond(kConv1, msg(kConv1, "B", "hello"), *backend);
  EXPECT_EQ(reply.content, "ok");
  EXPECT_EQ(reply.author.agent(), AgentId("A"));
  const auto entries = a.memory().entries(kConv1);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].author.agent(), AgentId("B"));
  EXPECT_EQ(entries[0].content, "hello");
  EXPECT_EQ(entries[1].author.agent(), AgentId("A"));
  EXPECT_EQ(entries[1].content, "ok");
}

TEST(AgentRespond, ObserverCannotRespond) {
  Agent c = make_agent("C", "Non-partisan", true);
  auto backend = ScriptedBackend::from_queue({"ok"});
  EXPECT_THROW(c.respond(kConv1, msg(kConv1, "B", "hello"), *backend), ObserverCannotRespond);
  EXPECT_EQ(backend->calls(), 0u);
}

TEST(AgentRespond, IncomingSurvivesBackendFailure) {
  Agent a = make_agent("A");
  ScriptedBackend failing([](const GenerationRequest&) -> std::string { throw BackendFailure("down"); });
  EXPECT_THROW(a.respond(kConv1, msg(kConv1, "B", "hello"), failing), BackendFailure);
  ASSERT_EQ(a.memory().size(kConv1), 1u);
  EXPECT_EQ(a.memory().entries(kConv1)[0].content, "hello");
}

TEST(AgentRespond, BlankReplyIsAFailure) {
  Agent a = make_agent("A");
  auto backend = ScriptedBackend::from_queue({"   "});
  EXPECT_THROW(a.respond(kConv1, msg(kConv1, "B", "hello"), *backend), EmptyCompletion);
  EXPECT_EQ(a.memory().size(kConv1), 1u);
}

TEST(AgentObserve, ObserverCollectsMessages) {
  Agent c = make_agent("C", "Non-partisan", true);
  for (int i = 0; i < 3; ++i) c.observe(kConv1, msg(kConv1, "A", "m" + std::to_string(i), i));
  const auto entries = c.memory().entries(kConv1);
  ASSERT_EQ(entries.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(entries[i].turn_index, i);
}

TEST(AgentObserve, NeverCallsBackend) {
  Agent a = make_agent("A");
  auto backend = ScriptedBackend::from_queue({});
  a.observe(kConv1, msg(kConv1, "B", "hi"));
  EXPECT_EQ(backend->calls(), 0u);
  EXPECT_EQ(a.memory().size(kConv1), 1u);
}

TEST(AgentProperties, MemoryStaysDenseUnderRandomOperations) {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 50; ++trial) {
    Agent a = make_agent("A");
    ScriptedBackend backend([&](const GenerationRequest&) { return std::string("reply"); });
    const ConversationId convs[] = {kConv1, kConv2, ConversationId("conv3")};
    for (int step = 0; step < 40; ++step) {
      const auto& conv = convs[rng() % 3];
      const std::size_t before = a.memory().size(conv);
      switch (rng() % 4) {
        case 0:
          a.record(conv, Author::system(), "sys");
          EXPECT_EQ(a.memory().size(conv), before + 1);
          break;
        case 1:
          a.observe(conv, msg(conv, "B", "seen"));
          EXPECT_EQ(a.memory().size(conv), before + 1);
          break;
        case 2:
          a.respond(conv, msg(conv, "B", "question"), backend);
          EXPECT_EQ(a.memory().size(conv), before + 2);
          break;
        default:
          a.continue_turn(conv, backend);
          EXPECT_EQ(a.memory().size(conv), before + 1);
          break;
      }
      expect_dense(a);
    }
  }
}

TEST(AgentProperties, GenerationContextHoldsOnlyOwnProfileAndMemory) {
  std::vector<Agent> agents;
  for (const char* id : {"alpha", "bravo", "charlie"}) {
    const std::string tag = std::string(id) + "_secret";
    agents.emplace_back(AgentId(id), PersonaProfile{"persona " + tag + "_p", "demo " + tag + "_d",
                                                    "stand " + tag + "_s", std::string(id) == "charlie"});
  }
  std::vector<GenerationRequest> seen;
  ScriptedBackend backend([&](const GenerationRequest& r) {
    seen.push_back(r);
    return "message from " + r.agent_name;
  });
  const auto trigger = DiscussionTrigger::make("topic", "context");
  ConversationSettings settings{ConversationId("c"), TurnBudget::rounds(3), {}, 0, 0};
  run_conversation(agents, trigger, settings, backend);

  ASSERT_EQ(seen.size(), 6u);
  for (const auto& request : seen) {
    const std::string prompt = assemble_prompt(request);
    for (const auto& other : agents) {
      if (other.id().str() == request.agent_name) {
        EXPECT_NE(prompt.find(other.profile().persona_description), std::string::npos);
        continue;
      }
      EXPECT_EQ(prompt.find(other.profile().persona_description), std::string::npos);
      EXPECT_EQ(prompt.find(other.profile().demographics), std::string::npos);
      EXPECT_EQ(prompt.find(other.profile().political_standpoint), std::string::npos);
    }
  }
}

TEST(AgentBuildRequest, TranscriptMirrorsMemory) {
  Agent a = make_agent("A");
  a.record(kConv1, Author::system(), "the trigger");
  a.record(kConv1, AgentId("B"), "one");
  a.record(kConv1, AgentId("A"), "two");
  const GenerationRequest r = a.build_request(kConv1, "go");
  EXPECT_EQ(r.trigger, "the trigger");
  ASSERT_EQ(r.transcript.size(), 3u);
  EXPECT_EQ(r.transcript[0].author, "SYSTEM");
  EXPECT_EQ(r.transcript[1], (TranscriptLine{"B", "one"}));
  EXPECT_EQ(r.transcript[2], (TranscriptLine{"A", "two"}));
  EXPECT_EQ(r.agent_name, "A");
  EXPECT_EQ(r.instruction, "go");
}
