#include "polarsim/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>

#include "polarsim/errors.hpp"
#include "polarsim/seeding.hpp"

namespace polarsim {

DiscussionTrigger DiscussionTrigger::make(std::string topic, std::string context, std::string instructions) {
  if (topic.empty()) throw std::invalid_argument("discussion topic must not be empty");
  DiscussionTrigger t;
  t.rendered = "Topic: " + topic + "\n\nContext: " + context;
  if (!instructions.empty()) t.rendered += "\n\n" + instructions;
  t.topic = std::move(topic);
  t.context = std::move(context);
  t.instructions = std::move(instructions);
  return t;
}

std::string_view to_string(OrderKind kind) {
  switch (kind) {
    case OrderKind::fixed: return "fixed";
    case OrderKind::alternate_starter: return "alternate_starter";
    case OrderKind::randomized: return "randomized";
  }
  return "unknown";
}

OrderKind parse_order_kind(std::string_view text) {
  if (text == "fixed") return OrderKind::fixed;
  if (text == "alternate_starter") return OrderKind::alternate_starter;
  if (text == "randomized") return OrderKind::randomized;
  throw ConfigError("unknown order policy \"" + std::string(text) + "\"");
}

std::vector<AgentId> derive_order(std::span<const AgentId> participants, const TurnOrderPolicy& policy,
                                  std::uint64_t run_index) {
  if (participants.empty()) throw std::invalid_argument("derive_order needs at least one participant");
  std::vector<AgentId> order(participants.begin(), participants.end());
  switch (policy.kind) {
    case OrderKind::fixed:
      break;
    case OrderKind::alternate_starter:
      if (run_index % 2 == 1) std::rotate(order.begin(), order.begin() + 1, order.end());
      break;
    case OrderKind::randomized:
      seeded_shuffle(order, mix_seed(policy.seed, run_index));
      break;
  }
  return order;
}

std::size_t word_count(std::string_view content) {
  std::size_t count = 0;
  bool in_word = false;
  for (const char c : content) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

Conversation run_conversation(std::span<Agent> agents, const DiscussionTrigger& trigger,
                              const ConversationSettings& settings, GenerationBackend& backend,
                              const ConversationListener& listener) {
  std::map<AgentId, Agent*> by_id;
  std::vector<AgentId> participants;
  for (Agent& agent : agents) {
    if (!by_id.emplace(agent.id(), &agent).second)
      throw std::invalid_argument("duplicate agent id " + agent.id().str());
    if (!agent.is_observer()) participants.push_back(agent.id());
  }
  if (participants.empty()) throw NoParticipants("conversation " + settings.id.str() + " has no participating agents");
  if (settings.budget.value == 0) throw std::invalid_argument("turn budget must be positive");

  Conversation conversation;
  conversation.id = settings.id;
  conversation.trigger = trigger;
  conversation.order = derive_order(participants, settings.policy, settings.run_index);
  conversation.budget = settings.budget;
  if (listener.on_start) listener.on_start(conversation);

  const std::size_t total = settings.budget.total_messages(conversation.order.size());
  const std::size_t cycle = conversation.order.size();

  Message latest;
  latest.conversation = settings.id;
  latest.author = Author::system();
  latest.content = trigger.rendered;

  // The first speaker receives the trigger through respond().
  for (Agent& agent : agents)
    if (agent.id() != conversation.order.front()) agent.observe(settings.id, latest);

  for (std::size_t k = 0; k < total; ++k) {
    Agent& speaker = *by_id.at(conversation.order[k % cycle]);
    Message message = latest.author == Author(speaker.id()) ? speaker.continue_turn(settings.id, backend)
                                                            : speaker.respond(settings.id, latest, backend);
    message.global_index = k;
    message.word_count = word_count(message.content);
    message.over_word_limit = settings.word_limit > 0 && message.word_count > settings.word_limit;
    conversation.transcript.push_back(message);
    if (listener.on_message) listener.on_message(message);

    std::optional<AgentId> next;
    if (k + 1 < total) next = conversation.order[(k + 1) % cycle];
    for (Agent& agent : agents) {
      if (agent.id() == speaker.id() || (next && agent.id() == *next)) continue;
      agent.observe(settings.id, message);
    }
    latest = std::move(message);
  }
  return conversation;
}

}  // namespace polarsim
