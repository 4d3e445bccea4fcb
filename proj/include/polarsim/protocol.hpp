#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polarsim/agent.hpp"
#include "polarsim/backend.hpp"
#include "polarsim/ids.hpp"
#include "polarsim/message.hpp"

namespace polarsim {

/// Opening prompt of a conversation: topic and context combined with the
/// instructions for the participants (word limit, platform style, ...).
struct DiscussionTrigger {
  std::string topic;
  std::string context;
  std::string instructions;
  std::string rendered;

  static DiscussionTrigger make(std::string topic, std::string context, std::string instructions = {});

  bool operator==(const DiscussionTrigger&) const = default;
};

enum class OrderKind { fixed, alternate_starter, randomized };

std::string_view to_string(OrderKind kind);
OrderKind parse_order_kind(std::string_view text);  // throws ConfigError

struct TurnOrderPolicy {
  OrderKind kind = OrderKind::fixed;
  std::uint64_t seed = 0;  // randomized only

  bool operator==(const TurnOrderPolicy&) const = default;
};

/// How many messages a conversation produces: whole rounds over the turn
/// order, or a flat message budget that may stop mid-cycle.
struct TurnBudget {
  enum class Kind { rounds, messages };
  Kind kind = Kind::rounds;
  std::size_t value = 1;

  static TurnBudget rounds(std::size_t n) { return {Kind::rounds, n}; }
  static TurnBudget messages(std::size_t n) { return {Kind::messages, n}; }

  std::size_t total_messages(std::size_t participants) const {
    return kind == Kind::rounds ? value * participants : value;
  }

  bool operator==(const TurnBudget&) const = default;
};

struct Conversation {
  ConversationId id;
  DiscussionTrigger trigger;
  std::vector<AgentId> order;  // participants only
  TurnBudget budget;
  std::vector<Message> transcript;

  bool operator==(const Conversation&) const = default;
};

struct ConversationSettings {
  ConversationId id;
  TurnBudget budget;
  TurnOrderPolicy policy;
  std::uint64_t run_index = 0;
  std::size_t word_limit = 0;  // 0: no limit metadata
};

/// Progress hooks, called as the conversation unfolds so that a partial
/// transcript survives an aborted run.
struct ConversationListener {
  std::function<void(const Conversation&)> on_start;
  std::function<void(const Message&)> on_message;
};

/// fixed: input order. alternate_starter: rotated left by one on odd
/// run_index. randomized: Fisher-Yates with seed mix_seed(policy.seed, run_index).
std::vector<AgentId> derive_order(std::span<const AgentId> participants, const TurnOrderPolicy& policy,
                                  std::uint64_t run_index);

/// Number of maximal whitespace-delimited tokens.
std::size_t word_count(std::string_view content);

/// Round-robin conversation. Every agent gets the trigger; the scheduled
/// participant answers the latest message and each new message is delivered
/// exactly once to every other agent, observers included. Throws
/// NoParticipants when every agent is an observer; a BackendFailure escapes
/// after the listener has seen the messages produced so far.
Conversation run_conversation(std::span<Agent> agents, const DiscussionTrigger& trigger,
                              const ConversationSettings& settings, GenerationBackend& backend,
                              const ConversationListener& listener = {});

}  // namespace polarsim
