#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polarsim/backend.hpp"
#include "polarsim/ids.hpp"
#include "polarsim/message.hpp"

namespace polarsim {

/// Profile text is stored verbatim. Persona and standpoint must be non-empty;
/// demographics may be empty.
struct PersonaProfile {
  std::string persona_description;
  std::string demographics;
  std::string political_standpoint;
  bool is_observer = false;

  bool operator==(const PersonaProfile&) const = default;
};

struct MemoryEntry {
  Author author = Author::system();
  std::string content;
  std::size_t turn_index = 0;

  bool operator==(const MemoryEntry&) const = default;
};

/// Conversation-keyed, append-only history. Nothing is ever evicted.
class Memory {
 public:
  const MemoryEntry& record(const ConversationId& conversation, Author author, std::string content);

  std::span<const MemoryEntry> entries(const ConversationId& conversation) const;
  std::size_t size(const ConversationId& conversation) const { return entries(conversation).size(); }
  std::vector<ConversationId> conversations() const;

  bool operator==(const Memory&) const = default;

 private:
  std::map<ConversationId, std::vector<MemoryEntry>> entries_;
};

inline constexpr std::string_view kTurnInstruction =
    "Write your next message in this conversation. Reply with the message text only.";

class Agent {
 public:
  Agent(AgentId id, PersonaProfile profile);

  const AgentId& id() const { return id_; }
  const PersonaProfile& profile() const { return profile_; }
  bool is_observer() const { return profile_.is_observer; }
  const Memory& memory() const { return memory_; }

  void record(const ConversationId& conversation, Author author, std::string content);

  /// Saves `incoming`, asks the backend for a reply built from this agent's
  /// own profile and memory, saves the reply and returns it. The incoming
  /// message stays recorded even when the backend fails.
  Message respond(const ConversationId& conversation, const Message& incoming, GenerationBackend& backend,
                  std::string_view instruction = kTurnInstruction);

  /// Generates the next message without a new incoming one. Used when the
  /// scheduled speaker is also the author of the latest message.
  Message continue_turn(const ConversationId& conversation, GenerationBackend& backend,
                        std::string_view instruction = kTurnInstruction);

  void observe(const ConversationId& conversation, const Message& incoming);

  /// Generation context: this agent's profile and its memory for one
  /// conversation, nothing else.
  GenerationRequest build_request(const ConversationId& conversation, std::string instruction) const;

 private:
  Message generate_and_record(const ConversationId& conversation, GenerationBackend& backend,
                              std::string_view instruction);

  AgentId id_;
  PersonaProfile profile_;
  Memory memory_;
};

}  // namespace polarsim
