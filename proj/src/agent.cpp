#include "polarsim/agent.hpp"

#include <stdexcept>

#include "polarsim/errors.hpp"

namespace polarsim {

const MemoryEntry& Memory::record(const ConversationId& conversation, Author author, std::string content) {
  if (content.empty()) throw std::invalid_argument("memory entries need content");
  auto& list = entries_[conversation];
  const std::size_t next = list.empty() ? 0 : list.back().turn_index + 1;
  list.push_back(MemoryEntry{std::move(author), std::move(content), next});
  return list.back();
}

std::span<const MemoryEntry> Memory::entries(const ConversationId& conversation) const {
  auto it = entries_.find(conversation);
  if (it == entries_.end()) return {};
  return it->second;
}

std::vector<ConversationId> Memory::conversations() const {
  std::vector<ConversationId> ids;
  ids.reserve(entries_.size());
  for (const auto& [id, list] : entries_) ids.push_back(id);
  return ids;
}

Agent::Agent(AgentId id, PersonaProfile profile) : id_(std::move(id)), profile_(std::move(profile)) {
  if (id_.empty()) throw std::invalid_argument("agent id must not be empty");
  if (id_.str() == kSystemAuthor) throw std::invalid_argument("agent id SYSTEM is reserved");
  if (profile_.persona_description.empty()) throw std::invalid_argument("persona_description must not be empty");
  if (profile_.political_standpoint.empty()) throw std::invalid_argument("political_standpoint must not be empty");
}

void Agent::record(const ConversationId& conversation, Author author, std::string content) {
  memory_.record(conversation, std::move(author), std::move(content));
}

Message Agent::respond(const ConversationId& conversation, const Message& incoming, GenerationBackend& backend,
                       std::string_view instruction) {
  if (profile_.is_observer) throw ObserverCannotRespond("agent " + id_.str() + " is an observer");
  if (incoming.conversation != conversation) throw std::invalid_argument("message belongs to another conversation");
  memory_.record(conversation, incoming.author, incoming.content);
  return generate_and_record(conversation, backend, instruction);
}

Message Agent::continue_turn(const ConversationId& conversation, GenerationBackend& backend,
                             std::string_view instruction) {
  if (profile_.is_observer) throw ObserverCannotRespond("agent " + id_.str() + " is an observer");
  return generate_and_record(conversation, backend, instruction);
}

void Agent::observe(const ConversationId& conversation, const Message& incoming) {
  if (incoming.conversation != conversation) throw std::invalid_argument("message belongs to another conversation");
  memory_.record(conversation, incoming.author, incoming.content);
}

GenerationRequest Agent::build_request(const ConversationId& conversation, std::string instruction) const {
  GenerationRequest request;
  request.agent_name = id_.str();
  request.political_standpoint = profile_.political_standpoint;
  request.persona = profile_.persona_description;
  request.demographics = profile_.demographics;
  for (const auto& entry : memory_.entries(conversation)) {
    if (entry.author.is_system() && request.trigger.empty()) request.trigger = entry.content;
    request.transcript.push_back({entry.author.label(), entry.content});
  }
  request.instruction = std::move(instruction);
  return request;
}

Message Agent::generate_and_record(const ConversationId& conversation, GenerationBackend& backend,
                                   std::string_view instruction) {
  std::string reply = backend.generate(build_request(conversation, std::string(instruction)));
  if (reply.empty()) throw EmptyCompletion("backend returned empty text for " + id_.str());
  memory_.record(conversation, Author(id_), reply);
  Message out;
  out.conversation = conversation;
  out.author = Author(id_);
  out.content = std::move(reply);
  return out;
}

}  // namespace polarsim
