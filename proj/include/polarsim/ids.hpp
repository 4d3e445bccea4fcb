#pragma once

#include <compare>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace polarsim {

// String wrapper that keeps agent, conversation and group names from mixing.
template <class Tag>
class Name {
 public:
  Name() = default;
  explicit Name(std::string value) : value_(std::move(value)) {}

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }

  auto operator<=>(const Name&) const = default;

  friend std::ostream& operator<<(std::ostream& os, const Name& n) { return os << n.value_; }

 private:
  std::string value_;
};

using AgentId = Name<struct AgentIdTag>;
using ConversationId = Name<struct ConversationIdTag>;
using GroupId = Name<struct GroupIdTag>;

inline constexpr std::string_view kSystemAuthor = "SYSTEM";

// Author of a memory entry or message: an agent, or the reserved SYSTEM
// author that posts the discussion trigger.
class Author {
 public:
  Author(AgentId id) : id_(std::move(id)) {}  // NOLINT: implicit on purpose

  static Author system() { return Author(); }

  bool is_system() const { return !id_.has_value(); }

  const AgentId& agent() const {
    if (!id_) throw std::logic_error("SYSTEM author has no agent id");
    return *id_;
  }

  std::string label() const { return id_ ? id_->str() : std::string(kSystemAuthor); }

  bool operator==(const Author&) const = default;

  // Inverse of label().
  static Author from_label(std::string_view label) {
    if (label == kSystemAuthor) return system();
    return Author(AgentId(std::string(label)));
  }

 private:
  Author() = default;
  std::optional<AgentId> id_;
};

}  // namespace polarsim
