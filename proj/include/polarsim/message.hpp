#pragma once

#include <cstddef>
#include <string>

#include "polarsim/ids.hpp"

namespace polarsim {

// One authored post in a conversation. global_index is the position in the
// transcript; word-limit violations are carried as metadata, never truncated.
struct Message {
  ConversationId conversation;
  Author author = Author::system();
  std::string content;
  std::size_t global_index = 0;
  std::size_t word_count = 0;
  bool over_word_limit = false;

  bool operator==(const Message&) const = default;
};

}  // namespace polarsim
