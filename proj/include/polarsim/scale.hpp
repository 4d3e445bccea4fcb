#pragma once

#include <string_view>

namespace polarsim {

struct Scale {
  int min = 0;
  int max = 0;

  static constexpr Scale thermometer() { return {0, 100}; }
  static constexpr Scale love_hate() { return {0, 10}; }

  bool valid() const { return min < max; }
  bool contains(int v) const { return v >= min && v <= max; }

  bool operator==(const Scale&) const = default;
};

struct ParsedAnswer {
  int value = 0;
  bool clamped = false;

  bool operator==(const ParsedAnswer&) const = default;
};

/// Takes the first integer literal in `text` (a sign counts only when it
/// directly precedes the digits and does not follow a letter or digit) and
/// clamps it into the scale. Throws NoIntegerFound when the text has no digits.
ParsedAnswer parse_scale_answer(std::string_view text, const Scale& scale);

}  // namespace polarsim
