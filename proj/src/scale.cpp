#include "polarsim/scale.hpp"

#include <cctype>
#include <limits>
#include <string>

#include "polarsim/errors.hpp"

namespace polarsim {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

ParsedAnswer parse_scale_answer(std::string_view text, const Scale& scale) {
  std::size_t start = 0;
  while (start < text.size() && !is_digit(text[start])) ++start;
  if (start == text.size()) throw NoIntegerFound("no integer in answer: \"" + std::string(text) + "\"");

  bool negative = false;
  if (start > 0 && (text[start - 1] == '-' || text[start - 1] == '+')) {
    const bool attached = start > 1 && is_alnum(text[start - 2]);
    if (!attached) negative = text[start - 1] == '-';
  }

  // Saturate instead of overflowing; anything this large clamps anyway.
  constexpr long long kCeiling = static_cast<long long>(std::numeric_limits<int>::max()) + 1;
  long long magnitude = 0;
  for (std::size_t i = start; i < text.size() && is_digit(text[i]); ++i) {
    magnitude = magnitude * 10 + (text[i] - '0');
    if (magnitude > kCeiling) magnitude = kCeiling;
  }
  const long long value = negative ? -magnitude : magnitude;

  ParsedAnswer out;
  if (value < scale.min) {
    out.value = scale.min;
    out.clamped = true;
  } else if (value > scale.max) {
    out.value = scale.max;
    out.clamped = true;
  } else {
    out.value = static_cast<int>(value);
  }
  return out;
}

}  // namespace polarsim
