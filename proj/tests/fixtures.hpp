#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polarsim/agents_csv.hpp"
#include "polarsim/scale.hpp"

namespace polarsim::testing {

struct MalformedCsvCase {
  std::string name;
  std::string text;
  AgentFileErrorKind kind;
  std::size_t row = 0;  // 0: not tied to a data row
  std::string column;
};

inline const std::string kHeader = "persona_description,demographics,political_standpoint,is_observer\n";
inline const std::string kIdHeader = "id," + kHeader;

inline std::vector<MalformedCsvCase> malformed_csv_cases() {
  using K = AgentFileErrorKind;
  std::string six_rows;
  for (int i = 0; i < 6; ++i) six_rows += "You are a nurse.,age: 30,Republican,false\n";
  return {
      {"empty_file", "", K::empty_file},
      {"blank_lines_only", "\n\n\n", K::empty_file},
      {"header_only", kHeader, K::empty_file},
      {"missing_standpoint", "persona_description,demographics,is_observer\np,d,true\n", K::missing_column, 0,
       "political_standpoint"},
      {"misspelled_column", "persona,demographics,political_standpoint,is_observer\np,d,R,true\n", K::missing_column,
       0, "persona_description"},
      {"unexpected_column", "persona_description,demographics,political_standpoint,is_observer,party\np,d,R,true,x\n",
       K::unexpected_column, 0, "party"},
      {"duplicate_column", "persona_description,demographics,political_standpoint,is_observer,is_observer\n",
       K::unexpected_column, 0, "is_observer"},
      {"column_order", "demographics,persona_description,political_standpoint,is_observer\nd,p,R,true\n",
       K::column_order},
      {"too_few_fields", kHeader + "p,d,R\n", K::field_count, 1},
      {"too_many_fields", kHeader + "p,d,R,true,extra\n", K::field_count, 1},
      {"unterminated_quote", kHeader + "\"You are a nurse.,d,R,true\n", K::unterminated_quote},
      {"quote_inside_field", kHeader + "You are \"a\" nurse,d,R,true\n", K::stray_quote},
      {"text_after_closing_quote", kHeader + "\"You are\" a nurse,d,R,true\n", K::stray_quote},
      {"boolean_maybe_row_7", kHeader + six_rows + "p,d,R,maybe\n", K::malformed_boolean, 7, "is_observer"},
      {"boolean_digit", kHeader + "p,d,R,1\n", K::malformed_boolean, 1, "is_observer"},
      {"boolean_empty", kHeader + "p,d,R,\n", K::malformed_boolean, 1, "is_observer"},
      {"empty_persona", kHeader + "p,d,R,true\n  ,d,R,false\n", K::empty_field, 2, "persona_description"},
      {"empty_standpoint", kHeader + "p,d,,false\n", K::empty_field, 1, "political_standpoint"},
      {"duplicate_id", kIdHeader + "a,p,d,R,true\nb,p,d,D,false\na,p,d,R,false\n", K::duplicate_id, 3, "id"},
      {"reserved_id", kIdHeader + "SYSTEM,p,d,R,false\n", K::reserved_id, 1, "id"},
  };
}

struct NoisyAnswerCase {
  std::string name;
  std::vector<std::string> replies;  // one per attempt
  Scale scale;
  int max_retries = 2;
  std::optional<int> value;  // nullopt: UnparsableAnswer expected
  bool clamped = false;
  int attempts = 1;
};

inline std::vector<NoisyAnswerCase> noisy_answer_cases() {
  const Scale t = Scale::thermometer();
  const Scale lh = Scale::love_hate();
  return {
      {"bare_number", {"75"}, t, 2, 75},
      {"sentence", {"I'd say 75 out of 100."}, t, 2, 75},
      {"out_of_ten", {"I'd rate it 8 out of 10."}, lh, 2, 8},
      {"negative_clamps_low", {"-3"}, lh, 2, 0, true},
      {"above_max_clamps_high", {"150"}, t, 2, 100, true},
      {"padded", {"   42  \n"}, t, 2, 42},
      {"fraction_notation", {"Rating: 7/10"}, lh, 2, 7},
      {"hyphen_after_letter_is_not_a_sign", {"warm-5"}, lh, 2, 5},
      {"first_of_two", {"between 3 and 4"}, lh, 2, 3},
      {"explicit_plus", {"+9"}, lh, 2, 9},
      {"decimal_truncates_to_first_integer", {"3.7"}, lh, 2, 3},
      {"negative_zero", {"-0"}, lh, 2, 0},
      {"trailing_period", {"10."}, lh, 2, 10},
      {"overflow_saturates", {"99999999999999999999"}, t, 2, 100, true},
      {"range_in_question_echo", {"Score (0-100): 64"}, t, 2, 0},
      {"word_then_digit_retry", {"Ten", "10"}, lh, 2, 10, false, 2},
      {"recovers_on_last_attempt", {"??", "hmm", "6"}, lh, 2, 6, false, 3},
      {"exhausts_retries", {"??", "??", "??"}, lh, 2, std::nullopt},
      {"no_retries_allowed", {"no number"}, t, 0, std::nullopt},
      {"clamp_after_retry", {"n/a", "-20"}, t, 1, 0, true, 2},
  };
}

}  // namespace polarsim::testing
