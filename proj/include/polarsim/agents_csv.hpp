#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "polarsim/agent.hpp"
#include "polarsim/errors.hpp"

namespace polarsim {

enum class AgentFileErrorKind {
  unreadable,
  empty_file,
  missing_column,
  unexpected_column,
  column_order,
  field_count,
  unterminated_quote,
  stray_quote,
  malformed_boolean,
  empty_field,
  duplicate_id,
  reserved_id,
};

std::string_view to_string(AgentFileErrorKind kind);

/// Agent file diagnostic. `row` is the 1-based data row (0 for the header or
/// the file as a whole), `line` the physical line the record starts on.
class AgentFileError : public Error {
 public:
  AgentFileError(AgentFileErrorKind kind, std::size_t row, std::size_t line, std::string column,
                 const std::string& detail);

  AgentFileErrorKind kind() const { return kind_; }
  std::size_t row() const { return row_; }
  std::size_t line() const { return line_; }
  const std::string& column() const { return column_; }

 private:
  AgentFileErrorKind kind_;
  std::size_t row_;
  std::size_t line_;
  std::string column_;
};

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

/// RFC 4180 reader: quoted fields may hold separators, doubled quotes and
/// line breaks. Accepts LF or CRLF and a leading UTF-8 BOM; blank lines are
/// skipped.
std::vector<CsvRecord> parse_csv(std::string_view text);

/// Header must be persona_description,demographics,political_standpoint,is_observer
/// with an optional leading id column. Without ids, agents are named
/// agent_<row>. Agents keep file order.
std::vector<Agent> parse_agents(std::string_view text);
std::vector<Agent> load_agents(const std::filesystem::path& path);

}  // namespace polarsim
