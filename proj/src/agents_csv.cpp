#include "polarsim/agents_csv.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace polarsim {

std::string_view to_string(AgentFileErrorKind kind) {
  switch (kind) {
    case AgentFileErrorKind::unreadable: return "Unreadable";
    case AgentFileErrorKind::empty_file: return "EmptyFile";
    case AgentFileErrorKind::missing_column: return "MissingColumn";
    case AgentFileErrorKind::unexpected_column: return "UnexpectedColumn";
    case AgentFileErrorKind::column_order: return "ColumnOrder";
    case AgentFileErrorKind::field_count: return "FieldCount";
    case AgentFileErrorKind::unterminated_quote: return "UnterminatedQuote";
    case AgentFileErrorKind::stray_quote: return "StrayQuote";
    case AgentFileErrorKind::malformed_boolean: return "MalformedBoolean";
    case AgentFileErrorKind::empty_field: return "EmptyField";
    case AgentFileErrorKind::duplicate_id: return "DuplicateId";
    case AgentFileErrorKind::reserved_id: return "ReservedId";
  }
  return "Unknown";
}

namespace {

std::string describe(AgentFileErrorKind kind, std::size_t row, std::size_t line, const std::string& column,
                     const std::string& detail) {
  std::ostringstream out;
  out << to_string(kind);
  if (row > 0) out << " (row " << row << ", line " << line << ")";
  else if (line > 0) out << " (line " << line << ")";
  if (!column.empty()) out << " [column " << column << "]";
  out << ": " << detail;
  return out.str();
}

constexpr std::array<std::string_view, 4> kColumns = {"persona_description", "demographics", "political_standpoint",
                                                      "is_observer"};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

AgentFileError::AgentFileError(AgentFileErrorKind kind, std::size_t row, std::size_t line, std::string column,
                               const std::string& detail)
    : Error(describe(kind, row, line, column, detail)),
      kind_(kind),
      row_(row),
      line_(line),
      column_(std::move(column)) {}

std::vector<CsvRecord> parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  std::size_t line = 1;
  current.line = 1;
  bool quoted = false;        // inside a quoted field
  bool after_quote = false;   // a quoted field just closed
  bool field_started = false;
  std::size_t quote_line = 0;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    after_quote = false;
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = current.fields.size() == 1 && current.fields.front().empty();
    if (!blank) records.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      ++line;
      end_record();
    } else if (c == '"') {
      if (field_started || after_quote)
        throw AgentFileError(AgentFileErrorKind::stray_quote, 0, line, "", "quote inside an unquoted field");
      quoted = true;
      field_started = true;
      quote_line = line;
    } else {
      if (after_quote)
        throw AgentFileError(AgentFileErrorKind::stray_quote, 0, line, "", "text after a closing quote");
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw AgentFileError(AgentFileErrorKind::unterminated_quote, 0, quote_line, "", "quoted field never closes");
  if (field_started || !current.fields.empty() || !field.empty()) end_record();
  return records;
}

std::vector<Agent> parse_agents(std::string_view text) {
  const std::vector<CsvRecord> records = parse_csv(text);
  if (records.empty()) throw AgentFileError(AgentFileErrorKind::empty_file, 0, 0, "", "agent file is empty");

  std::vector<std::string> header;
  for (const auto& name : records.front().fields) header.push_back(trim(name));
  const bool has_id = !header.empty() && header.front() == "id";
  std::vector<std::string> expected;
  if (has_id) expected.emplace_back("id");
  expected.insert(expected.end(), kColumns.begin(), kColumns.end());

  if (header != expected) {
    for (const auto& column : kColumns) {
      if (std::find(header.begin(), header.end(), column) == header.end())
        throw AgentFileError(AgentFileErrorKind::missing_column, 0, 1, std::string(column), "header lacks this column");
    }
    for (const auto& name : header) {
      if (std::find(expected.begin(), expected.end(), name) == expected.end() ||
          std::count(header.begin(), header.end(), name) > 1)
        throw AgentFileError(AgentFileErrorKind::unexpected_column, 0, 1, name, "column is not part of the agent schema");
    }
    throw AgentFileError(AgentFileErrorKind::column_order, 0, 1, "",
                         "columns must be ordered [id,]persona_description,demographics,political_standpoint,is_observer");
  }
  if (records.size() == 1) throw AgentFileError(AgentFileErrorKind::empty_file, 0, 1, "", "agent file has no data rows");

  const std::size_t offset = has_id ? 1 : 0;
  std::vector<Agent> agents;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const CsvRecord& rec = records[r];
    const std::size_t row = r;
    if (rec.fields.size() != expected.size())
      throw AgentFileError(AgentFileErrorKind::field_count, row, rec.line, "",
                           "expected " + std::to_string(expected.size()) + " fields, found " +
                               std::to_string(rec.fields.size()));

    std::string id = has_id ? trim(rec.fields[0]) : "agent_" + std::to_string(row);
    if (id.empty()) throw AgentFileError(AgentFileErrorKind::empty_field, row, rec.line, "id", "id is empty");
    if (id == kSystemAuthor)
      throw AgentFileError(AgentFileErrorKind::reserved_id, row, rec.line, "id", "SYSTEM is reserved for the trigger");
    if (!seen.insert(id).second)
      throw AgentFileError(AgentFileErrorKind::duplicate_id, row, rec.line, "id", "id " + id + " appears twice");

    PersonaProfile profile;
    profile.persona_description = rec.fields[offset + 0];
    profile.demographics = rec.fields[offset + 1];
    profile.political_standpoint = rec.fields[offset + 2];
    if (trim(profile.persona_description).empty())
      throw AgentFileError(AgentFileErrorKind::empty_field, row, rec.line, "persona_description", "value is empty");
    if (trim(profile.political_standpoint).empty())
      throw AgentFileError(AgentFileErrorKind::empty_field, row, rec.line, "political_standpoint", "value is empty");

    const std::string flag = lower(trim(rec.fields[offset + 3]));
    if (flag == "true") profile.is_observer = true;
    else if (flag == "false") profile.is_observer = false;
    else
      throw AgentFileError(AgentFileErrorKind::malformed_boolean, row, rec.line, "is_observer",
                           "expected true or false, got \"" + rec.fields[offset + 3] + "\"");

    agents.emplace_back(AgentId(std::move(id)), std::move(profile));
  }
  return agents;
}

std::vector<Agent> load_agents(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AgentFileError(AgentFileErrorKind::unreadable, 0, 0, "", "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_agents(buffer.str());
}

}  // namespace polarsim
