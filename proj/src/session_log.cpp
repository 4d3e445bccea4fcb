#include "polarsim/session_log.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <memory>
#include <sstream>

#include "polarsim/errors.hpp"
#include "polarsim/seeding.hpp"

namespace polarsim {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string run_log_name(const std::string& experiment, const std::string& run_id) {
  return experiment + "-" + run_id + ".log";
}

namespace {

std::string iso8601(std::time_t seconds, int millis) {
  std::tm tm{};
  gmtime_r(&seconds, &tm);
  char buffer[40];
  std::size_t n = std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%S", &tm);
  if (millis >= 0) n += std::snprintf(buffer + n, sizeof buffer - n, ".%03d", millis);
  std::snprintf(buffer + n, sizeof buffer - n, "Z");
  return buffer;
}

ordered_json optional_string(const std::optional<GroupId>& g) { return g ? ordered_json(g->str()) : ordered_json(nullptr); }

}  // namespace

Clock make_clock(ClockKind kind) {
  if (kind == ClockKind::logical) {
    auto tick = std::make_shared<std::time_t>(0);
    return [tick] { return iso8601((*tick)++, -1); };
  }
  return [] {
    const auto now = std::chrono::system_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
    return iso8601(static_cast<std::time_t>(ms / 1000), static_cast<int>(ms % 1000));
  };
}

SessionLogWriter::SessionLogWriter(const fs::path& path, Clock clock, std::string run_id)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), clock_(std::move(clock)), run_id_(std::move(run_id)) {
  if (!out_) throw Error("cannot open session log " + path.string() + " for writing");
}

void SessionLogWriter::write(std::string_view event, const ordered_json& fields) {
  ordered_json line;
  line["event"] = event;
  line["run_id"] = run_id_;
  line["seq"] = seq_++;
  line["ts"] = clock_();
  for (auto it = fields.begin(); it != fields.end(); ++it) line[it.key()] = it.value();
  out_ << line.dump() << '\n';
  out_.flush();
  if (!out_) throw Error("failed writing session log " + path_.string());
}

void SessionLogWriter::run_start(const RunRecord& record) {
  ordered_json agents = ordered_json::array();
  for (const auto& a : record.agents) {
    agents.push_back({{"id", a.id.str()},
                      {"persona_description", a.profile.persona_description},
                      {"demographics", a.profile.demographics},
                      {"political_standpoint", a.profile.political_standpoint},
                      {"is_observer", a.profile.is_observer}});
  }
  ordered_json groups = ordered_json::array();
  for (const auto& g : record.groups) groups.push_back(g.str());
  ordered_json focal = ordered_json::array();
  for (const auto& f : record.focal) focal.push_back(f.str());

  ordered_json fields;
  fields["schema_version"] = kSessionSchemaVersion;
  fields["template_version"] = kPromptTemplateVersion;
  fields["experiment"] = record.experiment;
  fields["run_index"] = record.run_index;
  fields["master_seed"] = record.master_seed;
  fields["seed"] = record.seed;
  fields["seed_derivation"] = kSeedDerivation;
  fields["groups"] = groups;
  fields["focal"] = focal;
  fields["thresholds"] = {{"in_group_min_love", record.thresholds.in_group_min_love},
                          {"polarized_hate_threshold", record.thresholds.polarized_hate_threshold},
                          {"extremist_cutoff", record.thresholds.extremist_cutoff}};
  fields["word_limit"] = record.word_limit;
  fields["agents"] = agents;
  write("run_start", fields);
}

void SessionLogWriter::answer(Phase phase, const AgentId& agent, const AnswerRecord& a) {
  write("questionnaire_answer", {{"phase", to_string(phase)},
                                 {"agent", agent.str()},
                                 {"item", a.item_id},
                                 {"group", a.group.str()},
                                 {"kind", to_string(a.kind)},
                                 {"scale", {a.scale.min, a.scale.max}},
                                 {"raw", a.raw},
                                 {"value", a.value},
                                 {"clamped", a.clamped},
                                 {"attempts", a.attempts}});
}

void SessionLogWriter::assessment(Phase phase, const AgentId& agent, const PolarizationAssessment& a) {
  write("assessment", {{"phase", to_string(phase)},
                       {"agent", agent.str()},
                       {"in_group", optional_string(a.in_group)},
                       {"out_group", optional_string(a.out_group)},
                       {"polarized", a.polarized},
                       {"degree", a.degree ? ordered_json(*a.degree) : ordered_json(nullptr)},
                       {"agent_type", to_string(a.agent_type)}});
}

void SessionLogWriter::trigger(const Conversation& c) {
  ordered_json order = ordered_json::array();
  for (const auto& id : c.order) order.push_back(id.str());
  write("trigger", {{"conversation", c.id.str()},
                    {"order", order},
                    {"budget", {{"kind", c.budget.kind == TurnBudget::Kind::rounds ? "rounds" : "messages"},
                                {"value", c.budget.value}}},
                    {"topic", c.trigger.topic},
                    {"context", c.trigger.context},
                    {"instructions", c.trigger.instructions},
                    {"content", c.trigger.rendered}});
}

void SessionLogWriter::message(const Message& m) {
  write("message", {{"index", m.global_index},
                    {"author", m.author.label()},
                    {"content", m.content},
                    {"words", m.word_count},
                    {"over_limit", m.over_word_limit}});
}

void SessionLogWriter::run_end(const RunRecord& record) {
  ordered_json fields;
  fields["status"] = to_string(record.status);
  fields["messages"] = record.conversation.transcript.size();
  if (!record.error.empty()) fields["error"] = record.error;
  write("run_end", fields);
}

fs::path persist_run(const RunRecord& record, const fs::path& dir, ClockKind clock) {
  fs::create_directories(dir);
  const fs::path path = dir / run_log_name(record.experiment, record.run_id);
  SessionLogWriter log(path, make_clock(clock), record.run_id);
  log.run_start(record);

  auto phase_events = [&](Phase phase) {
    const auto& answers = phase == Phase::pre ? record.pre_answers : record.post_answers;
    const auto& assessments = phase == Phase::pre ? record.assessments_pre : record.assessments_post;
    for (const auto& a : record.agents)
      if (auto it = answers.find(a.id); it != answers.end())
        for (const auto& answer : it->second) log.answer(phase, a.id, answer);
    for (const auto& a : record.agents)
      if (auto it = assessments.find(a.id); it != assessments.end()) log.assessment(phase, a.id, it->second);
  };

  phase_events(Phase::pre);
  if (!record.conversation.id.empty()) {
    log.trigger(record.conversation);
    for (const auto& m : record.conversation.transcript) log.message(m);
  }
  phase_events(Phase::post);
  log.run_end(record);
  return path;
}

namespace {

struct LineError {
  std::string what;
};

const json& field(const json& line, const char* key) {
  auto it = line.find(key);
  if (it == line.end()) throw LineError{std::string("missing field \"") + key + "\""};
  return *it;
}

template <class T>
T get(const json& line, const char* key) {
  try {
    return field(line, key).get<T>();
  } catch (const json::exception&) {
    throw LineError{std::string("field \"") + key + "\" has the wrong type"};
  }
}

std::optional<GroupId> optional_group(const json& line, const char* key) {
  const json& v = field(line, key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) throw LineError{std::string("field \"") + key + "\" must be a string or null"};
  return GroupId(v.get<std::string>());
}

void apply_run_start(RunRecord& record, const json& line) {
  if (get<int>(line, "schema_version") != kSessionSchemaVersion)
    throw LineError{"unsupported schema_version " + field(line, "schema_version").dump()};
  record.experiment = get<std::string>(line, "experiment");
  record.run_id = get<std::string>(line, "run_id");
  record.run_index = get<std::uint64_t>(line, "run_index");
  record.master_seed = get<std::uint64_t>(line, "master_seed");
  record.seed = get<std::uint64_t>(line, "seed");
  for (const auto& g : field(line, "groups")) record.groups.emplace_back(g.get<std::string>());
  for (const auto& f : field(line, "focal")) record.focal.emplace_back(f.get<std::string>());
  const json& t = field(line, "thresholds");
  record.thresholds.in_group_min_love = get<int>(t, "in_group_min_love");
  record.thresholds.polarized_hate_threshold = get<int>(t, "polarized_hate_threshold");
  record.thresholds.extremist_cutoff = get<int>(t, "extremist_cutoff");
  record.word_limit = get<std::size_t>(line, "word_limit");
  for (const auto& a : field(line, "agents")) {
    AgentSnapshot snapshot;
    snapshot.id = AgentId(get<std::string>(a, "id"));
    snapshot.profile.persona_description = get<std::string>(a, "persona_description");
    snapshot.profile.demographics = get<std::string>(a, "demographics");
    snapshot.profile.political_standpoint = get<std::string>(a, "political_standpoint");
    snapshot.profile.is_observer = get<bool>(a, "is_observer");
    record.agents.push_back(std::move(snapshot));
  }
}

void apply_event(RunRecord& record, const std::string& event, const json& line, bool& ended) {
  if (event == "questionnaire_answer") {
    const Phase phase = parse_phase(get<std::string>(line, "phase"));
    const AgentId agent(get<std::string>(line, "agent"));
    AnswerRecord a;
    a.item_id = get<std::string>(line, "item");
    a.group = GroupId(get<std::string>(line, "group"));
    a.kind = parse_affect_kind(get<std::string>(line, "kind"));
    const json& scale = field(line, "scale");
    if (!scale.is_array() || scale.size() != 2) throw LineError{"scale must be [min, max]"};
    a.scale = Scale{scale[0].get<int>(), scale[1].get<int>()};
    a.raw = get<std::string>(line, "raw");
    a.value = get<int>(line, "value");
    a.clamped = get<bool>(line, "clamped");
    a.attempts = get<int>(line, "attempts");
    auto& answers = phase == Phase::pre ? record.pre_answers : record.post_answers;
    auto& states = phase == Phase::pre ? record.pre_states : record.post_states;
    states[agent].phase = phase;
    states[agent].scores[{a.group, a.kind}] = a.value;
    answers[agent].push_back(std::move(a));
  } else if (event == "assessment") {
    const Phase phase = parse_phase(get<std::string>(line, "phase"));
    PolarizationAssessment a;
    a.in_group = optional_group(line, "in_group");
    a.out_group = optional_group(line, "out_group");
    a.polarized = get<bool>(line, "polarized");
    const json& degree = field(line, "degree");
    if (!degree.is_null()) a.degree = degree.get<int>();
    a.agent_type = parse_agent_type(get<std::string>(line, "agent_type"));
    (phase == Phase::pre ? record.assessments_pre : record.assessments_post)[AgentId(get<std::string>(line, "agent"))] = a;
  } else if (event == "trigger") {
    Conversation& c = record.conversation;
    c.id = ConversationId(get<std::string>(line, "conversation"));
    for (const auto& id : field(line, "order")) c.order.emplace_back(id.get<std::string>());
    const json& budget = field(line, "budget");
    const std::string kind = get<std::string>(budget, "kind");
    if (kind != "rounds" && kind != "messages") throw LineError{"unknown budget kind " + kind};
    c.budget = TurnBudget{kind == "rounds" ? TurnBudget::Kind::rounds : TurnBudget::Kind::messages,
                          get<std::size_t>(budget, "value")};
    c.trigger.topic = get<std::string>(line, "topic");
    c.trigger.context = get<std::string>(line, "context");
    c.trigger.instructions = get<std::string>(line, "instructions");
    c.trigger.rendered = get<std::string>(line, "content");
  } else if (event == "message") {
    Message m;
    m.conversation = record.conversation.id;
    m.global_index = get<std::size_t>(line, "index");
    m.author = Author::from_label(get<std::string>(line, "author"));
    m.content = get<std::string>(line, "content");
    m.word_count = get<std::size_t>(line, "words");
    m.over_word_limit = get<bool>(line, "over_limit");
    if (m.global_index != record.conversation.transcript.size()) throw LineError{"message index out of sequence"};
    record.conversation.transcript.push_back(std::move(m));
  } else if (event == "run_end") {
    const std::string status = get<std::string>(line, "status");
    if (status == "completed") record.status = RunStatus::completed;
    else if (status == "aborted") record.status = RunStatus::aborted;
    else throw LineError{"unknown run status " + status};
    if (line.contains("error")) record.error = get<std::string>(line, "error");
    ended = true;
  } else {
    throw LineError{"unknown event \"" + event + "\""};
  }
}

}  // namespace

RunRecord load_run_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open session log " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw CorruptLine(1, path.string() + ": empty session log");

  RunRecord record;
  bool ended = false;
  bool truncated = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t number = i + 1;
    const json line = json::parse(lines[i], nullptr, false);
    if (line.is_discarded() || !line.is_object()) {
      if (i + 1 == lines.size() && i > 0) {
        truncated = true;
        break;
      }
      throw CorruptLine(number, path.string() + ": not a JSON object");
    }
    try {
      const std::string event = get<std::string>(line, "event");
      if (i == 0) {
        if (event != "run_start") throw LineError{"log must begin with run_start"};
        apply_run_start(record, line);
        continue;
      }
      if (ended) throw LineError{"event after run_end"};
      if (event == "run_start") throw LineError{"second run_start"};
      apply_event(record, event, line, ended);
    } catch (const LineError& e) {
      throw CorruptLine(number, path.string() + ": " + e.what);
    } catch (const ConfigError& e) {
      throw CorruptLine(number, path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw CorruptLine(number, path.string() + ": " + e.what());
    } catch (const json::exception& e) {
      throw CorruptLine(number, path.string() + ": " + e.what());
    }
  }

  if (!ended || truncated) {
    record.status = RunStatus::aborted;
    if (record.error.empty()) record.error = "session log ends before run_end";
  }
  if (record.status == RunStatus::aborted) {
    record.post_states.clear();
    record.post_answers.clear();
    record.assessments_post.clear();
  }
  return record;
}

std::vector<RunRecord> load_runs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("session directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".log") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<RunRecord> records;
  records.reserve(files.size());
  for (const auto& file : files) records.push_back(load_run_file(file));
  std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.experiment, a.run_index) < std::tie(b.experiment, b.run_index);
  });
  return records;
}

}  // namespace polarsim
