#include "polarsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "polarsim/agents_csv.hpp"
#include "polarsim/errors.hpp"
#include "polarsim/remote_backend.hpp"
#include "polarsim/scripted_backend.hpp"
#include "polarsim/seeding.hpp"
#include "polarsim/session_log.hpp"

namespace polarsim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json& required(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ConfigError(std::string("experiment spec is missing \"") + key + "\"");
  return *it;
}

template <class T>
T get_as(const json& value, const std::string& what) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("experiment spec field \"" + what + "\" has the wrong type");
  }
}

std::size_t positive(const json& value, const std::string& what) {
  if (!value.is_number_integer() || value.get<long long>() < 1)
    throw ConfigError("experiment spec field \"" + what + "\" must be a positive integer");
  return value.get<std::size_t>();
}

fs::path resolve(const fs::path& base, const std::string& file) {
  fs::path p(file);
  return p.is_absolute() ? p : base / p;
}

Questionnaire questionnaire_field(const json& value, const fs::path& base) {
  if (value.is_string()) return Questionnaire::load(resolve(base, value.get<std::string>()));
  return Questionnaire::from_json(value);
}

BackendConfig backend_field(const json& doc, const fs::path& base) {
  BackendConfig config;
  if (!doc.is_object()) throw ConfigError("experiment spec field \"backend\" must be an object");
  config.kind = parse_backend_kind(get_as<std::string>(required(doc, "kind"), "backend.kind"));
  if (doc.contains("endpoint")) config.endpoint = get_as<std::string>(doc["endpoint"], "backend.endpoint");
  if (doc.contains("model")) config.model_id = get_as<std::string>(doc["model"], "backend.model");
  if (doc.contains("temperature")) config.temperature = get_as<double>(doc["temperature"], "backend.temperature");
  if (doc.contains("api_key_env")) config.api_key_env_var = get_as<std::string>(doc["api_key_env"], "backend.api_key_env");
  if (doc.contains("max_retries")) config.max_retries = get_as<int>(doc["max_retries"], "backend.max_retries");
  if (doc.contains("timeout_ms")) config.timeout = std::chrono::milliseconds(get_as<long>(doc["timeout_ms"], "backend.timeout_ms"));
  if (doc.contains("max_in_flight")) config.max_in_flight = get_as<int>(doc["max_in_flight"], "backend.max_in_flight");
  if (doc.contains("backoff_initial_ms"))
    config.backoff_initial = std::chrono::milliseconds(get_as<long>(doc["backoff_initial_ms"], "backend.backoff_initial_ms"));
  if (doc.contains("backoff_cap_ms"))
    config.backoff_cap = std::chrono::milliseconds(get_as<long>(doc["backoff_cap_ms"], "backend.backoff_cap_ms"));
  if (doc.contains("scenario")) config.scenario_file = resolve(base, get_as<std::string>(doc["scenario"], "backend.scenario"));
  return config;
}

Pairing pairing_field(const json& doc) {
  Pairing pairing;
  const std::string kind = get_as<std::string>(required(doc, "kind"), "pairing.kind");
  if (kind == "all") {
    pairing.kind = Pairing::Kind::all;
  } else if (kind == "groups") {
    pairing.kind = Pairing::Kind::groups;
    for (const auto& group : required(doc, "groups")) {
      std::vector<AgentId> ids;
      for (const auto& id : group) ids.emplace_back(get_as<std::string>(id, "pairing.groups"));
      pairing.groups.push_back(std::move(ids));
    }
  } else if (kind == "draw") {
    pairing.kind = Pairing::Kind::draw;
    pairing.draw_size = positive(required(doc, "size"), "pairing.size");
  } else {
    throw ConfigError("unknown pairing kind \"" + kind + "\" (expected all, groups or draw)");
  }
  return pairing;
}

std::string limit_instruction(std::size_t words) {
  return "Keep each message to at most " + std::to_string(words) + " words.";
}

}  // namespace

void ExperimentSpec::validate() const {
  if (name.empty()) throw ConfigError("experiment name must not be empty");
  if (name.find_first_of("/\\") != std::string::npos) throw ConfigError("experiment name must not contain path separators");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (word_limit < 1) throw ConfigError("word_limit must be >= 1");
  if (budget.value < 1) throw ConfigError("rounds / messages_per_run must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (group_universe.empty()) throw ConfigError("group universe must not be empty");
  std::set<GroupId> groups(group_universe.begin(), group_universe.end());
  if (groups.size() != group_universe.size()) throw ConfigError("group universe lists a group twice");

  auto pre = pre_questionnaire.keys();
  auto post = post_questionnaire.keys();
  std::sort(pre.begin(), pre.end());
  std::sort(post.begin(), post.end());
  if (pre != post) throw ConfigError("pre and post questionnaires must cover the same (group, kind) keys");
  for (const auto& [group, kind] : pre)
    if (!groups.contains(group)) throw ConfigError("questionnaire group " + group.str() + " is not in the group universe");

  if (pairing.kind == Pairing::Kind::groups) {
    if (pairing.groups.empty()) throw ConfigError("pairing groups must not be empty");
    for (const auto& g : pairing.groups)
      if (g.empty()) throw ConfigError("pairing groups must not contain an empty set");
  }
  if (pairing.kind == Pairing::Kind::draw && pairing.draw_size < 1) throw ConfigError("pairing draw size must be >= 1");
  thresholds.validate();
  backend.validate();
}

ExperimentSpec parse_experiment_spec(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("experiment spec must be a JSON object");
  ExperimentSpec spec;
  spec.name = get_as<std::string>(required(doc, "name"), "name");
  spec.agents_file = resolve(base_dir, get_as<std::string>(required(doc, "agents_file"), "agents_file"));
  for (const auto& g : required(doc, "groups")) spec.group_universe.emplace_back(get_as<std::string>(g, "groups"));

  spec.runs = positive(required(doc, "runs"), "runs");
  spec.word_limit = doc.contains("word_limit") ? positive(doc["word_limit"], "word_limit") : 50;
  const bool has_rounds = doc.contains("rounds");
  const bool has_messages = doc.contains("messages_per_run");
  if (has_rounds == has_messages) throw ConfigError("give exactly one of \"rounds\" or \"messages_per_run\"");
  spec.budget = has_rounds ? TurnBudget::rounds(positive(doc["rounds"], "rounds"))
                           : TurnBudget::messages(positive(doc["messages_per_run"], "messages_per_run"));

  const json& trigger = required(doc, "trigger");
  std::string instructions =
      trigger.contains("instructions") ? get_as<std::string>(trigger["instructions"], "trigger.instructions") : "";
  instructions += (instructions.empty() ? "" : " ") + limit_instruction(spec.word_limit);
  try {
    spec.trigger = DiscussionTrigger::make(get_as<std::string>(required(trigger, "topic"), "trigger.topic"),
                                           get_as<std::string>(required(trigger, "context"), "trigger.context"),
                                           std::move(instructions));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (doc.contains("order_policy")) {
    const json& p = doc["order_policy"];
    spec.order_policy.kind =
        parse_order_kind(get_as<std::string>(p.is_object() ? required(p, "kind") : p, "order_policy"));
  }

  spec.pre_questionnaire = questionnaire_field(required(doc, "pre_questionnaire"), base_dir);
  spec.post_questionnaire = questionnaire_field(required(doc, "post_questionnaire"), base_dir);
  spec.backend = backend_field(required(doc, "backend"), base_dir);
  spec.master_seed = doc.contains("master_seed") ? get_as<std::uint64_t>(doc["master_seed"], "master_seed") : 0;
  spec.output_dir = doc.contains("output_dir") ? fs::path(get_as<std::string>(doc["output_dir"], "output_dir"))
                                               : fs::path("sessions") / spec.name;
  if (doc.contains("pairing")) spec.pairing = pairing_field(doc["pairing"]);
  if (doc.contains("focal_agents"))
    for (const auto& id : doc["focal_agents"]) spec.focal_agents.emplace_back(get_as<std::string>(id, "focal_agents"));
  if (doc.contains("thresholds")) {
    const json& t = doc["thresholds"];
    if (t.contains("in_group_min_love")) spec.thresholds.in_group_min_love = get_as<int>(t["in_group_min_love"], "thresholds");
    if (t.contains("polarized_hate_threshold"))
      spec.thresholds.polarized_hate_threshold = get_as<int>(t["polarized_hate_threshold"], "thresholds");
    if (t.contains("extremist_cutoff")) spec.thresholds.extremist_cutoff = get_as<int>(t["extremist_cutoff"], "thresholds");
  }
  if (doc.contains("workers")) spec.workers = positive(doc["workers"], "workers");
  spec.clock = spec.backend.kind == BackendKind::remote ? ClockKind::system : ClockKind::logical;
  if (doc.contains("clock")) {
    const std::string clock = get_as<std::string>(doc["clock"], "clock");
    if (clock == "logical") spec.clock = ClockKind::logical;
    else if (clock == "system") spec.clock = ClockKind::system;
    else throw ConfigError("clock must be logical or system");
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open experiment spec " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("experiment spec " + path.string() + " is not valid JSON");
  return parse_experiment_spec(doc, path.parent_path());
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
  return mix_seed(master_seed, run_index);
}

std::string run_id_for(std::uint64_t run_index) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "run-%04llu", static_cast<unsigned long long>(run_index));
  return buffer;
}

std::vector<Agent> select_run_agents(std::span<const Agent> pool, const Pairing& pairing, std::uint64_t run_index,
                                     std::uint64_t run_seed) {
  switch (pairing.kind) {
    case Pairing::Kind::all:
      return {pool.begin(), pool.end()};
    case Pairing::Kind::groups: {
      const auto& wanted = pairing.groups.at(run_index % pairing.groups.size());
      std::vector<Agent> out;
      for (const auto& id : wanted) {
        auto it = std::find_if(pool.begin(), pool.end(), [&](const Agent& a) { return a.id() == id; });
        if (it == pool.end()) throw ConfigError("pairing names unknown agent " + id.str());
        out.push_back(*it);
      }
      std::stable_sort(out.begin(), out.end(), [&](const Agent& a, const Agent& b) {
        auto pos = [&](const Agent& x) {
          return std::find_if(pool.begin(), pool.end(), [&](const Agent& p) { return p.id() == x.id(); }) - pool.begin();
        };
        return pos(a) < pos(b);
      });
      return out;
    }
    case Pairing::Kind::draw: {
      if (pairing.draw_size > pool.size()) throw ConfigError("pairing draw size exceeds the agent pool");
      std::vector<std::size_t> index(pool.size());
      for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
      seeded_shuffle(index, run_seed);
      index.resize(pairing.draw_size);
      std::sort(index.begin(), index.end());
      std::vector<Agent> out;
      for (auto i : index) out.push_back(pool[i]);
      return out;
    }
  }
  return {};
}

std::string_view to_string(RunStatus status) { return status == RunStatus::completed ? "completed" : "aborted"; }

std::vector<std::size_t> RunRecord::word_counts() const {
  std::vector<std::size_t> out;
  out.reserve(conversation.transcript.size());
  for (const auto& m : conversation.transcript) out.push_back(m.word_count);
  return out;
}

std::vector<AgentId> RunRecord::agent_ids() const {
  std::vector<AgentId> out;
  for (const auto& a : agents) out.push_back(a.id);
  return out;
}

BackendFactory make_backend_factory(const BackendConfig& config) {
  config.validate();
  if (config.kind == BackendKind::scripted) {
    if (config.scenario_file.empty()) throw ConfigError("scripted backend needs a scenario file");
    auto scenario = std::make_shared<const ScriptedScenario>(ScriptedScenario::load(config.scenario_file));
    return [scenario](std::uint64_t run_index, std::uint64_t) -> std::shared_ptr<GenerationBackend> {
      return scenario->make_backend(run_index);
    };
  }
  auto remote = std::make_shared<RemoteBackend>(config);
  return [remote](std::uint64_t, std::uint64_t) -> std::shared_ptr<GenerationBackend> { return remote; };
}

namespace {

void record_assessments(RunRecord& record, Phase phase, SessionLogWriter& log) {
  const auto& states = phase == Phase::pre ? record.pre_states : record.post_states;
  auto& target = phase == Phase::pre ? record.assessments_pre : record.assessments_post;
  for (const auto& snapshot : record.agents) {
    auto it = states.find(snapshot.id);
    if (it == states.end()) continue;
    auto scores = group_scores_from(it->second, record.groups);
    if (!scores) continue;
    const auto assessment = assess(*scores, record.thresholds);
    target[snapshot.id] = assessment;
    log.assessment(phase, snapshot.id, assessment);
  }
}

void administer_all(RunRecord& record, std::span<Agent> agents, const ConversationId& conversation,
                    const Questionnaire& questionnaire, Phase phase, GenerationBackend& backend, SessionLogWriter& log) {
  auto& answers = phase == Phase::pre ? record.pre_answers : record.post_answers;
  auto& states = phase == Phase::pre ? record.pre_states : record.post_states;
  for (const Agent& agent : agents) {
    Administration result = administer(agent, conversation, questionnaire, phase, backend);
    for (const auto& a : result.answers) log.answer(phase, agent.id(), a);
    answers[agent.id()] = std::move(result.answers);
    states[agent.id()] = std::move(result.state);
  }
  record_assessments(record, phase, log);
}

RunRecord execute_run(const ExperimentSpec& spec, std::span<const Agent> pool, std::uint64_t run_index,
                      const BackendFactory& factory) {
  RunRecord record;
  record.experiment = spec.name;
  record.run_id = run_id_for(run_index);
  record.run_index = run_index;
  record.master_seed = spec.master_seed;
  record.seed = derive_run_seed(spec.master_seed, run_index);
  record.groups = spec.group_universe;
  record.thresholds = spec.thresholds;
  record.word_limit = spec.word_limit;

  const fs::path path = spec.output_dir / run_log_name(spec.name, record.run_id);
  if (fs::exists(path)) {
    try {
      RunRecord previous = load_run_file(path);
      if (previous.status == RunStatus::completed && previous.seed == record.seed &&
          previous.experiment == record.experiment)
        return previous;
    } catch (const Error&) {
      // unreadable leftovers are simply re-run
    }
  }

  std::vector<Agent> agents = select_run_agents(pool, spec.pairing, run_index, record.seed);
  for (const auto& a : agents) record.agents.push_back({a.id(), a.profile()});
  if (spec.focal_agents.empty()) {
    for (const auto& a : agents)
      if (a.is_observer()) record.focal.push_back(a.id());
  } else {
    for (const auto& id : spec.focal_agents)
      if (std::any_of(agents.begin(), agents.end(), [&](const Agent& a) { return a.id() == id; }))
        record.focal.push_back(id);
  }

  SessionLogWriter log(path, make_clock(spec.clock), record.run_id);
  log.run_start(record);

  const ConversationId conversation_id(spec.name + "/" + record.run_id);
  try {
    std::shared_ptr<GenerationBackend> backend = factory(run_index, record.seed);
    administer_all(record, agents, conversation_id, spec.pre_questionnaire, Phase::pre, *backend, log);

    ConversationSettings settings;
    settings.id = conversation_id;
    settings.budget = spec.budget;
    settings.policy = spec.order_policy;
    settings.policy.seed = spec.master_seed;
    settings.run_index = run_index;
    settings.word_limit = spec.word_limit;
    ConversationListener listener;
    listener.on_start = [&](const Conversation& c) {
      record.conversation = c;
      log.trigger(c);
    };
    listener.on_message = [&](const Message& m) {
      record.conversation.transcript.push_back(m);
      log.message(m);
    };
    run_conversation(agents, spec.trigger, settings, *backend, listener);

    administer_all(record, agents, conversation_id, spec.post_questionnaire, Phase::post, *backend, log);
    record.status = RunStatus::completed;
  } catch (const std::exception& e) {
    record.status = RunStatus::aborted;
    record.error = e.what();
    record.post_states.clear();
    record.post_answers.clear();
    record.assessments_post.clear();
  }
  log.run_end(record);
  return record;
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  spec.validate();
  std::vector<Agent> pool;
  try {
    pool = load_agents(spec.agents_file);
  } catch (const AgentFileError& e) {
    throw ConfigError(spec.agents_file.string() + ": " + e.what());
  }

  std::set<AgentId> known;
  for (const auto& a : pool) known.insert(a.id());
  for (const auto& group : spec.pairing.groups)
    for (const auto& id : group)
      if (!known.contains(id)) throw ConfigError("pairing names unknown agent " + id.str());
  for (const auto& id : spec.focal_agents)
    if (!known.contains(id)) throw ConfigError("focal agent " + id.str() + " is not in the agent file");
  if (spec.pairing.kind == Pairing::Kind::draw && spec.pairing.draw_size > pool.size())
    throw ConfigError("pairing draw size exceeds the agent pool");

  const BackendFactory factory = options.backend_factory ? options.backend_factory : make_backend_factory(spec.backend);

  std::error_code ec;
  fs::create_directories(spec.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + spec.output_dir.string() + ": " + ec.message());

  std::vector<RunRecord> records(spec.runs);
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < spec.runs; i = next++) {
      records[i] = execute_run(spec, pool, i, factory);
      if (options.on_run_finished) {
        std::lock_guard lock(callback_mutex);
        options.on_run_finished(records[i]);
      }
    }
  };

  const std::size_t workers = std::min(options.workers > 0 ? options.workers : spec.workers, spec.runs);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
  }
  return records;
}

std::string sample_demographics(std::span<const std::pair<std::string, double>> distribution, std::uint64_t seed) {
  if (distribution.empty()) throw InvalidDistribution("distribution has no categories");
  double total = 0.0;
  for (const auto& [category, weight] : distribution) {
    if (!(weight >= 0.0)) throw InvalidDistribution("weight for " + category + " is negative or NaN");
    total += weight;
  }
  if (!(total > 0.0)) throw InvalidDistribution("weights must sum to a positive value");

  std::mt19937_64 engine(seed);
  const double target = unit_draw(engine) * total;
  double cumulative = 0.0;
  const std::string* last_positive = nullptr;
  for (const auto& [category, weight] : distribution) {
    if (weight == 0.0) continue;
    last_positive = &category;
    cumulative += weight;
    if (target < cumulative) return category;
  }
  return *last_positive;
}

}  // namespace polarsim
