#include "polarsim/scripted_backend.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "polarsim/errors.hpp"

namespace polarsim {

using nlohmann::json;

ScriptedBackend::ScriptedBackend(ReplyFn reply, int max_retries) : reply_(std::move(reply)), max_retries_(max_retries) {
  if (!reply_) throw std::invalid_argument("scripted backend needs a reply function");
  if (max_retries_ < 0) throw std::invalid_argument("max_retries must be >= 0");
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_queue(std::vector<std::string> replies, int max_retries) {
  auto queue = std::make_shared<std::deque<std::string>>(replies.begin(), replies.end());
  return std::make_unique<ScriptedBackend>(
      [queue](const GenerationRequest&) {
        if (queue->empty()) throw BackendFailure("scripted reply queue exhausted");
        std::string next = std::move(queue->front());
        queue->pop_front();
        return next;
      },
      max_retries);
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_rules(std::map<std::string, std::string> by_last_author,
                                                             std::optional<std::string> fallback, int max_retries) {
  return std::make_unique<ScriptedBackend>(
      [rules = std::move(by_last_author), fallback = std::move(fallback)](const GenerationRequest& request) {
        const std::string last = request.transcript.empty() ? std::string() : request.transcript.back().author;
        if (auto it = rules.find(last); it != rules.end()) return it->second;
        if (fallback) return *fallback;
        throw BackendFailure("no scripted rule for last author \"" + last + "\"");
      },
      max_retries);
}

std::string ScriptedBackend::generate(const GenerationRequest& request) {
  std::lock_guard lock(mutex_);
  ++calls_;
  requests_.push_back(request);
  std::string reply = reply_(request);
  const bool blank = std::all_of(reply.begin(), reply.end(), [](unsigned char c) { return std::isspace(c); });
  if (blank) throw EmptyCompletion("scripted reply is empty");
  return reply;
}

std::size_t ScriptedBackend::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

constexpr std::string_view kStandpointPrefix = "standpoint:";

// Matching entries of a selector table, highest priority first.
std::vector<const json*> select(const json& table, const GenerationRequest& request) {
  std::vector<const json*> out;
  if (!table.is_object()) return out;
  if (auto it = table.find(request.agent_name); it != table.end()) out.push_back(&*it);
  const std::string standpoint = lower(request.political_standpoint);
  for (auto it = table.begin(); it != table.end(); ++it) {
    const std::string& key = it.key();
    if (key.rfind(kStandpointPrefix, 0) != 0) continue;
    if (standpoint.find(lower(key.substr(kStandpointPrefix.size()))) != std::string::npos) out.push_back(&*it);
  }
  if (auto it = table.find("*"); it != table.end()) out.push_back(&*it);
  return out;
}

void replace_all(std::string& text, std::string_view from, std::string_view to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size()))
    text.replace(pos, from.size(), to);
}

const json& pick(const json& entry, std::size_t index) {
  if (!entry.is_array()) return entry;
  return entry.at(std::min(index, entry.size() - 1));
}

void check_strings(const json& entry, const std::string& where) {
  if (entry.is_string()) return;
  if (entry.is_array() && !entry.empty() &&
      std::all_of(entry.begin(), entry.end(), [](const json& e) { return e.is_string(); }))
    return;
  throw ConfigError("scenario " + where + " must be a string or a non-empty list of strings");
}

void check_layer(const json& layer, const std::string& where) {
  if (!layer.is_object()) throw ConfigError("scenario " + where + " must be an object");
  if (auto r = layer.find("replies"); r != layer.end()) {
    if (!r->is_object()) throw ConfigError("scenario " + where + ".replies must be an object");
    for (auto& [selector, entry] : r->items()) check_strings(entry, where + ".replies." + selector);
  }
  if (auto a = layer.find("answers"); a != layer.end()) {
    if (!a->is_object()) throw ConfigError("scenario " + where + ".answers must be an object");
    for (auto& [selector, phases] : a->items()) {
      if (!phases.is_object()) throw ConfigError("scenario answers for " + selector + " must be an object");
      for (auto& [phase, items] : phases.items()) {
        if (phase != "pre" && phase != "post") throw ConfigError("scenario answer phase must be pre or post");
        if (!items.is_object()) throw ConfigError("scenario answers." + selector + "." + phase + " must be an object");
        for (auto& [item, entry] : items.items())
          check_strings(entry, where + ".answers." + selector + "." + phase + "." + item);
      }
    }
  }
}

struct ScenarioState {
  std::shared_ptr<const json> doc;
  std::uint64_t run_index = 0;
  std::map<std::string, std::size_t> answer_cursor;
};

std::vector<const json*> layers(const ScenarioState& state) {
  std::vector<const json*> out;
  if (auto runs = state.doc->find("runs"); runs != state.doc->end()) {
    if (auto it = runs->find(std::to_string(state.run_index)); it != runs->end()) out.push_back(&*it);
  }
  out.push_back(state.doc.get());
  return out;
}

std::string scripted_reply(const ScenarioState& state, const GenerationRequest& request) {
  std::size_t turn = 0;
  for (const auto& line : request.transcript)
    if (line.author == request.agent_name) ++turn;

  for (const json* layer : layers(state)) {
    auto replies = layer->find("replies");
    if (replies == layer->end()) continue;
    for (const json* entry : select(*replies, request)) {
      std::string text = pick(*entry, turn).get<std::string>();
      replace_all(text, "{agent}", request.agent_name);
      replace_all(text, "{turn}", std::to_string(turn));
      replace_all(text, "{run}", std::to_string(state.run_index));
      replace_all(text, "{last_author}", request.transcript.empty() ? "" : request.transcript.back().author);
      return text;
    }
  }
  throw BackendFailure("scenario has no reply for agent " + request.agent_name);
}

std::string scripted_answer(ScenarioState& state, const GenerationRequest& request) {
  const ProbeTag& probe = *request.probe;
  for (const json* layer : layers(state)) {
    auto answers = layer->find("answers");
    if (answers == layer->end()) continue;
    for (const json* entry : select(*answers, request)) {
      auto phase = entry->find(probe.phase);
      if (phase == entry->end()) continue;
      auto item = phase->find(probe.item_id);
      if (item == phase->end()) continue;
      std::size_t& cursor = state.answer_cursor[request.agent_name + '\n' + probe.phase + '\n' + probe.item_id];
      return pick(*item, cursor++).get<std::string>();
    }
  }
  throw BackendFailure("scenario has no " + probe.phase + " answer for agent " + request.agent_name + ", item " +
                       probe.item_id);
}

}  // namespace

ScriptedScenario ScriptedScenario::from_json(const json& doc) {
  check_layer(doc, "document");
  ScriptedScenario scenario;
  if (auto runs = doc.find("runs"); runs != doc.end()) {
    if (!runs->is_object()) throw ConfigError("scenario runs must be an object keyed by run index");
    for (auto& [key, layer] : runs->items()) {
      if (key.empty() || !std::all_of(key.begin(), key.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw ConfigError("scenario runs key \"" + key + "\" is not a run index");
      check_layer(layer, "runs." + key);
    }
  }
  if (auto retries = doc.find("max_retries"); retries != doc.end()) {
    if (!retries->is_number_integer() || retries->get<int>() < 0)
      throw ConfigError("scenario max_retries must be a non-negative integer");
    scenario.max_retries_ = retries->get<int>();
  }
  scenario.doc_ = doc;
  return scenario;
}

ScriptedScenario ScriptedScenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("scenario file " + path.string() + " is not valid JSON");
  return from_json(doc);
}

std::unique_ptr<ScriptedBackend> ScriptedScenario::make_backend(std::uint64_t run_index) const {
  auto state = std::make_shared<ScenarioState>();
  state->doc = std::make_shared<const json>(doc_);
  state->run_index = run_index;
  return std::make_unique<ScriptedBackend>(
      [state](const GenerationRequest& request) {
        return request.probe ? scripted_answer(*state, request) : scripted_reply(*state, request);
      },
      max_retries_);
}

}  // namespace polarsim
