#include "polarsim/affect.hpp"

#include <fstream>
#include <set>

#include "polarsim/errors.hpp"

namespace polarsim {

using nlohmann::json;

std::string_view to_string(AffectKind kind) {
  switch (kind) {
    case AffectKind::warmth: return "warmth";
    case AffectKind::love: return "love";
    case AffectKind::hate: return "hate";
  }
  return "unknown";
}

AffectKind parse_affect_kind(std::string_view text) {
  if (text == "warmth") return AffectKind::warmth;
  if (text == "love") return AffectKind::love;
  if (text == "hate") return AffectKind::hate;
  throw ConfigError("unknown affect kind \"" + std::string(text) + "\"");
}

std::string_view to_string(Phase phase) { return phase == Phase::pre ? "pre" : "post"; }

Phase parse_phase(std::string_view text) {
  if (text == "pre") return Phase::pre;
  if (text == "post") return Phase::post;
  throw ConfigError("unknown phase \"" + std::string(text) + "\"");
}

Scale scale_for(AffectKind kind) { return kind == AffectKind::warmth ? Scale::thermometer() : Scale::love_hate(); }

std::string to_string(const AffectKey& key) { return key.first.str() + "/" + std::string(to_string(key.second)); }

Questionnaire::Questionnaire(std::vector<QuestionnaireItem> items) : items_(std::move(items)) {
  std::set<std::string> ids;
  std::set<AffectKey> keys;
  for (const auto& item : items_) {
    if (item.id.empty()) throw ConfigError("questionnaire item without id");
    if (item.question.empty()) throw ConfigError("questionnaire item " + item.id + " has no question");
    if (item.target_group.empty()) throw ConfigError("questionnaire item " + item.id + " has no group");
    if (item.scale != scale_for(item.kind))
      throw ConfigError("questionnaire item " + item.id + ": " + std::string(to_string(item.kind)) +
                        " items must use the " + (item.kind == AffectKind::warmth ? "0-100" : "0-10") + " scale");
    if (!ids.insert(item.id).second) throw ConfigError("duplicate questionnaire item id " + item.id);
    if (!keys.insert({item.target_group, item.kind}).second)
      throw ConfigError("questionnaire asks twice about " + to_string(AffectKey{item.target_group, item.kind}));
  }
}

Questionnaire Questionnaire::from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("items") || !doc["items"].is_array())
    throw ConfigError("questionnaire needs an \"items\" list");
  std::vector<QuestionnaireItem> items;
  for (const auto& entry : doc["items"]) {
    try {
      QuestionnaireItem item;
      item.id = entry.at("id").get<std::string>();
      item.question = entry.at("question").get<std::string>();
      item.target_group = GroupId(entry.at("group").get<std::string>());
      item.kind = parse_affect_kind(entry.at("kind").get<std::string>());
      item.scale = scale_for(item.kind);
      if (entry.contains("scale")) {
        const auto& s = entry["scale"];
        if (!s.is_array() || s.size() != 2) throw ConfigError("scale must be [min, max]");
        item.scale = Scale{s[0].get<int>(), s[1].get<int>()};
      }
      items.push_back(std::move(item));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed questionnaire item: ") + e.what());
    }
  }
  return Questionnaire(std::move(items));
}

Questionnaire Questionnaire::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open questionnaire " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("questionnaire " + path.string() + " is not valid JSON");
  return from_json(doc);
}

json Questionnaire::to_json() const {
  json items = json::array();
  for (const auto& item : items_) {
    items.push_back({{"id", item.id},
                     {"question", item.question},
                     {"group", item.target_group.str()},
                     {"kind", to_string(item.kind)},
                     {"scale", {item.scale.min, item.scale.max}}});
  }
  return json{{"items", items}};
}

std::vector<AffectKey> Questionnaire::keys() const {
  std::vector<AffectKey> out;
  for (const auto& item : items_) out.emplace_back(item.target_group, item.kind);
  return out;
}

Administration administer(const Agent& agent, const ConversationId& conversation, const Questionnaire& questionnaire,
                          Phase phase, GenerationBackend& backend) {
  Administration out;
  out.state.phase = phase;
  const GenerationRequest context = agent.build_request(conversation, {});
  for (const auto& item : questionnaire.items()) {
    ScaleQuery query{context, item.question, item.scale};
    query.request.probe = ProbeTag{item.id, std::string(to_string(phase))};
    const ScaleAnswer answer = answer_scale(backend, query, item.id);
    out.state.scores[{item.target_group, item.kind}] = answer.value;
    out.answers.push_back(
        AnswerRecord{item.id, item.target_group, item.kind, item.scale, answer.raw, answer.value, answer.clamped,
                     answer.attempts});
  }
  return out;
}

AffectiveState state_from_answers(Phase phase, const std::vector<AnswerRecord>& answers) {
  AffectiveState state;
  state.phase = phase;
  for (const auto& a : answers) state.scores[{a.group, a.kind}] = a.value;
  return state;
}

std::map<AffectKey, int> delta(const AffectiveState& pre, const AffectiveState& post) {
  std::map<AffectKey, int> out;
  auto a = pre.scores.begin();
  auto b = post.scores.begin();
  for (; a != pre.scores.end() && b != post.scores.end(); ++a, ++b) {
    if (a->first != b->first) throw KeyMismatch("states differ at key " + to_string(a->first));
    out[a->first] = b->second - a->second;
  }
  if (a != pre.scores.end() || b != post.scores.end()) throw KeyMismatch("states have different numbers of keys");
  return out;
}

}  // namespace polarsim
