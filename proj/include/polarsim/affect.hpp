#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "polarsim/agent.hpp"
#include "polarsim/backend.hpp"
#include "polarsim/ids.hpp"
#include "polarsim/scale.hpp"

namespace polarsim {

enum class AffectKind { warmth, love, hate };

std::string_view to_string(AffectKind kind);
AffectKind parse_affect_kind(std::string_view text);  // throws ConfigError

enum class Phase { pre, post };

std::string_view to_string(Phase phase);
Phase parse_phase(std::string_view text);  // throws ConfigError

/// Warmth items use the 0-100 thermometer, love and hate items the 0-10 scale.
Scale scale_for(AffectKind kind);

struct QuestionnaireItem {
  std::string id;
  std::string question;
  GroupId target_group;
  AffectKind kind = AffectKind::warmth;
  Scale scale = Scale::thermometer();

  bool operator==(const QuestionnaireItem&) const = default;
};

using AffectKey = std::pair<GroupId, AffectKind>;

std::string to_string(const AffectKey& key);

class Questionnaire {
 public:
  Questionnaire() = default;
  /// Throws ConfigError on duplicate ids, duplicate (group, kind) pairs or a
  /// scale that does not match the item kind.
  explicit Questionnaire(std::vector<QuestionnaireItem> items);

  /// {"items": [{"id", "question", "group", "kind", "scale": [min, max]?}]}
  static Questionnaire from_json(const nlohmann::json& doc);
  static Questionnaire load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const std::vector<QuestionnaireItem>& items() const { return items_; }
  std::vector<AffectKey> keys() const;
  bool empty() const { return items_.empty(); }

  bool operator==(const Questionnaire&) const = default;

 private:
  std::vector<QuestionnaireItem> items_;
};

struct AffectiveState {
  Phase phase = Phase::pre;
  std::map<AffectKey, int> scores;

  bool operator==(const AffectiveState&) const = default;
};

/// One questionnaire answer with its audit trail.
struct AnswerRecord {
  std::string item_id;
  GroupId group;
  AffectKind kind = AffectKind::warmth;
  Scale scale;
  std::string raw;
  int value = 0;
  bool clamped = false;
  int attempts = 1;

  bool operator==(const AnswerRecord&) const = default;
};

struct Administration {
  AffectiveState state;
  std::vector<AnswerRecord> answers;  // questionnaire order
};

/// Probes the agent item by item with its full context for `conversation`.
/// Answers are not written to the agent's memory. UnparsableAnswer carries
/// the failing item id.
Administration administer(const Agent& agent, const ConversationId& conversation, const Questionnaire& questionnaire,
                          Phase phase, GenerationBackend& backend);

AffectiveState state_from_answers(Phase phase, const std::vector<AnswerRecord>& answers);

/// post - pre per key. Throws KeyMismatch when the key sets differ.
std::map<AffectKey, int> delta(const AffectiveState& pre, const AffectiveState& post);

}  // namespace polarsim
