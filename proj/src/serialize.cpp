#include "writor/serialize.hpp"

#include <array>
#include <cstdio>

#include "writor/errors.hpp"

namespace writor {

using nlohmann::json;

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<E, N>& values, std::string_view what) {
  for (E v : values) {
    if (to_string(v) == s) return v;
  }
  throw PreconditionError("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

constexpr std::array kGoalOrigins = {GoalOrigin::suggested, GoalOrigin::custom};
constexpr std::array kCardKinds = {CardKind::critique, CardKind::praise};
constexpr std::array kFeedbackTypes = {FeedbackType::reader_perspective, FeedbackType::example_analogy};
constexpr std::array kStatuses = {CardStatus::open, CardStatus::addressed};
constexpr std::array kResolutions = {AnchorResolution::exact, AnchorResolution::normalized,
                                     AnchorResolution::fuzzy, AnchorResolution::unanchored};
constexpr std::array kCategories = {HocCategory::thesis_argument, HocCategory::organization,
                                    HocCategory::development, HocCategory::audience_purpose};
constexpr std::array kRoles = {ChatRole::writer, ChatRole::system_feedback};
constexpr std::array kSources = {CardSource::pipeline, CardSource::targeted, CardSource::baseline};

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void get_optional(const json& j, const char* key, std::optional<T>& v) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    v.reset();
  } else {
    v = it->get<T>();
  }
}

std::string enum_str(std::string_view s) { return std::string(s); }

}  // namespace

std::string format_instant(Instant t) {
  using namespace std::chrono;
  auto day = floor<days>(t);
  year_month_day ymd{day};
  hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()),
                static_cast<int>(hms.subseconds().count()));
  return buf;
}

Instant parse_instant(const std::string& s) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, ms = 0;
  char z = 0;
  int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3d%c", &y, &mo, &d, &h, &mi, &sec, &ms, &z);
  if (n != 8 || z != 'Z') {
    throw PreconditionError("bad timestamp '" + s + "', expected YYYY-MM-DDTHH:MM:SS.mmmZ");
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw PreconditionError("bad date in timestamp '" + s + "'");
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} + milliseconds{ms};
}

CardKind parse_card_kind(std::string_view s) { return parse_enum(s, kCardKinds, "card kind"); }
FeedbackType parse_feedback_type(std::string_view s) {
  return parse_enum(s, kFeedbackTypes, "feedback type");
}
HocCategory parse_hoc_category(std::string_view s) {
  return parse_enum(s, kCategories, "high-order concern category");
}

void to_json(json& j, const AssignmentContext& v) {
  j = json{{"reader_description", v.reader_description},
           {"assignment_prompt", v.assignment_prompt},
           {"edit_expectations", v.edit_expectations}};
}

void from_json(const json& j, AssignmentContext& v) {
  v.reader_description = j.value("reader_description", "");
  v.assignment_prompt = j.value("assignment_prompt", "");
  v.edit_expectations = j.value("edit_expectations", "");
}

void to_json(json& j, const Goal& v) {
  j = json{{"id", v.id},
           {"text", v.text},
           {"origin", enum_str(to_string(v.origin))},
           {"audience_tailored", v.audience_tailored},
           {"selected", v.selected}};
}

void from_json(const json& j, Goal& v) {
  v.id = j.at("id").get<std::string>();
  v.text = j.at("text").get<std::string>();
  v.origin = parse_enum(j.at("origin").get<std::string>(), kGoalOrigins, "goal origin");
  v.audience_tailored = j.value("audience_tailored", false);
  v.selected = j.value("selected", false);
}

void to_json(json& j, const SentenceSpan& v) {
  j = json{{"text", v.text}, {"start", v.start}, {"end", v.end}};
}

void from_json(const json& j, SentenceSpan& v) {
  v.text = j.at("text").get<std::string>();
  v.start = j.at("start").get<std::size_t>();
  v.end = j.at("end").get<std::size_t>();
}

void to_json(json& j, const Draft& v) {
  j = json{{"content", v.content}, {"version", v.version}, {"sentence_index", v.sentence_index}};
}

void from_json(const json& j, Draft& v) {
  v.content = j.at("content").get<std::string>();
  v.version = j.at("version").get<int>();
  v.sentence_index = j.at("sentence_index").get<std::vector<SentenceSpan>>();
  for (const auto& s : v.sentence_index) {
    if (s.start > s.end || s.end > v.content.size()) {
      throw PreconditionError("sentence_index offsets out of range in draft version " +
                              std::to_string(v.version));
    }
  }
}

void to_json(json& j, const TextAnchor& v) {
  j = json{{"quoted_sentence", v.quoted_sentence},
           {"draft_version", v.draft_version},
           {"confidence", v.confidence},
           {"insertion_point", v.insertion_point},
           {"resolution", enum_str(to_string(v.resolution))}};
  put_optional(j, "start", v.start);
  put_optional(j, "end", v.end);
}

void from_json(const json& j, TextAnchor& v) {
  v.quoted_sentence = j.at("quoted_sentence").get<std::string>();
  v.draft_version = j.at("draft_version").get<int>();
  v.confidence = j.at("confidence").get<double>();
  v.insertion_point = j.value("insertion_point", false);
  v.resolution = parse_enum(j.at("resolution").get<std::string>(), kResolutions, "anchor resolution");
  get_optional(j, "start", v.start);
  get_optional(j, "end", v.end);
}

void to_json(json& j, const ChatTurn& v) {
  j = json{{"role", enum_str(to_string(v.role))},
           {"text", v.text},
           {"timestamp", format_instant(v.timestamp)},
           {"violation_flags", v.violation_flags}};
  put_optional(j, "cited", v.cited);
}

void from_json(const json& j, ChatTurn& v) {
  v.role = parse_enum(j.at("role").get<std::string>(), kRoles, "chat role");
  v.text = j.at("text").get<std::string>();
  v.timestamp = parse_instant(j.at("timestamp").get<std::string>());
  v.violation_flags = j.value("violation_flags", std::vector<std::string>{});
  get_optional(j, "cited", v.cited);
}

void to_json(json& j, const FeedbackCard& v) {
  j = json{{"id", v.id},
           {"kind", enum_str(to_string(v.kind))},
           {"source", enum_str(to_string(v.source))},
           {"anchor", v.anchor},
           {"feedback_text", v.feedback_text},
           {"status", enum_str(to_string(v.status))},
           {"chat", v.chat},
           {"violation_flags", v.violation_flags}};
  put_optional(j, "hoc_label", v.hoc_label);
  if (v.hoc_category) j["hoc_category"] = enum_str(to_string(*v.hoc_category));
  put_optional(j, "reason", v.reason);
  if (v.feedback_type) j["feedback_type"] = enum_str(to_string(*v.feedback_type));
}

void from_json(const json& j, FeedbackCard& v) {
  v.id = j.at("id").get<std::string>();
  v.kind = parse_card_kind(j.at("kind").get<std::string>());
  v.source = parse_enum(j.value("source", "pipeline"), kSources, "card source");
  v.anchor = j.at("anchor").get<TextAnchor>();
  v.feedback_text = j.at("feedback_text").get<std::string>();
  v.status = parse_enum(j.value("status", "open"), kStatuses, "card status");
  v.chat = j.value("chat", std::vector<ChatTurn>{});
  v.violation_flags = j.value("violation_flags", std::vector<std::string>{});
  get_optional(j, "hoc_label", v.hoc_label);
  if (auto it = j.find("hoc_category"); it != j.end() && !it->is_null()) {
    v.hoc_category = parse_hoc_category(it->get<std::string>());
  } else {
    v.hoc_category.reset();
  }
  get_optional(j, "reason", v.reason);
  if (auto it = j.find("feedback_type"); it != j.end() && !it->is_null()) {
    v.feedback_type = parse_feedback_type(it->get<std::string>());
  } else {
    v.feedback_type.reset();
  }
  if (v.kind == CardKind::praise && (v.feedback_type || v.reason)) {
    throw PreconditionError("praise card " + v.id + " carries a feedback type or reason");
  }
}

void to_json(json& j, const TelemetryEvent& v) {
  j = json{{"name", v.name}, {"payload", v.payload}, {"timestamp", format_instant(v.timestamp)}};
}

void from_json(const json& j, TelemetryEvent& v) {
  v.name = j.at("name").get<std::string>();
  v.payload = j.value("payload", json::object());
  v.timestamp = parse_instant(j.at("timestamp").get<std::string>());
}

json session_to_json(const Session& s) {
  return json{{"schema", kSessionSchemaVersion},
              {"id", s.id},
              {"revision", s.revision},
              {"next_seq", s.next_seq},
              {"created_at", format_instant(s.created_at)},
              {"context", s.context},
              {"goals", s.goals},
              {"drafts", s.drafts},
              {"cards", s.cards},
              {"telemetry", s.telemetry}};
}

Session session_from_json(const json& j) {
  if (!j.is_object()) throw PreconditionError("session document must be a JSON object");
  if (j.value("schema", 0) != kSessionSchemaVersion) {
    throw PreconditionError("unsupported session schema; expected \"schema\": 1");
  }
  try {
    Session s;
    s.id = j.at("id").get<std::string>();
    s.revision = j.value("revision", std::uint64_t{0});
    s.next_seq = j.value("next_seq", std::uint64_t{0});
    s.created_at = parse_instant(j.at("created_at").get<std::string>());
    s.context = j.value("context", AssignmentContext{});
    s.goals = j.value("goals", std::vector<Goal>{});
    s.drafts = j.value("drafts", std::vector<Draft>{});
    s.cards = j.value("cards", std::vector<FeedbackCard>{});
    s.telemetry = j.value("telemetry", std::vector<TelemetryEvent>{});
    for (const auto& card : s.cards) {
      if (s.draft_version(card.anchor.draft_version) == nullptr) {
        throw PreconditionError("card " + card.id + " references missing draft version " +
                                std::to_string(card.anchor.draft_version));
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("malformed session document: ") + e.what());
  }
}

}  // namespace writor
