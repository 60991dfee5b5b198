#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "writor/types.hpp"

namespace writor {

inline constexpr int kSessionSchemaVersion = 1;

std::string format_instant(Instant t);
Instant parse_instant(const std::string& s);

void to_json(nlohmann::json& j, const AssignmentContext& v);
void from_json(const nlohmann::json& j, AssignmentContext& v);
void to_json(nlohmann::json& j, const Goal& v);
void from_json(const nlohmann::json& j, Goal& v);
void to_json(nlohmann::json& j, const SentenceSpan& v);
void from_json(const nlohmann::json& j, SentenceSpan& v);
void to_json(nlohmann::json& j, const Draft& v);
void from_json(const nlohmann::json& j, Draft& v);
void to_json(nlohmann::json& j, const TextAnchor& v);
void from_json(const nlohmann::json& j, TextAnchor& v);
void to_json(nlohmann::json& j, const ChatTurn& v);
void from_json(const nlohmann::json& j, ChatTurn& v);
void to_json(nlohmann::json& j, const FeedbackCard& v);
void from_json(const nlohmann::json& j, FeedbackCard& v);
void to_json(nlohmann::json& j, const TelemetryEvent& v);
void from_json(const nlohmann::json& j, TelemetryEvent& v);

// Full session document, including the "schema": 1 marker. Throws
// PreconditionError on an unknown schema version or malformed document.
nlohmann::json session_to_json(const Session& s);
Session session_from_json(const nlohmann::json& j);

// Parses enum names as written by to_string(); throws PreconditionError.
CardKind parse_card_kind(std::string_view s);
FeedbackType parse_feedback_type(std::string_view s);
HocCategory parse_hoc_category(std::string_view s);

}  // namespace writor
