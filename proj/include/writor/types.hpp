#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace writor {

using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

Instant now();

struct AssignmentContext {
  std::string reader_description;
  std::string assignment_prompt;
  std::string edit_expectations;

  bool operator==(const AssignmentContext&) const = default;
};

enum class GoalOrigin { suggested, custom };

struct Goal {
  std::string id;
  std::string text;
  GoalOrigin origin = GoalOrigin::suggested;
  bool audience_tailored = false;
  bool selected = false;

  bool operator==(const Goal&) const = default;
};

// Half-open byte range [start, end) into Draft::content.
struct SentenceSpan {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const SentenceSpan&) const = default;
};

struct Draft {
  std::string content;
  int version = 0;
  std::vector<SentenceSpan> sentence_index;

  // Builds a draft and its sentence index.
  static Draft make(std::string content, int version);

  bool empty() const;
  bool operator==(const Draft&) const = default;
};

enum class CardKind { critique, praise };
enum class FeedbackType { reader_perspective, example_analogy };
enum class CardStatus { open, addressed };
enum class AnchorResolution { exact, normalized, fuzzy, unanchored };
enum class HocCategory { thesis_argument, organization, development, audience_purpose };

struct TextAnchor {
  std::string quoted_sentence;
  std::optional<std::size_t> start;
  std::optional<std::size_t> end;
  int draft_version = 0;
  double confidence = 0.0;
  bool insertion_point = false;
  AnchorResolution resolution = AnchorResolution::unanchored;

  bool anchored() const { return resolution != AnchorResolution::unanchored; }
  bool operator==(const TextAnchor&) const = default;
};

enum class ChatRole { writer, system_feedback };

struct ChatTurn {
  ChatRole role = ChatRole::writer;
  std::string text;
  Instant timestamp{};
  std::vector<std::string> violation_flags;
  // Find Example responses that point into the writer's own draft.
  std::optional<TextAnchor> cited;

  bool operator==(const ChatTurn&) const = default;
};

// Where a card came from; baseline cards only exist inside audits.
enum class CardSource { pipeline, targeted, baseline };

struct FeedbackCard {
  std::string id;
  CardKind kind = CardKind::critique;
  CardSource source = CardSource::pipeline;
  std::optional<std::string> hoc_label;
  std::optional<HocCategory> hoc_category;
  TextAnchor anchor;
  std::optional<std::string> reason;
  std::optional<FeedbackType> feedback_type;
  std::string feedback_text;
  CardStatus status = CardStatus::open;
  std::vector<ChatTurn> chat;
  std::vector<std::string> violation_flags;

  bool operator==(const FeedbackCard&) const = default;
};

struct TelemetryEvent {
  std::string name;
  nlohmann::json payload = nlohmann::json::object();
  Instant timestamp{};

  bool operator==(const TelemetryEvent&) const = default;
};

struct Session {
  std::string id;
  AssignmentContext context;
  std::vector<Goal> goals;
  std::vector<Draft> drafts;  // version history, oldest first
  std::vector<FeedbackCard> cards;
  std::vector<TelemetryEvent> telemetry;
  Instant created_at{};
  std::uint64_t revision = 0;  // store revision for compare-and-swap
  std::uint64_t next_seq = 0;  // source of session-scoped goal/card ids

  const Draft* current_draft() const;
  bool has_draft() const { return current_draft() != nullptr; }
  const Draft* draft_version(int version) const;

  std::vector<const Goal*> selected_goals() const;
  FeedbackCard* find_card(std::string_view card_id);
  const FeedbackCard* find_card(std::string_view card_id) const;

  std::string next_id(std::string_view prefix);
  void record(std::string name, nlohmann::json payload = nlohmann::json::object(),
              Instant at = now());

  bool operator==(const Session&) const = default;
};

std::string_view to_string(GoalOrigin v);
std::string_view to_string(CardKind v);
std::string_view to_string(FeedbackType v);
std::string_view to_string(CardStatus v);
std::string_view to_string(AnchorResolution v);
std::string_view to_string(HocCategory v);
std::string_view to_string(ChatRole v);
std::string_view to_string(CardSource v);

// Display name used in prompts and reports, e.g. "Thesis/Argument".
std::string_view display_name(HocCategory v);

}  // namespace writor
