#include "writor/types.hpp"

#include <algorithm>

#include "writor/sentences.hpp"
#include "writor/text.hpp"

namespace writor {

Instant now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

Draft Draft::make(std::string content, int version) {
  Draft d;
  d.sentence_index = split_sentences(content);
  d.content = std::move(content);
  d.version = version;
  return d;
}

bool Draft::empty() const { return text::trim(content).empty(); }

const Draft* Session::current_draft() const {
  return drafts.empty() ? nullptr : &drafts.back();
}

const Draft* Session::draft_version(int version) const {
  auto it = std::find_if(drafts.begin(), drafts.end(),
                         [&](const Draft& d) { return d.version == version; });
  return it == drafts.end() ? nullptr : &*it;
}

std::vector<const Goal*> Session::selected_goals() const {
  std::vector<const Goal*> out;
  for (const auto& g : goals) {
    if (g.selected) out.push_back(&g);
  }
  return out;
}

FeedbackCard* Session::find_card(std::string_view card_id) {
  auto it = std::find_if(cards.begin(), cards.end(),
                         [&](const FeedbackCard& c) { return c.id == card_id; });
  return it == cards.end() ? nullptr : &*it;
}

const FeedbackCard* Session::find_card(std::string_view card_id) const {
  return const_cast<Session*>(this)->find_card(card_id);
}

std::string Session::next_id(std::string_view prefix) {
  return std::string(prefix) + std::to_string(++next_seq);
}

void Session::record(std::string name, nlohmann::json payload, Instant at) {
  telemetry.push_back(TelemetryEvent{std::move(name), std::move(payload), at});
}

std::string_view to_string(GoalOrigin v) {
  return v == GoalOrigin::suggested ? "suggested" : "custom";
}

std::string_view to_string(CardKind v) {
  return v == CardKind::critique ? "critique" : "praise";
}

std::string_view to_string(FeedbackType v) {
  return v == FeedbackType::reader_perspective ? "reader_perspective" : "example_analogy";
}

std::string_view to_string(CardStatus v) {
  return v == CardStatus::open ? "open" : "addressed";
}

std::string_view to_string(AnchorResolution v) {
  switch (v) {
    case AnchorResolution::exact: return "exact";
    case AnchorResolution::normalized: return "normalized";
    case AnchorResolution::fuzzy: return "fuzzy";
    case AnchorResolution::unanchored: return "unanchored";
  }
  return "unanchored";
}

std::string_view to_string(HocCategory v) {
  switch (v) {
    case HocCategory::thesis_argument: return "thesis_argument";
    case HocCategory::organization: return "organization";
    case HocCategory::development: return "development";
    case HocCategory::audience_purpose: return "audience_purpose";
  }
  return "development";
}

std::string_view display_name(HocCategory v) {
  switch (v) {
    case HocCategory::thesis_argument: return "Thesis/Argument";
    case HocCategory::organization: return "Organization";
    case HocCategory::development: return "Development";
    case HocCategory::audience_purpose: return "Audience and Purpose";
  }
  return "Development";
}

std::string_view to_string(ChatRole v) {
  return v == ChatRole::writer ? "writer" : "system_feedback";
}

std::string_view to_string(CardSource v) {
  switch (v) {
    case CardSource::pipeline: return "pipeline";
    case CardSource::targeted: return "targeted";
    case CardSource::baseline: return "baseline";
  }
  return "pipeline";
}

}  // namespace writor
