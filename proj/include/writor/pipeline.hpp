#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "writor/guardrails.hpp"
#include "writor/prompts.hpp"
#include "writor/provider.hpp"
#include "writor/types.hpp"

namespace writor {

inline constexpr std::size_t kGoalCount = 5;
inline constexpr std::size_t kMaxTopics = 4;
inline constexpr std::size_t kMaxSentenceIssues = 5;
inline constexpr std::size_t kMaxPraises = 3;
inline constexpr std::size_t kBaselinePraises = 3;
inline constexpr std::size_t kBaselineCritiques = 5;

struct TopicConcern {
  std::string issue;
  HocCategory category = HocCategory::development;

  bool operator==(const TopicConcern&) const = default;
};

struct SentenceIssue {
  std::string sentence;
  std::string hoc;  // as written by the model
  std::string reason;
  std::size_t concern_index = 0;  // which stage-1 concern this traces to
  bool insertion_point = false;

  bool operator==(const SentenceIssue&) const = default;
};

struct TypedIssue {
  SentenceIssue issue;
  FeedbackType feedback_type = FeedbackType::reader_perspective;

  bool operator==(const TypedIssue&) const = default;
};

// Maps a model's feedback-type string by case-insensitive containment;
// nullopt when it names neither type.
std::optional<FeedbackType> map_feedback_type(std::string_view s);

// Maps a concern category from a label such as "Thesis/Argument" or from
// keywords in free text; nullopt when nothing matches.
std::optional<HocCategory> map_hoc_category(std::string_view s);

// True when a stage-2 reason asks for material to be inserted after the
// quoted sentence.
bool mentions_insertion(std::string_view reason);

struct PipelineOptions {
  ModelParams params;
  std::map<Stage, int> stage_max_tokens;
  int repair_attempts = 2;
};

using EventSink = std::function<void(std::string name, nlohmann::json payload)>;

// Goal generation, the four-stage critique chain, praise, per-card chat,
// Find Example, targeted feedback, and the single-prompt baseline. Stateless
// apart from its collaborators; one instance may serve many sessions.
class FeedbackPipeline {
 public:
  FeedbackPipeline(Provider& provider, PromptLibrary prompts = PromptLibrary::defaults(),
                   GuardrailConfig guardrails = GuardrailConfig::defaults(),
                   PipelineOptions options = {});

  const GuardrailConfig& guardrails() const { return guardrails_; }
  const PromptLibrary& prompts() const { return prompts_; }

  // Five suggested goals; the fifth is audience-tailored. Ids come from the
  // session counter.
  std::vector<Goal> generate_goals(Session& session);

  std::vector<TopicConcern> identify_topics(const std::vector<const Goal*>& selected,
                                            const EventSink& events = {});
  std::vector<SentenceIssue> locate_sentences(const std::vector<TopicConcern>& concerns,
                                              const Draft& draft, const EventSink& events = {});
  std::vector<TypedIssue> select_feedback_type(const std::vector<SentenceIssue>& issues,
                                               const Draft& draft);
  std::vector<FeedbackCard> generate_critiques(const std::vector<TypedIssue>& typed,
                                               const std::vector<TopicConcern>& concerns,
                                               const Draft& draft, Session& session,
                                               const EventSink& events = {});
  std::vector<FeedbackCard> generate_praise(const Draft& draft, Session& session,
                                            const EventSink& events = {});

  // Runs every stage, replaces the session's pipeline cards with the result
  // and appends per-stage telemetry. On a stage error the session keeps the
  // telemetry recorded so far and the exception propagates.
  std::vector<FeedbackCard> run_full_pipeline(Session& session);

  ChatTurn chat_on_card(Session& session, std::string_view card_id, std::string_view message);
  ChatTurn find_example(Session& session, std::string_view card_id);
  FeedbackCard targeted_feedback(Session& session, std::size_t start, std::size_t end,
                                 std::string_view question = {});

  // Single prompt; 3 praise and 5 critique cards with no label, type or
  // reason. Flags are computed but nothing is regenerated.
  std::vector<FeedbackCard> baseline_feedback(const AssignmentContext& context,
                                              const std::vector<const Goal*>& goals,
                                              const Draft& draft, Session* id_source = nullptr);

  static std::string assignment_details(const AssignmentContext& context,
                                        const std::vector<const Goal*>& goals);

 private:
  PromptRequest request(Stage stage, std::string prompt) const;
  RepairResult call(Stage stage, std::string prompt, const DocumentCheck& check = {});

  Provider& provider_;
  PromptLibrary prompts_;
  GuardrailConfig guardrails_;
  PipelineOptions options_;
};

}  // namespace writor
