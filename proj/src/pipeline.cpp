#include "writor/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "writor/anchoring.hpp"
#include "writor/errors.hpp"
#include "writor/text.hpp"

namespace writor {

using nlohmann::json;

namespace {

struct Keyword {
  std::string_view word;
  HocCategory category;
};

// Explicit category names are checked before keywords.
constexpr Keyword kCategoryNames[] = {
    {"thesis/argument", HocCategory::thesis_argument},
    {"audience and purpose", HocCategory::audience_purpose},
    {"audience/purpose", HocCategory::audience_purpose},
    {"organization", HocCategory::organization},
    {"organisation", HocCategory::organization},
    {"development", HocCategory::development},
};

constexpr Keyword kCategoryKeywords[] = {
    {"thesis", HocCategory::thesis_argument},     {"argument", HocCategory::thesis_argument},
    {"claim", HocCategory::thesis_argument},      {"organiz", HocCategory::organization},
    {"structure", HocCategory::organization},     {"flow", HocCategory::organization},
    {"transition", HocCategory::organization},    {"order", HocCategory::organization},
    {"develop", HocCategory::development},        {"evidence", HocCategory::development},
    {"example", HocCategory::development},        {"support", HocCategory::development},
    {"reasoning", HocCategory::development},      {"detail", HocCategory::development},
    {"audience", HocCategory::audience_purpose},  {"purpose", HocCategory::audience_purpose},
    {"reader", HocCategory::audience_purpose},    {"tone", HocCategory::audience_purpose},
};

std::string feedback_type_label(FeedbackType t) {
  return t == FeedbackType::reader_perspective ? "Reader-Perspective Feedback" : "Examples or Analogies";
}

std::string str_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

std::size_t word_overlap(std::string_view a, std::string_view b) {
  auto ta = text::comparison_tokens(a);
  auto tb = text::comparison_tokens(b);
  std::sort(ta.begin(), ta.end());
  ta.erase(std::unique(ta.begin(), ta.end()), ta.end());
  std::size_t n = 0;
  for (const auto& t : ta) {
    if (t.size() > 3 && std::find(tb.begin(), tb.end(), t) != tb.end()) ++n;
  }
  return n;
}

std::size_t trace_concern(const std::string& hoc, const std::string& reason,
                          const std::vector<TopicConcern>& concerns) {
  std::optional<HocCategory> cat = map_hoc_category(hoc);
  if (!cat) cat = map_hoc_category(reason);
  if (cat) {
    for (std::size_t i = 0; i < concerns.size(); ++i) {
      if (concerns[i].category == *cat) return i;
    }
  }
  std::size_t best = 0;
  std::size_t best_overlap = 0;
  for (std::size_t i = 0; i < concerns.size(); ++i) {
    std::size_t o = word_overlap(hoc + " " + reason, concerns[i].issue);
    if (o > best_overlap) {
      best_overlap = o;
      best = i;
    }
  }
  return best;
}

TextAnchor anchor_or_unanchored(const std::string& quoted, const Draft& draft) {
  if (text::trim(quoted).empty()) {
    TextAnchor a;
    a.draft_version = draft.version;
    return a;
  }
  return resolve_anchor(quoted, draft);
}

std::string violation_notice(const ViolationReport& report) {
  std::string out = "\n\nA previous version of this feedback broke these rules:\n";
  for (Violation v : report.flags) {
    out += "- " + std::string(to_string(v));
    if (auto it = report.evidence.find(v); it != report.evidence.end()) out += ": " + it->second;
    out += "\n";
  }
  out += "Write the feedback again so that it follows every rule.";
  return out;
}

DocumentCheck list_size_is(const char* key, std::size_t n) {
  return [key, n](const json& doc) -> std::optional<std::string> {
    std::size_t got = doc.at(key).size();
    if (got == n) return std::nullopt;
    return std::string(key) + " has " + std::to_string(got) + " items, expected " + std::to_string(n);
  };
}

DocumentCheck list_not_empty(const char* key) {
  return [key](const json& doc) -> std::optional<std::string> {
    if (!doc.at(key).empty()) return std::nullopt;
    return std::string(key) + " is empty";
  };
}

std::string numbered(const std::vector<const Goal*>& goals) {
  std::string out;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    if (i > 0) out += "\n";
    out += std::to_string(i + 1) + ". " + goals[i]->text;
  }
  return out;
}

class StageTimer {
 public:
  StageTimer(const EventSink& sink, Stage stage) : sink_(sink), stage_(stage), start_(std::chrono::steady_clock::now()) {}

  void done(std::size_t items) {
    if (!sink_) return;
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
    sink_("stage_completed", json{{"stage", std::string(to_string(stage_))}, {"duration_ms", ms}, {"items", items}});
  }

 private:
  const EventSink& sink_;
  Stage stage_;
  std::chrono::steady_clock::time_point start_;
};

void emit(const EventSink& sink, std::string name, json payload) {
  if (sink) sink(std::move(name), std::move(payload));
}

}  // namespace

std::optional<FeedbackType> map_feedback_type(std::string_view s) {
  std::string lower = text::to_lower_ascii(s);
  if (lower.find("reader") != std::string::npos) return FeedbackType::reader_perspective;
  if (lower.find("exampl") != std::string::npos || lower.find("analog") != std::string::npos) {
    return FeedbackType::example_analogy;
  }
  return std::nullopt;
}

std::optional<HocCategory> map_hoc_category(std::string_view s) {
  std::string lower = text::to_lower_ascii(s);
  for (const auto& k : kCategoryNames) {
    if (lower.find(k.word) != std::string::npos) return k.category;
  }
  std::size_t best_pos = std::string::npos;
  std::optional<HocCategory> best;
  for (const auto& k : kCategoryKeywords) {
    std::size_t pos = lower.find(k.word);
    if (pos < best_pos) {
      best_pos = pos;
      best = k.category;
    }
  }
  return best;
}

bool mentions_insertion(std::string_view reason) {
  std::string lower = text::to_lower_ascii(reason);
  for (std::string_view cue : {"insert", "add a sentence", "adding a sentence", "new sentence", "add a transition",
                               "adding a transition", "missing sentence"}) {
    if (lower.find(cue) != std::string::npos) return true;
  }
  return false;
}

FeedbackPipeline::FeedbackPipeline(Provider& provider, PromptLibrary prompts, GuardrailConfig guardrails,
                                   PipelineOptions options)
    : provider_(provider), prompts_(std::move(prompts)), guardrails_(std::move(guardrails)), options_(std::move(options)) {
  if (options_.repair_attempts < 1) throw PreconditionError("repair_attempts must be at least 1");
}

std::string FeedbackPipeline::assignment_details(const AssignmentContext& context,
                                                 const std::vector<const Goal*>& goals) {
  std::string out = "Assignment prompt: " + context.assignment_prompt + "\n";
  out += "Reader: " + context.reader_description + "\n";
  out += "Edit expectations: " + context.edit_expectations + "\n";
  out += "Writer's goals:\n" + numbered(goals);
  return out;
}

PromptRequest FeedbackPipeline::request(Stage stage, std::string prompt) const {
  PromptRequest r;
  r.stage = stage;
  r.rendered_prompt = std::move(prompt);
  r.params = options_.params;
  if (auto it = options_.stage_max_tokens.find(stage); it != options_.stage_max_tokens.end()) {
    r.params.max_output_tokens = it->second;
  }
  return r;
}

RepairResult FeedbackPipeline::call(Stage stage, std::string prompt, const DocumentCheck& check) {
  return complete_with_repair(provider_, request(stage, std::move(prompt)), options_.repair_attempts, check);
}

std::vector<Goal> FeedbackPipeline::generate_goals(Session& session) {
  const AssignmentContext& ctx = session.context;
  if (text::trim(ctx.assignment_prompt).empty()) {
    throw PreconditionError("assignment_prompt must be set before goals can be suggested");
  }
  std::string prompt = prompts_.render(Stage::goals, {{"assignment_prompt", ctx.assignment_prompt},
                                                      {"edit_expectations", ctx.edit_expectations},
                                                      {"reader", ctx.reader_description}});
  json doc = call(Stage::goals, std::move(prompt)).document;
  std::vector<Goal> goals;
  const auto& list = doc.at("goals");
  for (std::size_t i = 0; i < list.size(); ++i) {
    Goal g;
    g.id = session.next_id("g");
    g.text = list[i].get<std::string>();
    g.origin = GoalOrigin::suggested;
    g.audience_tailored = i + 1 == kGoalCount;
    goals.push_back(std::move(g));
  }
  return goals;
}

std::vector<TopicConcern> FeedbackPipeline::identify_topics(const std::vector<const Goal*>& selected,
                                                            const EventSink& events) {
  if (selected.empty()) throw PreconditionError("at least one goal must be selected");
  StageTimer timer(events, Stage::topics);
  std::string prompt = prompts_.render(Stage::topics, {{"assignment_goals", numbered(selected)}});
  json doc = call(Stage::topics, std::move(prompt)).document;
  std::vector<TopicConcern> concerns;
  for (const auto& item : doc.at("HOCs")) {
    TopicConcern c;
    c.issue = str_field(item, "Issue");
    std::optional<HocCategory> cat = map_hoc_category(str_field(item, "Category"));
    if (!cat) cat = map_hoc_category(str_field(item, "HOC"));
    if (!cat) cat = map_hoc_category(c.issue);
    c.category = cat.value_or(HocCategory::development);
    concerns.push_back(std::move(c));
  }
  if (concerns.size() > kMaxTopics) {
    emit(events, "topics_truncated", json{{"returned", concerns.size()}, {"kept", kMaxTopics}});
    concerns.resize(kMaxTopics);
  }
  timer.done(concerns.size());
  return concerns;
}

std::vector<SentenceIssue> FeedbackPipeline::locate_sentences(const std::vector<TopicConcern>& concerns,
                                                              const Draft& draft, const EventSink& events) {
  if (concerns.empty()) throw PreconditionError("sentence analysis needs at least one concern");
  if (draft.empty()) throw PreconditionError("draft is empty");
  StageTimer timer(events, Stage::sentences);
  json topic_results{{"HOCs", json::array()}};
  for (const auto& c : concerns) {
    topic_results["HOCs"].push_back(json{{"Issue", c.issue}, {"Category", std::string(display_name(c.category))}});
  }
  std::string prompt =
      prompts_.render(Stage::sentences, {{"topic_results", topic_results.dump(4)}, {"essay", draft.content}});
  json doc = call(Stage::sentences, std::move(prompt)).document;
  std::vector<SentenceIssue> issues;
  for (const auto& item : doc.at("Sentences")) {
    SentenceIssue s;
    s.sentence = str_field(item, "Sentence");
    s.hoc = str_field(item, "HOC");
    s.reason = str_field(item, "Reason");
    s.concern_index = trace_concern(s.hoc, s.reason, concerns);
    s.insertion_point = mentions_insertion(s.reason);
    issues.push_back(std::move(s));
  }
  if (issues.size() > kMaxSentenceIssues) {
    emit(events, "sentences_truncated", json{{"returned", issues.size()}, {"kept", kMaxSentenceIssues}});
    issues.resize(kMaxSentenceIssues);
  }
  timer.done(issues.size());
  return issues;
}

std::vector<TypedIssue> FeedbackPipeline::select_feedback_type(const std::vector<SentenceIssue>& issues,
                                                               const Draft& draft) {
  if (issues.empty()) throw PreconditionError("feedback type selection needs at least one issue");
  json sentence_results{{"Sentences", json::array()}};
  for (const auto& s : issues) {
    sentence_results["Sentences"].push_back(json{{"Sentence", s.sentence}, {"HOC", s.hoc}, {"Reason", s.reason}});
  }
  std::string prompt = prompts_.render(Stage::feedback_type,
                                       {{"sentence_results", sentence_results.dump(4)}, {"essay", draft.content}});
  json doc = call(Stage::feedback_type, std::move(prompt), list_size_is("Feedback_type", issues.size())).document;
  std::vector<TypedIssue> typed;
  const auto& list = doc.at("Feedback_type");
  for (std::size_t i = 0; i < issues.size(); ++i) {
    std::string label = str_field(list[i], "FeedbackType");
    auto type = map_feedback_type(label);
    if (!type) throw StageError("feedback_type", "unmappable feedback type '" + label + "'");
    typed.push_back(TypedIssue{issues[i], *type});
  }
  return typed;
}

std::vector<FeedbackCard> FeedbackPipeline::generate_critiques(const std::vector<TypedIssue>& typed,
                                                               const std::vector<TopicConcern>& concerns,
                                                               const Draft& draft, Session& session,
                                                               const EventSink& events) {
  if (typed.empty()) throw PreconditionError("critique generation needs at least one typed issue");
  StageTimer timer(events, Stage::final_feedback);
  const std::string details = assignment_details(session.context, session.selected_goals());

  auto type_results = [&](std::size_t begin, std::size_t end) {
    json out{{"Feedback_type", json::array()}};
    for (std::size_t i = begin; i < end; ++i) {
      const auto& t = typed[i];
      out["Feedback_type"].push_back(json{{"Sentence", t.issue.sentence},
                                          {"HOC", t.issue.hoc},
                                          {"Reason", t.issue.reason},
                                          {"FeedbackType", feedback_type_label(t.feedback_type)}});
    }
    return out.dump(4);
  };
  auto render = [&](std::size_t begin, std::size_t end) {
    return prompts_.render(Stage::final_feedback, {{"type_results", type_results(begin, end)},
                                                   {"essay", draft.content},
                                                   {"assignment_details", details}});
  };

  json doc = call(Stage::final_feedback, render(0, typed.size()), list_size_is("Feedback", typed.size())).document;
  const auto& list = doc.at("Feedback");

  std::vector<FeedbackCard> cards;
  for (std::size_t i = 0; i < typed.size(); ++i) {
    const TypedIssue& t = typed[i];
    FeedbackCard card;
    card.id = session.next_id("c");
    card.kind = CardKind::critique;
    card.source = CardSource::pipeline;
    card.hoc_label = str_field(list[i], "HOC");
    if (t.issue.concern_index < concerns.size()) card.hoc_category = concerns[t.issue.concern_index].category;
    card.anchor = anchor_or_unanchored(t.issue.sentence, draft);
    card.anchor.insertion_point = t.issue.insertion_point;
    card.reason = t.issue.reason;
    card.feedback_type = t.feedback_type;
    card.feedback_text = str_field(list[i], "Feedback");

    ViolationReport report = validate_card(card, draft.content, guardrails_);
    if (!report.clean()) {
      json again = call(Stage::final_feedback, render(i, i + 1) + violation_notice(report), list_not_empty("Feedback"))
                       .document;
      const auto& item = again.at("Feedback").at(0);
      card.feedback_text = str_field(item, "Feedback");
      card.hoc_label = str_field(item, "HOC");
      ViolationReport after = validate_card(card, draft.content, guardrails_);
      emit(events, "critique_regenerated",
           json{{"card", card.id}, {"flags_before", report.labels()}, {"flags_after", after.labels()}});
      report = std::move(after);
    }
    card.violation_flags = report.labels();
    cards.push_back(std::move(card));
  }
  timer.done(cards.size());
  return cards;
}

std::vector<FeedbackCard> FeedbackPipeline::generate_praise(const Draft& draft, Session& session,
                                                            const EventSink& events) {
  if (draft.empty()) throw PreconditionError("draft is empty");
  StageTimer timer(events, Stage::praise);
  const std::string base_prompt = prompts_.render(Stage::praise, {{"essay", draft.content}});
  json doc = call(Stage::praise, base_prompt).document;
  json list = doc.at("Encouragement");
  if (list.size() > kMaxPraises) {
    emit(events, "praise_truncated", json{{"returned", list.size()}, {"kept", kMaxPraises}});
    list.erase(list.begin() + static_cast<std::ptrdiff_t>(kMaxPraises), list.end());
  }
  std::vector<FeedbackCard> cards;
  for (const auto& item : list) {
    FeedbackCard card;
    card.id = session.next_id("c");
    card.kind = CardKind::praise;
    card.source = CardSource::pipeline;
    card.hoc_label = str_field(item, "Category");
    std::string sentence = str_field(item, "Sentence");
    card.anchor = anchor_or_unanchored(sentence, draft);
    card.feedback_text = str_field(item, "Feedback");

    ViolationReport report = validate_card(card, draft.content, guardrails_);
    if (!report.clean()) {
      std::string retry = base_prompt + "\n\nOnly revise the entry for this sentence: \"" + sentence + "\"" +
                          violation_notice(report) + " Return exactly one item in the Encouragement list.";
      json again = call(Stage::praise, std::move(retry), list_not_empty("Encouragement")).document;
      const auto& fixed = again.at("Encouragement").at(0);
      card.feedback_text = str_field(fixed, "Feedback");
      card.hoc_label = str_field(fixed, "Category");
      ViolationReport after = validate_card(card, draft.content, guardrails_);
      emit(events, "praise_regenerated",
           json{{"card", card.id}, {"flags_before", report.labels()}, {"flags_after", after.labels()}});
      report = std::move(after);
    }
    card.violation_flags = report.labels();
    cards.push_back(std::move(card));
  }
  timer.done(cards.size());
  return cards;
}

std::vector<FeedbackCard> FeedbackPipeline::run_full_pipeline(Session& session) {
  auto selected = session.selected_goals();
  if (selected.empty()) throw PreconditionError("select at least one goal before requesting feedback");
  const Draft* draft_ptr = session.current_draft();
  if (draft_ptr == nullptr || draft_ptr->empty()) throw PreconditionError("submit a draft before requesting feedback");
  const Draft draft = *draft_ptr;

  EventSink events = [&session](std::string name, json payload) {
    session.record(std::move(name), std::move(payload));
  };
  Stage current = Stage::topics;
  try {
    std::vector<FeedbackCard> critiques;
    auto concerns = identify_topics(selected, events);
    if (!concerns.empty()) {
      current = Stage::sentences;
      auto issues = locate_sentences(concerns, draft, events);
      if (!issues.empty()) {
        current = Stage::feedback_type;
        auto typed = select_feedback_type(issues, draft);
        current = Stage::final_feedback;
        critiques = generate_critiques(typed, concerns, draft, session, events);
      }
    }
    current = Stage::praise;
    auto praises = generate_praise(draft, session, events);

    std::vector<FeedbackCard> result = std::move(critiques);
    result.insert(result.end(), std::make_move_iterator(praises.begin()), std::make_move_iterator(praises.end()));
    std::erase_if(session.cards, [](const FeedbackCard& c) { return c.source == CardSource::pipeline; });
    session.cards.insert(session.cards.end(), result.begin(), result.end());
    session.record("pipeline_completed", json{{"critiques", result.size() - praises.size()},
                                              {"praises", praises.size()},
                                              {"draft_version", draft.version}});
    return result;
  } catch (const std::exception& e) {
    session.record("pipeline_failed", json{{"stage", std::string(to_string(current))}, {"error", e.what()}});
    throw;
  }
}

namespace {

std::string card_context(const FeedbackCard& card) {
  std::string out;
  if (card.hoc_label && !card.hoc_label->empty()) out += "Topic: " + *card.hoc_label + "\n";
  out += "Sentence: " + card.anchor.quoted_sentence + "\n";
  if (card.feedback_type) out += "Feedback type: " + feedback_type_label(*card.feedback_type) + "\n";
  out += "Feedback: " + card.feedback_text;
  return out;
}

std::string chat_history(const FeedbackCard& card) {
  if (card.chat.empty()) return "(no previous messages)";
  std::string out;
  for (const auto& turn : card.chat) {
    if (!out.empty()) out += "\n";
    out += (turn.role == ChatRole::writer ? "Writer: " : "Tutor: ") + turn.text;
  }
  return out;
}

FeedbackCard& critique_card(Session& session, std::string_view card_id) {
  FeedbackCard* card = session.find_card(card_id);
  if (card == nullptr) throw NotFoundError("no card " + std::string(card_id));
  if (card->kind != CardKind::critique) throw PreconditionError("card " + std::string(card_id) + " is not a critique");
  return *card;
}

const Draft& require_draft(const Session& session) {
  const Draft* d = session.current_draft();
  if (d == nullptr) throw PreconditionError("session has no draft");
  return *d;
}

}  // namespace

ChatTurn FeedbackPipeline::chat_on_card(Session& session, std::string_view card_id, std::string_view message) {
  FeedbackCard& card = critique_card(session, card_id);
  if (text::trim(message).empty()) throw PreconditionError("chat message is empty");
  const Draft& draft = require_draft(session);
  std::string prompt = prompts_.render(Stage::chat, {{"essay", draft.content},
                                                     {"assignment_details", assignment_details(session.context, session.selected_goals())},
                                                     {"card_context", card_context(card)},
                                                     {"chat_history", chat_history(card)},
                                                     {"message", std::string(message)}});
  json doc = call(Stage::chat, std::move(prompt)).document;

  ChatTurn writer{ChatRole::writer, std::string(message), now(), {}, std::nullopt};
  ChatTurn reply;
  reply.role = ChatRole::system_feedback;
  reply.text = str_field(doc, "Response");
  reply.timestamp = now();
  reply.violation_flags = validate_chat_text(reply.text, draft.content, guardrails_).labels();
  card.chat.push_back(std::move(writer));
  card.chat.push_back(reply);
  session.record("chat_sent", json{{"card", card.id}, {"violation_flags", reply.violation_flags}});
  return reply;
}

ChatTurn FeedbackPipeline::find_example(Session& session, std::string_view card_id) {
  FeedbackCard& card = critique_card(session, card_id);
  const Draft& draft = require_draft(session);
  std::string prompt = prompts_.render(Stage::find_example,
                                       {{"card_context", card_context(card)},
                                        {"essay", draft.content},
                                        {"assignment_details", assignment_details(session.context, session.selected_goals())}});
  json doc = call(Stage::find_example, std::move(prompt)).document;

  ChatTurn reply;
  reply.role = ChatRole::system_feedback;
  reply.text = str_field(doc, "Response");
  reply.timestamp = now();
  std::string cited = str_field(doc, "Sentence");
  if (!text::trim(cited).empty()) {
    TextAnchor a = resolve_anchor(cited, draft);
    if (a.anchored()) reply.cited = std::move(a);
  }
  reply.violation_flags = validate_chat_text(reply.text, draft.content, guardrails_).labels();

  card.chat.push_back(ChatTurn{ChatRole::writer, "Find an example in my draft for this feedback.", now(), {}, std::nullopt});
  card.chat.push_back(reply);
  session.record("example_requested", json{{"card", card.id},
                                           {"in_draft", reply.cited.has_value()},
                                           {"violation_flags", reply.violation_flags}});
  return reply;
}

FeedbackCard FeedbackPipeline::targeted_feedback(Session& session, std::size_t start, std::size_t end,
                                                 std::string_view question) {
  const Draft& draft = require_draft(session);
  TextAnchor anchor = anchor_span(draft, start, end);
  const std::string details = assignment_details(session.context, session.selected_goals());
  const std::string q = text::trim(question).empty() ? std::string("(none)") : std::string(question);
  const std::string prompt = prompts_.render(Stage::targeted, {{"selected_text", anchor.quoted_sentence},
                                                               {"question", q},
                                                               {"essay", draft.content},
                                                               {"assignment_details", details}});
  auto build = [&](const json& doc) {
    FeedbackCard card;
    card.kind = CardKind::critique;
    card.source = CardSource::targeted;
    card.anchor = anchor;
    card.hoc_label = str_field(doc, "HOC");
    card.hoc_category = map_hoc_category(*card.hoc_label);
    card.feedback_type = map_feedback_type(str_field(doc, "FeedbackType"));
    card.feedback_text = str_field(doc, "Feedback");
    return card;
  };
  FeedbackCard card = build(call(Stage::targeted, prompt).document);
  ViolationReport report = validate_card(card, draft.content, guardrails_);
  if (!report.clean()) {
    card = build(call(Stage::targeted, prompt + violation_notice(report)).document);
    report = validate_card(card, draft.content, guardrails_);
  }
  card.id = session.next_id("c");
  card.violation_flags = report.labels();
  session.cards.push_back(card);
  session.record("targeted_requested", json{{"card", card.id},
                                            {"start", start},
                                            {"end", end},
                                            {"has_question", q != "(none)"}});
  return card;
}

std::vector<FeedbackCard> FeedbackPipeline::baseline_feedback(const AssignmentContext& context,
                                                              const std::vector<const Goal*>& goals,
                                                              const Draft& draft, Session* id_source) {
  if (draft.empty()) throw PreconditionError("draft is empty");
  std::string prompt = prompts_.render(
      Stage::baseline, {{"assignment_details", assignment_details(context, goals)}, {"essay", draft.content}});
  json doc = call(Stage::baseline, std::move(prompt)).document;
  std::vector<FeedbackCard> cards;
  std::size_t seq = 0;
  auto add = [&](const json& item, CardKind kind) {
    FeedbackCard card;
    card.id = id_source != nullptr ? id_source->next_id("b") : "b" + std::to_string(++seq);
    card.kind = kind;
    card.source = CardSource::baseline;
    card.anchor = anchor_or_unanchored(str_field(item, "Sentence"), draft);
    card.feedback_text = str_field(item, "Feedback");
    card.violation_flags = validate_card(card, draft.content, guardrails_).labels();
    cards.push_back(std::move(card));
  };
  for (const auto& item : doc.at("Praise")) add(item, CardKind::praise);
  for (const auto& item : doc.at("Critiques")) add(item, CardKind::critique);
  return cards;
}

}  // namespace writor
