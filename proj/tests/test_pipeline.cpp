#include <gtest/gtest.h>

#include <array>
#include <random>
#include <set>

#include "test_support.hpp"
#include "writor/errors.hpp"
#include "writor/pipeline.hpp"

using namespace writor;
using nlohmann::json;

namespace {

const char* kEssay =
    "Schools should start later. Teenagers who sleep more learn more. "
    "A later bell would also cut car accidents. Some parents worry about sports practice.";

Session session_with_draft() {
  Session s;
  s.id = "p";
  s.context = {"A school board member.", "Argue for a policy change in your town.", "Strengthen the evidence."};
  for (const char* text : {"Support each claim with evidence.", "Use smooth transitions between ideas."}) {
    Goal g;
    g.id = s.next_id("g");
    g.text = text;
    g.origin = GoalOrigin::custom;
    g.selected = true;
    s.goals.push_back(g);
  }
  s.drafts.push_back(Draft::make(kEssay, 1));
  return s;
}

std::string topics(std::vector<std::pair<std::string, std::string>> items) {
  json j{{"HOCs", json::array()}};
  for (auto& [issue, cat] : items) j["HOCs"].push_back(json{{"Issue", issue}, {"Category", cat}});
  return j.dump();
}

std::string sentences(std::vector<std::array<std::string, 3>> items) {
  json j{{"Sentences", json::array()}};
  for (auto& [s, h, r] : items) j["Sentences"].push_back(json{{"Sentence", s}, {"HOC", h}, {"Reason", r}});
  return j.dump();
}

std::string types(std::vector<std::string> labels) {
  json j{{"Feedback_type", json::array()}};
  for (auto& l : labels) j["Feedback_type"].push_back(json{{"Sentence", "x"}, {"FeedbackType", l}});
  return j.dump();
}

std::string feedback(std::vector<std::pair<std::string, std::string>> items) {
  json j{{"Feedback", json::array()}};
  for (auto& [hoc, fb] : items) j["Feedback"].push_back(json{{"Sentence", "x"}, {"HOC", hoc}, {"Feedback", fb}});
  return j.dump();
}

std::string praise(std::vector<std::array<std::string, 3>> items) {
  json j{{"Encouragement", json::array()}};
  for (auto& [s, f, c] : items) j["Encouragement"].push_back(json{{"Sentence", s}, {"Feedback", f}, {"Category", c}});
  return j.dump();
}

const std::string kGoodQuestion = "From a reader's perspective, how does sleep connect to learning here?";

std::vector<std::string> full_script() {
  return {
      topics({{"The evidence for the sleep claim is thin.", "Development"}, {"Paragraph flow is abrupt.", "Organization"}}),
      sentences({{"Teenagers who sleep more learn more.", "Development", "No evidence is given."},
                 {"A later bell would also cut car accidents.", "Organization",
                  "A transition sentence is missing; insert one after this sentence."}}),
      types({"Reader-Perspective Feedback", "Examples or Analogies"}),
      feedback({{"Development", kGoodQuestion}, {"Organization", "What might a reader need between these two ideas?"}}),
      praise({{"Schools should start later.", "The opening states the position plainly.", "Clear thesis"}}),
  };
}

std::size_t count_events(const Session& s, std::string_view name) {
  return static_cast<std::size_t>(std::count_if(s.telemetry.begin(), s.telemetry.end(),
                                                [&](const TelemetryEvent& e) { return e.name == name; }));
}

}  // namespace

TEST(Mapping, FeedbackType) {
  EXPECT_EQ(map_feedback_type("Reader-Perspective Feedback"), FeedbackType::reader_perspective);
  EXPECT_EQ(map_feedback_type("reader perspective"), FeedbackType::reader_perspective);
  EXPECT_EQ(map_feedback_type("Examples or Analogies"), FeedbackType::example_analogy);
  EXPECT_EQ(map_feedback_type("an analogy"), FeedbackType::example_analogy);
  EXPECT_EQ(map_feedback_type("Direct Rewrite"), std::nullopt);
}

TEST(Mapping, HocCategory) {
  EXPECT_EQ(map_hoc_category("Thesis/Argument"), HocCategory::thesis_argument);
  EXPECT_EQ(map_hoc_category("Audience and Purpose"), HocCategory::audience_purpose);
  EXPECT_EQ(map_hoc_category("ORGANIZATION"), HocCategory::organization);
  EXPECT_EQ(map_hoc_category("The flow between paragraphs"), HocCategory::organization);
  // Earliest keyword wins.
  EXPECT_EQ(map_hoc_category("Evidence that supports the thesis"), HocCategory::development);
  EXPECT_EQ(map_hoc_category("Word choice"), std::nullopt);
}

TEST(Mapping, InsertionCue) {
  EXPECT_TRUE(mentions_insertion("Insert a transition after this sentence."));
  EXPECT_TRUE(mentions_insertion("Consider adding a sentence that explains the data."));
  EXPECT_FALSE(mentions_insertion("This sentence is vague."));
}

TEST(Goals, FiveWithTailoredFifth) {
  json doc{{"goals", {"g one", "g two", "g three", "g four", "g five for the reader"}}};
  MockProvider mock({doc.dump()});
  FeedbackPipeline p(mock);
  Session s = session_with_draft();
  auto goals = p.generate_goals(s);
  ASSERT_EQ(goals.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(goals[i].origin, GoalOrigin::suggested);
    EXPECT_EQ(goals[i].audience_tailored, i == 4);
    EXPECT_FALSE(goals[i].selected);
  }
  EXPECT_EQ(goals[4].text, "g five for the reader");
  EXPECT_NE(goals[0].id, s.goals[0].id);
  auto req = mock.requests().at(0);
  EXPECT_EQ(req.stage, Stage::goals);
  EXPECT_NE(req.rendered_prompt.find(s.context.assignment_prompt), std::string::npos);
  EXPECT_NE(req.rendered_prompt.find(s.context.reader_description), std::string::npos);
  EXPECT_NE(req.rendered_prompt.find(s.context.edit_expectations), std::string::npos);
}

TEST(Goals, EmptyPromptRejectedWithoutCalling) {
  MockProvider mock({"{}"});
  FeedbackPipeline p(mock);
  Session s;
  s.context.assignment_prompt = "  ";
  EXPECT_THROW(p.generate_goals(s), PreconditionError);
  EXPECT_EQ(mock.calls(), 0u);
}

TEST(Goals, WrongCountIsRepaired) {
  json four{{"goals", {"a", "b", "c", "d"}}};
  json five{{"goals", {"a", "b", "c", "d", "e"}}};
  MockProvider mock({"Sure! " + four.dump(), five.dump()});
  FeedbackPipeline p(mock);
  Session s = session_with_draft();
  EXPECT_EQ(p.generate_goals(s).size(), 5u);
  ASSERT_EQ(mock.calls(), 2u);
  EXPECT_TRUE(mock.requests()[1].rendered_prompt.ends_with(kRepairInstruction));
}

TEST(Topics, TruncatesAndMapsCategories) {
  std::string doc = topics({{"Claim unclear", "Thesis/Argument"},
                            {"Jumps between ideas", ""},
                            {"Who is this for?", "Audience/Purpose"},
                            {"Something", ""},
                            {"Fifth", "Organization"},
                            {"Sixth", "Organization"}});
  MockProvider mock({doc});
  FeedbackPipeline p(mock);
  Session s = session_with_draft();
  std::vector<std::pair<std::string, json>> events;
  auto concerns = p.identify_topics(s.selected_goals(), [&](std::string n, json j) { events.emplace_back(n, j); });
  ASSERT_EQ(concerns.size(), kMaxTopics);
  EXPECT_EQ(concerns[0].category, HocCategory::thesis_argument);
  EXPECT_EQ(concerns[1].category, HocCategory::development);  // nothing to go on
  EXPECT_EQ(concerns[2].category, HocCategory::audience_purpose);
  bool truncated = false, timed = false;
  for (auto& [n, j] : events) {
    if (n == "topics_truncated") {
      truncated = true;
      EXPECT_EQ(j["returned"], 6);
      EXPECT_EQ(j["kept"], 4);
    }
    if (n == "stage_completed") {
      timed = true;
      EXPECT_EQ(j["stage"], "topics");
      EXPECT_EQ(j["items"], 4);
    }
  }
  EXPECT_TRUE(truncated);
  EXPECT_TRUE(timed);
  EXPECT_THROW(p.identify_topics({}), PreconditionError);
}

TEST(Sentences, TracesConcernsAndInsertion) {
  MockProvider mock({sentences({{"Teenagers who sleep more learn more.", "Organization", "Add a transition here."},
                                {"Schools should start later.", "", "The thesis claim lacks a reason."}})});
  FeedbackPipeline p(mock);
  Session s = session_with_draft();
  std::vector<TopicConcern> concerns = {{"The claim needs a reason", HocCategory::thesis_argument},
                                        {"Ideas jump around", HocCategory::organization}};
  auto issues = p.locate_sentences(concerns, *s.current_draft());
  ASSERT_EQ(issues.size(), 2u);
  EXPECT_EQ(issues[0].concern_index, 1u);
  EXPECT_TRUE(issues[0].insertion_point);
  EXPECT_EQ(issues[1].concern_index, 0u);  // by word overlap with "claim"
  EXPECT_FALSE(issues[1].insertion_point);
  std::string prompt = mock.requests()[0].rendered_prompt;
  EXPECT_NE(prompt.find("Thesis/Argument"), std::string::npos);
  EXPECT_NE(prompt.find(kEssay), std::string::npos);
}

TEST(Sentences, TruncatesToFive) {
  std::vector<std::array<std::string, 3>> many;
  for (int i = 0; i < 7; ++i) many.push_back({"Schools should start later.", "Development", "r"});
  MockProvider mock({sentences(many)});
  FeedbackPipeline p(mock);
  Session s = session_with_draft();
  EXPECT_EQ(p.locate_sentences({{"x", HocCategory::development}}, *s.current_draft()).size(), kMaxSentenceIssues);
}

TEST(FeedbackType, ArityMismatchRepairedThenFails) {
  std::vector<SentenceIssue> issues(2);
  issues[0].sentence = "a";
  issues[1].sentence = "b";
  Session s = session_with_draft();
  {
    MockProvider mock({types({"Reader-Perspective Feedback"}), types({"Reader perspective", "Examples"})});
    FeedbackPipeline p(mock);
    auto typed = p.select_feedback_type(issues, *s.current_draft());
    ASSERT_EQ(typed.size(), 2u);
    EXPECT_EQ(typed[1].feedback_type, FeedbackType::example_analogy);
    EXPECT_EQ(mock.calls(), 2u);
  }
  {
    MockProvider mock({types({"Rewrite it"})});
    FeedbackPipeline p(mock);
    try {
      p.select_feedback_type(issues, *s.current_draft());
      FAIL();
    } catch (const StageError& e) {
      EXPECT_EQ(e.stage(), "feedback_type");
    }
    EXPECT_EQ(mock.calls(), 2u);  // default repair budget
  }
}

TEST(Critiques, ViolationTriggersOneRegeneration) {
  Session s = session_with_draft();
  std::vector<TopicConcern> concerns = {{"thin evidence", HocCategory::development}};
  TypedIssue t{{"Teenagers who sleep more learn more.", "Development", "No evidence.", 0, false},
               FeedbackType::reader_perspective};
  MockProvider mock({feedback({{"Development", "Add a statistic here."}}), feedback({{"Evidence", kGoodQuestion}})});
  FeedbackPipeline p(mock);
  std::vector<std::string> names;
  auto cards = p.generate_critiques({t}, concerns, *s.current_draft(), s, [&](std::string n, json) { names.push_back(n); });
  ASSERT_EQ(cards.size(), 1u);
  const auto& c = cards[0];
  EXPECT_TRUE(c.violation_flags.empty());
  EXPECT_EQ(c.feedback_text, kGoodQuestion);
  EXPECT_EQ(c.hoc_label, "Evidence");
  EXPECT_EQ(c.hoc_category, HocCategory::development);
  EXPECT_EQ(c.feedback_type, FeedbackType::reader_perspective);
  EXPECT_EQ(c.anchor.resolution, AnchorResolution::exact);
  EXPECT_EQ(c.reason, "No evidence.");
  ASSERT_EQ(mock.calls(), 2u);
  EXPECT_NE(mock.requests()[1].rendered_prompt.find("no_question_ending"), std::string::npos);
  EXPECT_NE(std::find(names.begin(), names.end(), "critique_regenerated"), names.end());
}

TEST(Critiques, StillFailingIsDeliveredWithFlags) {
  Session s = session_with_draft();
  TypedIssue t{{"Quote not in draft at all, nothing like it.", "Organization", "r", 0, false},
               FeedbackType::example_analogy};
  MockProvider mock({feedback({{"Flow between the paragraphs", "Fix the flow."}}),
                     feedback({{"Flow between the paragraphs", "Fix the flow please."}})});
  FeedbackPipeline p(mock);
  auto cards = p.generate_critiques({t}, {{"x", HocCategory::organization}}, *s.current_draft(), s);
  ASSERT_EQ(cards.size(), 1u);
  EXPECT_EQ(cards[0].violation_flags, (std::vector<std::string>{"no_question_ending", "hoc_too_long"}));
  EXPECT_EQ(cards[0].anchor.resolution, AnchorResolution::unanchored);
  EXPECT_EQ(mock.calls(), 2u);
}

TEST(Praise, TruncatesAndRegeneratesMissingPraiseWord) {
  Session s = session_with_draft();
  MockProvider mock({praise({{"Schools should start later.", "States the position.", "Thesis"},
                             {"Teenagers who sleep more learn more.", "Direct claim.", "Good claim"},
                             {"A later bell would also cut car accidents.", "Concrete stakes.", "Strong stakes"},
                             {"Some parents worry about sports practice.", "Fair.", "Good balance"}}),
                     praise({{"Schools should start later.", "States the position.", "Excellent thesis"}})});
  FeedbackPipeline p(mock);
  auto cards = p.generate_praise(*s.current_draft(), s);
  ASSERT_EQ(cards.size(), kMaxPraises);
  EXPECT_EQ(cards[0].hoc_label, "Excellent thesis");
  for (const auto& c : cards) {
    EXPECT_EQ(c.kind, CardKind::praise);
    EXPECT_TRUE(c.violation_flags.empty());
    EXPECT_EQ(c.anchor.resolution, AnchorResolution::exact);
  }
  ASSERT_EQ(mock.calls(), 2u);
  EXPECT_NE(mock.requests()[1].rendered_prompt.find("Schools should start later."), std::string::npos);
}

TEST(FullPipeline, ProducesCardsAndTelemetry) {
  Session s = session_with_draft();
  FeedbackCard keep;
  keep.id = "c_targeted";
  keep.source = CardSource::targeted;
  FeedbackCard stale;
  stale.id = "c_old";
  s.cards = {keep, stale};
  MockProvider mock(full_script());
  FeedbackPipeline p(mock);
  auto cards = p.run_full_pipeline(s);
  ASSERT_EQ(cards.size(), 3u);
  EXPECT_EQ(cards[0].kind, CardKind::critique);
  EXPECT_EQ(cards[2].kind, CardKind::praise);
  EXPECT_TRUE(cards[1].anchor.insertion_point);
  EXPECT_EQ(cards[1].hoc_category, HocCategory::organization);
  EXPECT_EQ(mock.calls(), 5u);
  // Old pipeline cards are replaced; targeted cards stay.
  ASSERT_EQ(s.cards.size(), 4u);
  EXPECT_EQ(s.cards[0].id, "c_targeted");
  EXPECT_EQ(s.find_card("c_old"), nullptr);
  EXPECT_EQ(count_events(s, "stage_completed"), 4u);
  EXPECT_EQ(count_events(s, "pipeline_completed"), 1u);
  for (const auto& e : s.telemetry) {
    if (e.name == "stage_completed") EXPECT_GE(e.payload.at("duration_ms").get<double>(), 0.0);
  }
  // Ids are unique.
  std::set<std::string> ids;
  for (const auto& c : s.cards) EXPECT_TRUE(ids.insert(c.id).second);
}

TEST(FullPipeline, FailureKeepsPartialTelemetry) {
  Session s = session_with_draft();
  FeedbackCard old;
  old.id = "c_old";
  s.cards = {old};
  auto script = full_script();
  MockProvider mock({script[0], "not json", "still not json"});
  FeedbackPipeline p(mock);
  EXPECT_THROW(p.run_full_pipeline(s), StageError);
  EXPECT_EQ(count_events(s, "stage_completed"), 1u);
  ASSERT_EQ(count_events(s, "pipeline_failed"), 1u);
  EXPECT_EQ(s.telemetry.back().payload.at("stage"), "sentences");
  ASSERT_EQ(s.cards.size(), 1u);
  EXPECT_EQ(s.cards[0].id, "c_old");
}

TEST(FullPipeline, Preconditions) {
  MockProvider mock({"{}"});
  FeedbackPipeline p(mock);
  Session s = session_with_draft();
  for (auto& g : s.goals) g.selected = false;
  EXPECT_THROW(p.run_full_pipeline(s), PreconditionError);
  Session nodraft = session_with_draft();
  nodraft.drafts.clear();
  EXPECT_THROW(p.run_full_pipeline(nodraft), PreconditionError);
  EXPECT_EQ(mock.calls(), 0u);
}

TEST(FullPipeline, NoConcernsStillGivesPraise) {
  Session s = session_with_draft();
  MockProvider mock({topics({}), praise({{"Schools should start later.", "Plain.", "Good start"}})});
  FeedbackPipeline p(mock);
  auto cards = p.run_full_pipeline(s);
  ASSERT_EQ(cards.size(), 1u);
  EXPECT_EQ(cards[0].kind, CardKind::praise);
}

TEST(GoalTraceability, SelectedGoalsReachEveryGoalAwarePrompt) {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    Session s = session_with_draft();
    s.goals.clear();
    int n = 1 + static_cast<int>(rng() % 5);
    std::vector<std::string> selected;
    for (int i = 0; i < n + 2; ++i) {
      Goal g;
      g.id = s.next_id("g");
      g.text = "goal " + std::to_string(trial) + "-" + std::to_string(i) + " " + writor::testing::random_text(rng, 5);
      g.selected = i < n;
      if (g.selected) selected.push_back(g.text);
      s.goals.push_back(g);
    }
    MockProvider mock(full_script());
    FeedbackPipeline p(mock);
    p.run_full_pipeline(s);
    auto reqs = mock.requests();
    for (const auto& r : reqs) {
      if (r.stage != Stage::topics && r.stage != Stage::final_feedback) continue;
      for (const auto& g : selected) EXPECT_NE(r.rendered_prompt.find(g), std::string::npos) << to_string(r.stage);
      for (const auto& g : s.goals) {
        if (!g.selected) EXPECT_EQ(r.rendered_prompt.find(g.text), std::string::npos);
      }
    }
  }
}

TEST(Chat, AlternatesTurnsAndChecksCopyableText) {
  Session s = session_with_draft();
  MockProvider setup(full_script());
  FeedbackPipeline(setup).run_full_pipeline(s);
  std::string id = s.cards[0].id;
  MockProvider mock({json{{"Response", "What do you think the reader needs?"}}.dump(),
                     json{{"Response", "You could write that sleep improves every single grade."}}.dump()});
  FeedbackPipeline p(mock);
  auto r1 = p.chat_on_card(s, id, "I'm not sure what you mean.");
  EXPECT_TRUE(r1.violation_flags.empty());
  auto r2 = p.chat_on_card(s, id, "Can you just tell me?");
  EXPECT_EQ(r2.violation_flags, std::vector<std::string>{"copyable_text"});
  const auto& chat = s.find_card(id)->chat;
  ASSERT_EQ(chat.size(), 4u);
  for (std::size_t i = 0; i < chat.size(); ++i) {
    EXPECT_EQ(chat[i].role, i % 2 == 0 ? ChatRole::writer : ChatRole::system_feedback);
  }
  // The second prompt carries the first exchange.
  std::string second = mock.requests()[1].rendered_prompt;
  EXPECT_NE(second.find("I'm not sure what you mean."), std::string::npos);
  EXPECT_NE(second.find("What do you think the reader needs?"), std::string::npos);
  EXPECT_NE(second.find(s.find_card(id)->feedback_text), std::string::npos);
  EXPECT_EQ(count_events(s, "chat_sent"), 2u);
}

TEST(Chat, Errors) {
  Session s = session_with_draft();
  MockProvider setup(full_script());
  FeedbackPipeline(setup).run_full_pipeline(s);
  std::string praise_id = s.cards.back().id;
  std::string critique_id = s.cards.front().id;
  MockProvider mock({"garbage", "garbage"});
  FeedbackPipeline p(mock);
  EXPECT_THROW(p.chat_on_card(s, "nope", "hi"), NotFoundError);
  EXPECT_THROW(p.chat_on_card(s, praise_id, "hi"), PreconditionError);
  EXPECT_THROW(p.find_example(s, praise_id), PreconditionError);
  EXPECT_THROW(p.chat_on_card(s, critique_id, "   "), PreconditionError);
  EXPECT_THROW(p.chat_on_card(s, critique_id, "hi"), StageError);
  EXPECT_TRUE(s.find_card(critique_id)->chat.empty());
}

TEST(FindExample, CitesTheWritersOwnSentence) {
  Session s = session_with_draft();
  MockProvider setup(full_script());
  FeedbackPipeline(setup).run_full_pipeline(s);
  std::string id = s.cards[0].id;
  MockProvider mock({json{{"Response", "Look at how your third sentence names a concrete result."},
                          {"Sentence", "A later bell would also cut car accidents."}}
                         .dump(),
                     json{{"Response", "No example comes to mind."}, {"Sentence", "Invented text nowhere in it."}}.dump()});
  FeedbackPipeline p(mock);
  auto r = p.find_example(s, id);
  ASSERT_TRUE(r.cited);
  const Draft& d = *s.current_draft();
  EXPECT_EQ(d.content.substr(*r.cited->start, *r.cited->end - *r.cited->start), "A later bell would also cut car accidents.");
  auto miss = p.find_example(s, id);
  EXPECT_FALSE(miss.cited);
  const auto& chat = s.find_card(id)->chat;
  ASSERT_EQ(chat.size(), 4u);
  EXPECT_EQ(chat[0].role, ChatRole::writer);
  EXPECT_EQ(count_events(s, "example_requested"), 2u);
}

TEST(Targeted, SpanAndQuestion) {
  Session s = session_with_draft();
  const Draft& d = *s.current_draft();
  const auto& span = d.sentence_index[1];
  json ok{{"HOC", "Development"}, {"FeedbackType", "Reader-Perspective Feedback"}, {"Feedback", kGoodQuestion}};
  MockProvider mock({ok.dump(), ok.dump()});
  FeedbackPipeline p(mock);
  auto card = p.targeted_feedback(s, span.start, span.end, "Is this convincing?");
  EXPECT_EQ(card.source, CardSource::targeted);
  EXPECT_EQ(card.anchor.quoted_sentence, span.text);
  EXPECT_EQ(card.hoc_category, HocCategory::development);
  EXPECT_EQ(card.feedback_type, FeedbackType::reader_perspective);
  EXPECT_TRUE(card.violation_flags.empty());
  EXPECT_NE(mock.requests()[0].rendered_prompt.find("Is this convincing?"), std::string::npos);
  p.targeted_feedback(s, span.start, span.end);
  EXPECT_NE(mock.requests()[1].rendered_prompt.find("(none)"), std::string::npos);
  EXPECT_EQ(s.cards.size(), 2u);
  EXPECT_NE(s.cards[0].id, s.cards[1].id);

  // A span of only whitespace, or outside the draft, is rejected.
  std::size_t gap = span.end;
  ASSERT_EQ(d.content[gap], ' ');
  EXPECT_THROW(p.targeted_feedback(s, gap, gap + 1), PreconditionError);
  EXPECT_THROW(p.targeted_feedback(s, 0, d.content.size() + 1), PreconditionError);
  EXPECT_EQ(mock.calls(), 2u);
}

TEST(Targeted, RegeneratesOnce) {
  Session s = session_with_draft();
  const auto& span = s.current_draft()->sentence_index[0];
  json bad{{"HOC", "Thesis"}, {"FeedbackType", "Examples"}, {"Feedback", "Say more."}};
  MockProvider mock({bad.dump(), bad.dump(), bad.dump()});
  FeedbackPipeline p(mock);
  auto card = p.targeted_feedback(s, span.start, span.end);
  EXPECT_EQ(card.violation_flags, std::vector<std::string>{"no_question_ending"});
  EXPECT_EQ(mock.calls(), 2u);
}

TEST(Baseline, ThreePraisesFiveCritiques) {
  Session s = session_with_draft();
  json doc{{"Praise", json::array()}, {"Critiques", json::array()}};
  for (int i = 0; i < 3; ++i) doc["Praise"].push_back(json{{"Sentence", "Schools should start later."}, {"Feedback", "Nice."}});
  for (int i = 0; i < 5; ++i) {
    doc["Critiques"].push_back(json{{"Sentence", "Teenagers who sleep more learn more."},
                                    {"Feedback", i == 0 ? "Try: Sleep helps every student learn far better. " : "Be specific."}});
  }
  json short_doc = doc;
  short_doc["Critiques"].erase(0);
  MockProvider mock({short_doc.dump(), doc.dump()});
  FeedbackPipeline p(mock);
  auto cards = p.baseline_feedback(s.context, s.selected_goals(), *s.current_draft());
  ASSERT_EQ(cards.size(), 8u);
  EXPECT_EQ(mock.calls(), 2u);
  for (std::size_t i = 0; i < cards.size(); ++i) {
    EXPECT_EQ(cards[i].id, "b" + std::to_string(i + 1));
    EXPECT_EQ(cards[i].kind, i < 3 ? CardKind::praise : CardKind::critique);
    EXPECT_EQ(cards[i].source, CardSource::baseline);
    EXPECT_FALSE(cards[i].hoc_label);
    EXPECT_FALSE(cards[i].reason);
    EXPECT_FALSE(cards[i].feedback_type);
  }
  EXPECT_TRUE(cards[0].violation_flags.empty());
  EXPECT_EQ(cards[3].violation_flags, (std::vector<std::string>{"no_question_ending", "copyable_text"}));
  EXPECT_EQ(cards[4].violation_flags, std::vector<std::string>{"no_question_ending"});
}

TEST(AssignmentDetails, Format) {
  Session s = session_with_draft();
  std::string d = FeedbackPipeline::assignment_details(s.context, s.selected_goals());
  EXPECT_NE(d.find("Assignment prompt: Argue for a policy change in your town."), std::string::npos);
  EXPECT_NE(d.find("Reader: A school board member."), std::string::npos);
  EXPECT_NE(d.find("1. Support each claim with evidence."), std::string::npos);
  EXPECT_NE(d.find("2. Use smooth transitions between ideas."), std::string::npos);
}
