#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "writor/text.hpp"
#include "writor/types.hpp"

namespace writor::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string source_path(const std::string& rel) { return std::string(WRITOR_SOURCE_DIR) + "/" + rel; }
inline std::string test_data(const std::string& rel) { return std::string(WRITOR_TEST_DATA) + "/" + rel; }

inline std::string random_word(std::mt19937& rng) {
  static const char* words[] = {"reader", "thesis", "the", "a", "garden", "argument", "café", "“quoted”",
                                "evidence", "why?", "line\nbreak", "tab\there", "it's", "résumé", "\\slash"};
  return words[rng() % (sizeof words / sizeof *words)];
}

inline std::string random_text(std::mt19937& rng, int max_words) {
  std::string s;
  int n = 1 + static_cast<int>(rng() % max_words);
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += random_word(rng);
  }
  return s;
}

// A structurally valid session with every optional field exercised at random.
inline Session random_session(std::mt19937& rng) {
  Session s;
  s.id = "s_" + std::to_string(rng() % 100000);
  s.context = {random_text(rng, 6), random_text(rng, 12), random_text(rng, 6)};
  s.created_at = Instant{std::chrono::milliseconds{1700000000000LL + static_cast<long long>(rng() % 1000000)}};
  s.revision = rng() % 10;
  int goals = static_cast<int>(rng() % 6);
  for (int i = 0; i < goals; ++i) {
    Goal g;
    g.id = s.next_id("g");
    g.text = random_text(rng, 8);
    g.origin = rng() % 2 ? GoalOrigin::suggested : GoalOrigin::custom;
    g.audience_tailored = g.origin == GoalOrigin::suggested && rng() % 2;
    g.selected = rng() % 2;
    s.goals.push_back(g);
  }
  int drafts = static_cast<int>(rng() % 3);
  for (int v = 1; v <= drafts; ++v) s.drafts.push_back(Draft::make(random_text(rng, 30) + ". " + random_text(rng, 10) + "?", v));
  if (!s.drafts.empty()) {
    int cards = static_cast<int>(rng() % 5);
    for (int i = 0; i < cards; ++i) {
      FeedbackCard c;
      c.id = s.next_id("c");
      c.kind = rng() % 3 == 0 ? CardKind::praise : CardKind::critique;
      c.source = rng() % 4 == 0 ? CardSource::targeted : CardSource::pipeline;
      if (rng() % 4) c.hoc_label = random_text(rng, 2);
      if (rng() % 2) c.hoc_category = static_cast<HocCategory>(rng() % 4);
      const Draft& d = s.drafts[rng() % s.drafts.size()];
      c.anchor.draft_version = d.version;
      c.anchor.quoted_sentence = d.sentence_index.empty() ? "x" : d.sentence_index[0].text;
      if (rng() % 3 && !d.sentence_index.empty()) {
        c.anchor.start = d.sentence_index[0].start;
        c.anchor.end = d.sentence_index[0].end;
        c.anchor.resolution = AnchorResolution::exact;
        c.anchor.confidence = 1.0;
      }
      c.anchor.insertion_point = rng() % 5 == 0;
      if (c.kind == CardKind::critique) {
        if (rng() % 2) c.reason = random_text(rng, 10);
        if (rng() % 2) c.feedback_type = rng() % 2 ? FeedbackType::reader_perspective : FeedbackType::example_analogy;
      }
      c.feedback_text = random_text(rng, 40) + "?";
      c.status = rng() % 2 ? CardStatus::open : CardStatus::addressed;
      int turns = static_cast<int>(rng() % 4);
      for (int t = 0; t < turns; ++t) {
        ChatTurn w{ChatRole::writer, random_text(rng, 8), s.created_at + std::chrono::milliseconds(t * 2), {}, std::nullopt};
        ChatTurn r{ChatRole::system_feedback, random_text(rng, 12), s.created_at + std::chrono::milliseconds(t * 2 + 1), {},
                   std::nullopt};
        if (rng() % 3 == 0) r.violation_flags = {"copyable_text"};
        if (rng() % 3 == 0) {
          TextAnchor a = c.anchor;
          r.cited = a;
        }
        c.chat.push_back(w);
        c.chat.push_back(r);
      }
      if (rng() % 3 == 0) c.violation_flags = {"over_length", "no_question_ending"};
      s.cards.push_back(c);
    }
  }
  int events = static_cast<int>(rng() % 4);
  for (int i = 0; i < events; ++i) {
    s.telemetry.push_back(TelemetryEvent{"card_viewed", nlohmann::json{{"card", "c1"}, {"n", i}},
                                         s.created_at + std::chrono::milliseconds(i)});
  }
  return s;
}

inline const char* kAnchorVocab[] = {"parks", "cars",   "city",   "reader", "the",  "a",     "green",
                                     "space", "matters", "council", "should", "build", "more", "less",
                                     "quiet", "noisy",  "children", "play",  "café", "naïve", "it's",
                                     "“new”", "old",    "every",  "street"};

inline std::string random_sentence(std::mt19937& rng) {
  int n = 4 + static_cast<int>(rng() % 12);
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s += rng() % 10 == 0 ? "  " : " ";
    std::string w = kAnchorVocab[rng() % std::size(kAnchorVocab)];
    if (i == 0 && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 32);
    s += w;
  }
  s += rng() % 4 == 0 ? "?" : ".";
  return s;
}

struct AnchorPair {
  Draft draft;
  std::string quote;
};

// A draft and a quote taken from it, possibly mutated.
inline AnchorPair anchor_mutation(std::mt19937& rng) {
  std::vector<std::string> sents;
  int n = 1 + static_cast<int>(rng() % 8);
  for (int i = 0; i < n; ++i) sents.push_back(random_sentence(rng));
  std::string content;
  for (const auto& s : sents) content += (content.empty() ? "" : (rng() % 5 == 0 ? "\n\n" : " ")) + s;
  Draft d = Draft::make(content, 1);
  std::string q = d.sentence_index[rng() % d.sentence_index.size()].text;
  auto toks = text::split_whitespace(q);
  std::vector<std::string> words(toks.begin(), toks.end());
  switch (rng() % 6) {
    case 0:  // verbatim
      break;
    case 1:  // case and spacing
      for (auto& w : words) w = text::to_lower_ascii(w);
      break;
    case 2:  // substitute some tokens
    case 3: {
      int k = 1 + static_cast<int>(rng() % 4);
      for (int i = 0; i < k; ++i) words[rng() % words.size()] = kAnchorVocab[rng() % std::size(kAnchorVocab)];
      break;
    }
    case 4:  // drop a token
      if (words.size() > 1) words.erase(words.begin() + static_cast<long>(rng() % words.size()));
      break;
    default:  // unrelated text
      words = {"zebra", "quartz", "violin", "meadow", "xylophone"};
  }
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return {d, out};
}


}  // namespace writor::testing
