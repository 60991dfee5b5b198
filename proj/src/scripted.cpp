#include "writor/scripted.hpp"

#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

#include "writor/hash.hpp"
#include "writor/metrics.hpp"
#include "writor/pipeline.hpp"
#include "writor/sentences.hpp"
#include "writor/text.hpp"

namespace writor {

using nlohmann::json;

std::optional<PromptValues> unrender(std::string_view tpl, std::string_view rendered) {
  std::vector<std::string> literals;
  std::vector<std::string> names;
  std::size_t pos = 0;
  std::string current;
  while (pos < tpl.size()) {
    if (tpl[pos] == '{') {
      std::size_t end = pos + 1;
      while (end < tpl.size() && ((tpl[end] >= 'a' && tpl[end] <= 'z') || tpl[end] == '_')) ++end;
      if (end < tpl.size() && tpl[end] == '}' && end > pos + 1) {
        literals.push_back(current);
        current.clear();
        names.emplace_back(tpl.substr(pos + 1, end - pos - 1));
        pos = end + 1;
        continue;
      }
    }
    current += tpl[pos++];
  }
  literals.push_back(current);

  if (!rendered.starts_with(literals[0])) return std::nullopt;
  PromptValues values;
  std::size_t at = literals[0].size();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string& next = literals[i + 1];
    bool last = i + 1 == names.size();
    std::size_t found;
    if (next.empty()) {
      found = last ? rendered.size() : at;
    } else if (last) {
      found = rendered.rfind(next);
      if (found == std::string_view::npos || found < at) return std::nullopt;
    } else {
      found = rendered.find(next, at);
      if (found == std::string_view::npos) return std::nullopt;
    }
    values[names[i]] = std::string(rendered.substr(at, found - at));
    at = found + next.size();
  }
  return values;
}

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Raw engine output only, so sequences match across standard libraries.
  std::size_t pick(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
  bool chance(std::size_t one_in) { return pick(one_in) == 0; }
  template <class T>
  const T& choose(const std::vector<T>& v) { return v[pick(v.size())]; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t seed_from(std::string_view digest_hex) {
  return std::stoull(std::string(digest_hex.substr(0, 16)), nullptr, 16);
}

struct Essay {
  std::vector<std::string> sentences;  // long enough to comment on
};

Essay read_essay(std::string_view text) {
  Essay e;
  for (const auto& s : split_sentences(text)) {
    if (count_words(s.text) >= 6 && !s.text.ends_with(":")) e.sentences.push_back(s.text);
  }
  if (e.sentences.empty()) {
    for (const auto& s : split_sentences(text)) e.sentences.push_back(s.text);
  }
  return e;
}

// Up to `n` distinct sentence indices.
std::vector<std::size_t> distinct(Rng& rng, std::size_t available, std::size_t n) {
  std::vector<std::size_t> idx(available);
  for (std::size_t i = 0; i < available; ++i) idx[i] = i;
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) std::swap(idx[i], idx[i + rng.pick(idx.size() - i)]);
  idx.resize(std::min(n, available));
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<std::string> phrases(std::string_view sentence) {
  std::vector<std::string> out;
  for (auto& c : noun_chunks(sentence)) {
    if (count_words(c) <= 6) out.push_back(c);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return count_words(a) > count_words(b); });
  if (out.empty()) out.push_back("this idea");
  if (out.size() == 1) out.push_back(out[0]);
  return out;
}

// The model does not always quote a sentence verbatim.
std::string imperfect_quote(Rng& rng, const std::string& sentence) {
  std::size_t roll = rng.pick(10);
  if (roll == 0 && !sentence.empty() && sentence[0] >= 'A' && sentence[0] <= 'Z') {
    std::string s = sentence;
    s[0] = static_cast<char>(s[0] - 'A' + 'a');
    return s;
  }
  if (roll == 1) {
    auto words = text::split_whitespace(sentence);
    if (words.size() >= 10) {
      std::size_t drop = 2 + rng.pick(words.size() - 4);
      std::string s;
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (i == drop) continue;
        if (!s.empty()) s += ' ';
        s += words[i];
      }
      return s;
    }
  }
  return sentence;
}

std::string wrap(Rng& rng, const json& doc) {
  switch (rng.pick(4)) {
    case 0: return "```json\n" + doc.dump(4) + "\n```";
    case 1: return "Here is the feedback in the requested format.\n\n" + doc.dump(4);
    default: return doc.dump(4);
  }
}

std::string category_word(HocCategory c) {
  switch (c) {
    case HocCategory::thesis_argument: return "thesis";
    case HocCategory::organization: return "organization";
    case HocCategory::development: return "development of ideas";
    case HocCategory::audience_purpose: return "audience focus";
  }
  return "development of ideas";
}

std::string short_label(HocCategory c, Rng& rng) {
  static const std::map<HocCategory, std::vector<std::string>> labels = {
      {HocCategory::thesis_argument, {"Thesis", "Main claim", "Argument"}},
      {HocCategory::organization, {"Organization", "Paragraph flow", "Transitions"}},
      {HocCategory::development, {"Development", "Evidence", "Supporting detail"}},
      {HocCategory::audience_purpose, {"Audience", "Reader needs", "Purpose"}},
  };
  return rng.choose(labels.at(c));
}

HocCategory category_of(std::string_view s) { return map_hoc_category(s).value_or(HocCategory::development); }

std::string first_clause(std::string_view s, std::size_t max_words) {
  auto words = text::split_whitespace(s);
  std::string out;
  for (std::size_t i = 0; i < words.size() && i < max_words; ++i) {
    std::string_view w = words[i];
    bool stop = w.ends_with(",") || w.ends_with(".") || w.ends_with(";");
    if (stop) w.remove_suffix(1);
    if (!out.empty()) out += ' ';
    out += w;
    if (stop) break;
  }
  return out;
}

std::vector<std::string> goal_lines(std::string_view numbered) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= numbered.size()) {
    std::size_t end = numbered.find('\n', start);
    if (end == std::string_view::npos) end = numbered.size();
    std::string line(text::trim(numbered.substr(start, end - start)));
    if (auto dot = line.find(". "); dot != std::string::npos && dot <= 3) line = line.substr(dot + 2);
    if (!line.empty()) out.push_back(line);
    start = end + 1;
  }
  return out;
}

json goals_reply(const PromptValues& v) {
  std::string reader = first_clause(v.at("reader"), 8);
  if (reader.empty()) reader = "the intended reader";
  std::string topic = first_clause(v.at("assignment_prompt"), 10);
  return json{{"goals",
               {"State a clear thesis that answers the prompt: " + topic + ".",
                "Organize paragraphs so that each one develops a single supporting point.",
                "Support each claim with specific evidence from experience or sources.",
                "Use transitions that show how each idea builds on the one before it.",
                "Anticipate what " + reader + " needs to know and address it directly."}}};
}

json topics_reply(Rng& rng, const PromptValues& v) {
  static const std::map<HocCategory, std::vector<std::string>> issues = {
      {HocCategory::thesis_argument,
       {"The thesis is not yet stated in one concise claim, so the argument's direction is hard to follow.",
        "The argument makes several claims without settling on the main one."}},
      {HocCategory::organization,
       {"The organization of paragraphs does not yet show a clear order of ideas.",
        "The structure lacks transitions that link one point to the next."}},
      {HocCategory::development,
       {"The development of key points relies on general statements with little specific evidence.",
        "The supporting examples are brief and not connected back to the claim."}},
      {HocCategory::audience_purpose,
       {"The audience may not see why the points matter to them.",
        "The purpose of several paragraphs is unclear for the intended reader."}},
  };
  json list = json::array();
  for (const auto& goal : goal_lines(v.at("assignment_goals"))) {
    list.push_back(json{{"Issue", rng.choose(issues.at(category_of(goal)))}});
    if (list.size() == kMaxTopics) break;
  }
  if (list.empty()) list.push_back(json{{"Issue", issues.at(HocCategory::development)[0]}});
  return json{{"HOCs", list}};
}

json sentences_reply(Rng& rng, const PromptValues& v) {
  Essay essay = read_essay(v.at("essay"));
  json topics = json::parse(v.at("topic_results"));
  const auto& hocs = topics.at("HOCs");
  std::size_t want = std::min<std::size_t>(kMaxSentenceIssues, hocs.size() + rng.pick(2));
  auto picks = distinct(rng, essay.sentences.size(), want);
  json list = json::array();
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const json& hoc = hocs[i % hocs.size()];
    HocCategory c = category_of(hoc.value("Category", hoc.value("Issue", "")));
    std::string sentence = essay.sentences[picks[i]];
    auto ph = phrases(sentence);
    std::string reason;
    if (rng.chance(6)) {
      reason = "The " + category_word(c) + " would be stronger with a new sentence after this one that explains why " +
               ph[0] + " matters.";
    } else {
      reason = "In terms of " + category_word(c) + ", this sentence mentions " + ph[0] +
               " but does not show how it supports the main point.";
    }
    list.push_back(json{{"Sentence", imperfect_quote(rng, sentence)},
                        {"HOC", std::string(display_name(c))},
                        {"Reason", reason}});
  }
  return json{{"Sentences", list}};
}

json feedback_type_reply(Rng& rng, const PromptValues& v) {
  json in = json::parse(v.at("sentence_results"));
  json list = json::array();
  for (const auto& item : in.at("Sentences")) {
    json out = item;
    out["FeedbackType"] = rng.chance(3) ? "Examples or Analogies" : "Reader-Perspective Feedback";
    list.push_back(out);
  }
  return json{{"Feedback_type", list}};
}

std::string reader_feedback(Rng& rng, const std::vector<std::string>& ph) {
  switch (rng.pick(3)) {
    case 0:
      return "As a reader, when I reach the part about " + ph[0] +
             ", I can tell it matters to you, but I am not yet sure how it connects to your larger point. "
             "What would a reader need to know about " + ph[1] + " to see that connection?";
    case 1:
      return "Reading this sentence, I found myself curious about " + ph[0] +
             " and wanted to hear more before moving on. How might " + ph[1] +
             " help a reader understand why this moment is important?";
    default:
      return "From a reader's point of view, " + ph[0] +
             " arrives quickly and I am left guessing about its role. What do you most want me to believe after "
             "reading about " + ph[1] + "?";
  }
}

std::string example_feedback(Rng& rng, const std::vector<std::string>& ph) {
  switch (rng.pick(2)) {
    case 0:
      return "Think of a tour guide who points out a landmark before the group reaches it, so everyone knows what to "
             "look for. Here, " + ph[0] +
             " is a landmark the reader meets without that preparation. Which detail about " + ph[1] +
             " could signal its importance earlier?";
    default:
      return "A recipe usually explains why a step matters, such as resting dough so it rises, and the reason makes "
             "the step memorable. In this sentence, " + ph[0] +
             " appears without its reason. How could you show the reader what " + ph[1] + " adds to your argument?";
  }
}

json final_feedback_reply(Rng& rng, const PromptValues& v, bool regenerating) {
  json in = json::parse(v.at("type_results"));
  json list = json::array();
  for (const auto& item : in.at("Feedback_type")) {
    std::string sentence = item.value("Sentence", "");
    auto ph = phrases(sentence);
    HocCategory c = category_of(item.value("HOC", "") + " " + item.value("Reason", ""));
    bool example = map_feedback_type(item.value("FeedbackType", "")) == FeedbackType::example_analogy;
    std::string feedback = example ? example_feedback(rng, ph) : reader_feedback(rng, ph);
    std::string label = short_label(c, rng);
    if (!regenerating) {
      // Occasional rule slips, which the pipeline has to catch.
      std::size_t slip = rng.pick(10);
      if (slip == 0) feedback = feedback.substr(0, feedback.rfind(". ") + 1);
      if (slip == 1) label = "Use of supporting evidence";
    }
    json out = item;
    out["HOC"] = label;
    out["Feedback"] = feedback;
    list.push_back(out);
  }
  return json{{"Feedback", list}};
}

json praise_reply(Rng& rng, const PromptValues& v, bool single) {
  static const std::vector<std::string> words = {"Strong", "Vivid", "Clear", "Effective", "Excellent", "Thoughtful"};
  static const std::vector<std::string> aspects = {"detail", "example", "claim", "imagery", "reasoning", "focus"};
  Essay essay = read_essay(v.at("essay"));
  auto picks = distinct(rng, essay.sentences.size(), single ? 1 : kMaxPraises);
  json list = json::array();
  for (std::size_t idx : picks) {
    const std::string& sentence = essay.sentences[idx];
    auto ph = phrases(sentence);
    std::string feedback;
    if (rng.pick(2) == 0) {
      feedback = "Your sentence about " + ph[0] + " gives the reader a concrete picture, and " + ph[1] +
                 " makes the point feel real. This kind of specific detail builds trust in your argument.";
    } else {
      feedback = "The mention of " + ph[0] +
                 " is a strong choice because it grounds your idea in something the reader can picture. It shows "
                 "real care for the reader.";
    }
    list.push_back(
        json{{"Sentence", sentence}, {"Feedback", feedback}, {"Category", rng.choose(words) + " " + rng.choose(aspects)}});
  }
  return json{{"Encouragement", list}};
}

std::string card_sentence(std::string_view card_context) {
  std::size_t at = card_context.find("Sentence: ");
  if (at == std::string_view::npos) return {};
  at += 10;
  std::size_t end = card_context.find('\n', at);
  return std::string(card_context.substr(at, end == std::string_view::npos ? std::string_view::npos : end - at));
}

json chat_reply(Rng& rng, const PromptValues& v) {
  auto ph = phrases(card_sentence(v.at("card_context")));
  std::string msg = text::to_lower_ascii(v.at("message"));
  if (msg.find("rewrite") != std::string::npos || msg.find("write it") != std::string::npos) {
    return json{{"Response", "I would rather not write it for you, because the words should stay yours. If you told a "
                             "friend what you meant by " + ph[0] + ", what would you say first?"}};
  }
  switch (rng.pick(2)) {
    case 0:
      return json{{"Response", "That is a fair question. Looking again at " + ph[0] +
                                   ", what do you want a reader to take away from it? Once you can say that in your "
                                   "own words, which part of the paragraph do you think would need to change?"}};
    default:
      return json{{"Response", "Good thinking. A reader who meets " + ph[0] +
                                   " for the first time may need one more step of explanation. Which detail from your "
                                   "own experience could provide that step?"}};
  }
}

json find_example_reply(Rng& rng, const PromptValues& v) {
  Essay essay = read_essay(v.at("essay"));
  std::string current = card_sentence(v.at("card_context"));
  std::vector<std::string> others;
  for (const auto& s : essay.sentences) {
    if (s != current && count_noun_chunks(s) >= 3) others.push_back(s);
  }
  if (others.empty() || rng.chance(4)) {
    return json{{"Sentence", ""},
                {"Response", "Imagine a paper about apples that opens by naming one variety and then explains why "
                             "that variety matters to bakers before moving on. The reader always knows why each "
                             "detail is there. Where in your paragraph could a reader use that kind of signal?"}};
  }
  const std::string& s = rng.choose(others);
  auto ph = phrases(s);
  return json{{"Sentence", s},
              {"Response", "Your sentence about " + ph[0] +
                               " already does this well: it names a specific detail and makes its purpose clear. "
                               "What would it look like to bring that same clarity to the sentence this feedback "
                               "points to?"}};
}

json targeted_reply(Rng& rng, const PromptValues& v) {
  auto ph = phrases(v.at("selected_text"));
  HocCategory c = category_of(v.at("question") + " " + v.at("selected_text"));
  bool example = rng.chance(3);
  return json{{"HOC", short_label(c, rng)},
              {"FeedbackType", example ? "Examples or Analogies" : "Reader-Perspective Feedback"},
              {"Feedback", example ? example_feedback(rng, ph) : reader_feedback(rng, ph)}};
}

json baseline_reply(Rng& rng, const PromptValues& v) {
  Essay essay = read_essay(v.at("essay"));
  auto praise_idx = distinct(rng, essay.sentences.size(), kBaselinePraises);
  auto critique_idx = distinct(rng, essay.sentences.size(), kBaselineCritiques);
  json praise = json::array();
  static const std::vector<std::string> praise_text = {
      "This is a good sentence that works well.", "Nice job here, this is clear.",
      "Great point, it is well said.", "This sentence is strong and effective."};
  for (std::size_t i = 0; i < kBaselinePraises; ++i) {
    const std::string& s = essay.sentences[praise_idx[i % praise_idx.size()]];
    praise.push_back(json{{"Sentence", s}, {"Feedback", rng.choose(praise_text)}});
  }
  json critiques = json::array();
  for (std::size_t i = 0; i < kBaselineCritiques; ++i) {
    const std::string& s = essay.sentences[critique_idx[i % critique_idx.size()]];
    auto ph = phrases(s);
    std::string feedback;
    switch (rng.pick(4)) {
      case 0: feedback = "This sentence is a bit vague. Try to be more specific."; break;
      case 1:
        feedback = "Consider revising this for clarity. You could write: \"This experience taught me that hard work "
                   "always pays off in the end.\"";
        break;
      case 2: feedback = "Could you explain " + ph[0] + " in more depth?"; break;
      default: feedback = "Add more detail here to support your point."; break;
    }
    critiques.push_back(json{{"Sentence", s}, {"Feedback", feedback}});
  }
  return json{{"Praise", praise}, {"Critiques", critiques}};
}

}  // namespace

ScriptedResponder::ScriptedResponder(std::uint64_t seed, PromptLibrary prompts)
    : seed_(seed), prompts_(std::move(prompts)) {}

std::string ScriptedResponder::complete(const PromptRequest& request) {
  std::uint64_t occurrence;
  {
    std::lock_guard lock(mu_);
    occurrence = seen_[request.fingerprint()]++;
  }
  std::string digest = sha256_hex(std::to_string(seed_) + ":" + std::to_string(occurrence) + ":" +
                                  std::string(to_string(request.stage)) + ":" + request.rendered_prompt);
  Rng rng(seed_from(digest));

  const std::string& prompt = request.rendered_prompt;
  const bool repairing = prompt.ends_with(kRepairInstruction);
  const bool regenerating = prompt.find("A previous version of this feedback broke") != std::string::npos;

  auto values = unrender(prompts_.raw(request.stage), prompt);
  if (!values) return "I could not read that request.";

  // Now and then the first reply is unusable and has to be repaired.
  if (!repairing && !regenerating && (request.stage == Stage::sentences || request.stage == Stage::topics) &&
      rng.chance(12)) {
    return "Sure! I looked through the essay and found a few places worth discussing.";
  }

  json doc;
  switch (request.stage) {
    case Stage::goals: doc = goals_reply(*values); break;
    case Stage::topics: doc = topics_reply(rng, *values); break;
    case Stage::sentences: doc = sentences_reply(rng, *values); break;
    case Stage::feedback_type: doc = feedback_type_reply(rng, *values); break;
    case Stage::final_feedback: doc = final_feedback_reply(rng, *values, regenerating); break;
    case Stage::praise: doc = praise_reply(rng, *values, prompt.find("Only revise the entry") != std::string::npos); break;
    case Stage::chat: doc = chat_reply(rng, *values); break;
    case Stage::find_example: doc = find_example_reply(rng, *values); break;
    case Stage::targeted: doc = targeted_reply(rng, *values); break;
    case Stage::baseline: doc = baseline_reply(rng, *values); break;
  }
  return repairing ? doc.dump() : wrap(rng, doc);
}

}  // namespace writor
