#include "writor/guardrails.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "writor/errors.hpp"
#include "writor/hash.hpp"
#include "writor/resources.hpp"
#include "writor/text.hpp"

namespace writor {

using nlohmann::json;

namespace {

bool is_word_byte(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u);
}

std::size_t word_count(std::string_view s) {
  std::size_t n = 0;
  for (auto tok : text::split_whitespace(s)) {
    if (text::has_alnum(tok)) ++n;
  }
  return n;
}

// Quoted passages: an opening mark not glued to a preceding word, and a
// closing mark not glued to a following word. This keeps apostrophes in
// "reader's" or "don't" from opening or closing a quote.
void collect_quoted(std::string_view s, const std::pair<std::string, std::string>& pair,
                    std::vector<std::string_view>& out) {
  const auto& [open, close] = pair;
  if (open.empty() || close.empty()) return;
  std::size_t i = 0;
  while ((i = s.find(open, i)) != std::string_view::npos) {
    bool left_ok = i == 0 || !is_word_byte(s[i - 1]);
    if (!left_ok) {
      i += open.size();
      continue;
    }
    std::size_t body = i + open.size();
    std::size_t j = body;
    std::size_t found = std::string_view::npos;
    while ((j = s.find(close, j)) != std::string_view::npos) {
      std::size_t after = j + close.size();
      bool right_ok = after >= s.size() || !is_word_byte(s[after]);
      if (right_ok && j > body) {
        found = j;
        break;
      }
      j += close.size();
    }
    if (found == std::string_view::npos) {
      i = body;
      continue;
    }
    out.push_back(s.substr(body, found - body));
    i = found + close.size();
  }
}

void collect_after_cues(std::string_view s, const std::vector<std::string>& cues,
                        std::vector<std::string_view>& out) {
  std::string lower = text::to_lower_ascii(s);
  for (const auto& cue_raw : cues) {
    std::string cue = text::to_lower_ascii(cue_raw);
    if (cue.empty()) continue;
    std::size_t i = 0;
    while ((i = lower.find(cue, i)) != std::string::npos) {
      bool left_ok = i == 0 || !is_word_byte(lower[i - 1]);
      std::size_t start = i + cue.size();
      i = start;
      if (!left_ok) continue;
      std::size_t end = start;
      while (end < s.size() && s[end] != '.' && s[end] != '!' && s[end] != '?' && s[end] != '\n') ++end;
      std::string_view span = s.substr(start, end - start);
      while (!span.empty() && (text::is_space(span.front()) || span.front() == ':')) span.remove_prefix(1);
      if (!span.empty()) out.push_back(span);
    }
  }
}

std::vector<std::string_view> split_ellipses(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = 0;
    if (s.substr(i).starts_with("...")) {
      len = 3;
    } else if (s.substr(i).starts_with("…")) {
      len = std::string_view("…").size();
    }
    if (len > 0) {
      out.push_back(s.substr(start, i - start));
      i += len;
      start = i;
    } else {
      ++i;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open guardrail config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::over_length: return "over_length";
    case Violation::no_question_ending: return "no_question_ending";
    case Violation::hoc_too_long: return "hoc_too_long";
    case Violation::category_form: return "category_form";
    case Violation::copyable_text: return "copyable_text";
  }
  return "over_length";
}

const std::vector<Violation>& all_violations() {
  static const std::vector<Violation> v = {Violation::over_length, Violation::no_question_ending,
                                           Violation::hoc_too_long, Violation::category_form,
                                           Violation::copyable_text};
  return v;
}

Violation parse_violation(std::string_view s) {
  for (Violation v : all_violations()) {
    if (to_string(v) == s) return v;
  }
  throw PreconditionError("unknown violation '" + std::string(s) + "'");
}

GuardrailConfig GuardrailConfig::from_json(const json& j) {
  GuardrailConfig c;
  try {
    c.version = j.at("version").get<int>();
    if (c.version != 1) throw PreconditionError("unsupported guardrail config version");
    c.critique_max_chars = j.value("critique_max_chars", c.critique_max_chars);
    c.praise_max_chars = j.value("praise_max_chars", c.praise_max_chars);
    c.copy_word_threshold = j.value("copy_word_threshold", c.copy_word_threshold);
    c.cue_phrases = j.value("cue_phrases", std::vector<std::string>{});
    c.praise_words = j.value("praise_words", std::vector<std::string>{});
    for (const auto& pair : j.value("quote_pairs", json::array())) {
      if (!pair.is_array() || pair.size() != 2) throw PreconditionError("quote_pairs entries must be [open, close]");
      c.quote_pairs.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("malformed guardrail config: ") + e.what());
  }
  if (c.copy_word_threshold < 1) throw PreconditionError("copy_word_threshold must be at least 1");
  return c;
}

GuardrailConfig GuardrailConfig::defaults() {
  static const GuardrailConfig c = from_json(json::parse(resources::get("guardrails.json")));
  return c;
}

GuardrailConfig GuardrailConfig::load(const std::string& path) {
  try {
    return from_json(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw PreconditionError("guardrail config " + path + " is not valid JSON: " + e.what());
  }
}

json GuardrailConfig::to_json() const {
  json pairs = json::array();
  for (const auto& [o, c] : quote_pairs) pairs.push_back(json::array({o, c}));
  return json{{"version", version},
              {"critique_max_chars", critique_max_chars},
              {"praise_max_chars", praise_max_chars},
              {"copy_word_threshold", copy_word_threshold},
              {"cue_phrases", cue_phrases},
              {"praise_words", praise_words},
              {"quote_pairs", pairs}};
}

std::string GuardrailConfig::hash() const { return sha256_hex(to_json().dump()); }

void ViolationReport::add(Violation v, std::string why) {
  flags.insert(v);
  auto& slot = evidence[v];
  if (slot.empty()) {
    slot = std::move(why);
  } else {
    slot += " | " + why;
  }
}

std::vector<std::string> ViolationReport::labels() const {
  std::vector<std::string> out;
  for (Violation v : flags) out.emplace_back(to_string(v));
  return out;
}

std::optional<std::string> check_length(std::string_view t, TextKind kind, const GuardrailConfig& config) {
  if (kind == TextKind::chat) return std::nullopt;
  std::size_t limit = kind == TextKind::critique ? config.critique_max_chars : config.praise_max_chars;
  std::size_t n = text::scalar_count(t);
  if (n <= limit) return std::nullopt;
  return std::to_string(n) + " characters (limit " + std::to_string(limit) + ")";
}

std::optional<std::string> check_question_ending(std::string_view t) {
  std::string_view s = t;
  for (;;) {
    std::size_t before = s.size();
    while (!s.empty() && (text::is_space(s.back()) || s.back() == '"' || s.back() == '\'' ||
                          s.back() == ')' || s.back() == ']' || s.back() == '}')) {
      s.remove_suffix(1);
    }
    for (std::string_view q : {"”", "’", "»"}) {
      if (s.ends_with(q)) s.remove_suffix(q.size());
    }
    if (s.size() == before) break;
  }
  if (s.ends_with("?") || s.ends_with("？")) return std::nullopt;
  std::string_view tail = s.substr(s.size() > 40 ? s.size() - 40 : 0);
  return "ends with \"" + std::string(tail) + "\"";
}

std::optional<std::string> check_hoc_form(std::string_view label, CardKind kind,
                                          const GuardrailConfig& config) {
  if (kind == CardKind::critique) {
    std::size_t n = text::split_whitespace(label).size();
    if (n <= 2) return std::nullopt;
    return "\"" + std::string(label) + "\" has " + std::to_string(n) + " words (limit 2)";
  }
  for (const auto& w : config.praise_words) {
    if (text::contains_word_ci(label, w)) return std::nullopt;
  }
  return "\"" + std::string(label) + "\" contains no praise word";
}

std::vector<CopyableSpan> detect_copyable_text(std::string_view feedback, std::string_view draft,
                                               const GuardrailConfig& config) {
  std::vector<std::string_view> candidates;
  for (const auto& pair : config.quote_pairs) collect_quoted(feedback, pair, candidates);
  collect_after_cues(feedback, config.cue_phrases, candidates);
  std::sort(candidates.begin(), candidates.end(),
            [&](std::string_view a, std::string_view b) { return a.data() < b.data(); });

  const std::string norm_draft = text::normalize_text(draft);
  std::vector<CopyableSpan> out;
  for (std::string_view candidate : candidates) {
    for (std::string_view fragment : split_ellipses(candidate)) {
      std::string_view core = text::strip_punct(text::trim(fragment));
      std::size_t words = word_count(core);
      if (words < config.copy_word_threshold) continue;
      std::string norm = text::normalize_text(core);
      if (norm_draft.find(norm) != std::string::npos) continue;
      bool dup = std::any_of(out.begin(), out.end(), [&](const CopyableSpan& s) { return s.text == core; });
      if (!dup) out.push_back(CopyableSpan{std::string(core), words});
    }
  }
  return out;
}

ViolationReport validate_chat_text(std::string_view t, std::string_view draft, const GuardrailConfig& config) {
  ViolationReport r;
  for (const auto& span : detect_copyable_text(t, draft, config)) {
    r.add(Violation::copyable_text, span.text);
  }
  return r;
}

ViolationReport validate_card(const FeedbackCard& card, std::string_view draft, const GuardrailConfig& config) {
  ViolationReport r;
  const bool critique = card.kind == CardKind::critique;
  if (auto why = check_length(card.feedback_text, critique ? TextKind::critique : TextKind::praise, config)) {
    r.add(Violation::over_length, *why);
  }
  if (critique) {
    if (auto why = check_question_ending(card.feedback_text)) r.add(Violation::no_question_ending, *why);
  }
  if (card.hoc_label) {
    const std::string& label = *card.hoc_label;
    if (critique) {
      if (!text::trim(label).empty()) {
        if (auto why = check_hoc_form(label, CardKind::critique, config)) r.add(Violation::hoc_too_long, *why);
      }
    } else if (auto why = check_hoc_form(label, CardKind::praise, config)) {
      r.add(Violation::category_form, *why);
    }
  }
  for (const auto& span : detect_copyable_text(card.feedback_text, draft, config)) {
    r.add(Violation::copyable_text, span.text);
  }
  return r;
}

}  // namespace writor
