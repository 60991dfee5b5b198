#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "writor/types.hpp"

namespace writor {

enum class Violation { over_length, no_question_ending, hoc_too_long, category_form, copyable_text };

std::string_view to_string(Violation v);
Violation parse_violation(std::string_view s);
const std::vector<Violation>& all_violations();

struct GuardrailConfig {
  int version = 1;
  std::size_t critique_max_chars = 700;
  std::size_t praise_max_chars = 400;
  std::size_t copy_word_threshold = 5;
  std::vector<std::string> cue_phrases;
  std::vector<std::string> praise_words;
  std::vector<std::pair<std::string, std::string>> quote_pairs;

  // The shipped data/guardrails.json.
  static GuardrailConfig defaults();
  static GuardrailConfig from_json(const nlohmann::json& j);
  static GuardrailConfig load(const std::string& path);
  nlohmann::json to_json() const;
  // sha256 over the canonical JSON dump; embedded in audit reports.
  std::string hash() const;
};

struct ViolationReport {
  std::set<Violation> flags;
  std::map<Violation, std::string> evidence;

  bool clean() const { return flags.empty(); }
  bool has(Violation v) const { return flags.contains(v); }
  void add(Violation v, std::string why);
  std::vector<std::string> labels() const;
};

enum class TextKind { critique, praise, chat };

// Limits count Unicode scalar values and are inclusive.
std::optional<std::string> check_length(std::string_view text, TextKind kind,
                                        const GuardrailConfig& config);

// Passes when the last character, after trailing whitespace and closing
// quotes/brackets are removed, is '?'.
std::optional<std::string> check_question_ending(std::string_view text);

// Critique labels: at most two whitespace-separated words. Praise labels:
// must contain one of the praise words (case-insensitive, whole word).
std::optional<std::string> check_hoc_form(std::string_view label, CardKind kind,
                                          const GuardrailConfig& config);

struct CopyableSpan {
  std::string text;
  std::size_t words = 0;
};

// Candidate insertable spans: quoted passages and the remainder of the
// sentence after a cue phrase. A candidate flags when it has at least
// `config.copy_word_threshold` words and does not occur in the draft after
// normalization. Returns every flagging span, in text order.
std::vector<CopyableSpan> detect_copyable_text(std::string_view feedback_text,
                                               std::string_view draft_content,
                                               const GuardrailConfig& config);

// Applies the rules for the card's kind: length, question ending
// (critiques), label form (when a label exists), copyable text.
ViolationReport validate_card(const FeedbackCard& card, std::string_view draft_content,
                              const GuardrailConfig& config);

// Chat and Find Example turns: copyable text only.
ViolationReport validate_chat_text(std::string_view text, std::string_view draft_content,
                                   const GuardrailConfig& config);

}  // namespace writor
