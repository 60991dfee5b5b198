#include "writor/anchoring.hpp"

#include <algorithm>

#include "writor/errors.hpp"
#include "writor/text.hpp"

namespace writor {
namespace {

std::size_t token_edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

TextAnchor unanchored(std::string quoted, int version) {
  TextAnchor a;
  a.quoted_sentence = std::move(quoted);
  a.draft_version = version;
  a.confidence = 0.0;
  a.resolution = AnchorResolution::unanchored;
  return a;
}

}  // namespace

double token_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  std::size_t d = token_edit_distance(a, b);
  return static_cast<double>(longest - d) / static_cast<double>(longest);
}

TextAnchor resolve_anchor(std::string_view quoted_raw, const Draft& draft) {
  std::string_view quoted = text::trim(quoted_raw);
  if (quoted.empty()) throw PreconditionError("cannot anchor an empty quotation");
  const std::string& content = draft.content;

  if (std::size_t pos = content.find(quoted); pos != std::string::npos) {
    TextAnchor a;
    a.quoted_sentence = std::string(quoted);
    a.start = pos;
    a.end = pos + quoted.size();
    a.draft_version = draft.version;
    a.confidence = 1.0;
    a.resolution = AnchorResolution::exact;
    return a;
  }

  const text::Normalized norm_draft = text::normalize(content);
  const std::string norm_quote = text::normalize_text(quoted);
  if (!norm_quote.empty()) {
    if (std::size_t pos = norm_draft.text.find(norm_quote); pos != std::string::npos) {
      TextAnchor a;
      a.quoted_sentence = std::string(quoted);
      a.start = norm_draft.origin[pos];
      a.end = norm_draft.origin_end[pos + norm_quote.size() - 1];
      a.draft_version = draft.version;
      a.confidence = kNormalizedConfidence;
      a.resolution = AnchorResolution::normalized;
      return a;
    }
  }

  const auto quote_tokens = text::comparison_tokens(quoted);
  const SentenceSpan* best = nullptr;
  double best_sim = -1.0;
  for (const auto& s : draft.sentence_index) {
    double sim = token_similarity(quote_tokens, text::comparison_tokens(s.text));
    if (sim > best_sim) {
      best_sim = sim;
      best = &s;
    }
  }
  if (best != nullptr && best_sim >= kFuzzyThreshold) {
    TextAnchor a;
    a.quoted_sentence = std::string(quoted);
    a.start = best->start;
    a.end = best->end;
    a.draft_version = draft.version;
    a.confidence = best_sim;
    a.resolution = AnchorResolution::fuzzy;
    return a;
  }
  return unanchored(std::string(quoted), draft.version);
}

TextAnchor anchor_span(const Draft& draft, std::size_t start, std::size_t end) {
  if (start >= end || end > draft.content.size()) {
    throw PreconditionError("span [" + std::to_string(start) + ", " + std::to_string(end) +
                            ") is empty or outside the draft");
  }
  std::string_view span = std::string_view(draft.content).substr(start, end - start);
  if (text::trim(span).empty()) throw PreconditionError("span contains only whitespace");
  TextAnchor a;
  a.quoted_sentence = std::string(span);
  a.start = start;
  a.end = end;
  a.draft_version = draft.version;
  a.confidence = 1.0;
  a.resolution = AnchorResolution::exact;
  return a;
}

std::vector<FeedbackCard> rebind_anchors(std::vector<FeedbackCard> cards, const Draft& old_draft,
                                         const Draft& new_draft) {
  if (new_draft.version != old_draft.version + 1) {
    throw PreconditionError("rebind expects draft version " + std::to_string(old_draft.version + 1) +
                            ", got " + std::to_string(new_draft.version));
  }
  for (auto& card : cards) {
    TextAnchor& a = card.anchor;
    const bool insertion = a.insertion_point;
    if (a.resolution == AnchorResolution::exact && a.start && a.end && *a.end <= new_draft.content.size() &&
        std::string_view(new_draft.content).substr(*a.start, *a.end - *a.start) == a.quoted_sentence) {
      a.draft_version = new_draft.version;
      continue;
    }
    if (text::trim(a.quoted_sentence).empty()) {
      a = unanchored(a.quoted_sentence, new_draft.version);
    } else {
      a = resolve_anchor(a.quoted_sentence, new_draft);
    }
    a.insertion_point = insertion;
  }
  return cards;
}

}  // namespace writor
