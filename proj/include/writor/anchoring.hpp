#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "writor/types.hpp"

namespace writor {

inline constexpr double kNormalizedConfidence = 0.95;
inline constexpr double kFuzzyThreshold = 0.80;

// 1 - (token edit distance / max token count); 1.0 for two empty inputs.
double token_similarity(const std::vector<std::string>& a,
                        const std::vector<std::string>& b);

// Exact substring, then normalized substring, then the most similar draft
// sentence at or above kFuzzyThreshold. First occurrence wins ties.
TextAnchor resolve_anchor(std::string_view quoted, const Draft& draft);

// Anchor covering exactly [start, end) of the draft; PreconditionError when
// the range is out of bounds, empty, or only whitespace.
TextAnchor anchor_span(const Draft& draft, std::size_t start, std::size_t end);

// Re-resolves every card anchor against new_draft, which must be the next
// version of old_draft. An exact anchor whose text is still at the same
// offsets keeps them.
std::vector<FeedbackCard> rebind_anchors(std::vector<FeedbackCard> cards,
                                         const Draft& old_draft, const Draft& new_draft);

}  // namespace writor
