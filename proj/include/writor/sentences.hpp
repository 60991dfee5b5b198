#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "writor/types.hpp"

namespace writor {

// Lowercase words (without their trailing period) that never end a sentence.
using AbbreviationList = std::set<std::string, std::less<>>;

// The shipped list, parsed once from the embedded data file.
const AbbreviationList& default_abbreviations();
AbbreviationList parse_abbreviations(std::string_view file_text);

// Rule-based segmentation. A sentence ends at a run of . ! ? (plus any
// closing quotes or brackets) followed by whitespace or end of text, unless
// the period closes a guarded abbreviation or a single-letter initial.
// A blank line also ends a sentence, so headings without punctuation stand
// alone. Trailing text without a terminator forms the last sentence.
std::vector<SentenceSpan> split_sentences(
    std::string_view text,
    const AbbreviationList& abbreviations = default_abbreviations());

}  // namespace writor
