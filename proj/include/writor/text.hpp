#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace writor::text {

// Number of Unicode scalar values in a UTF-8 string.
std::size_t scalar_count(std::string_view s);

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);
bool is_space(char c);

std::vector<std::string_view> split_whitespace(std::string_view s);

// Strips leading/trailing ASCII punctuation and typographic quotes.
std::string_view strip_punct(std::string_view token);
bool has_alnum(std::string_view token);

// A normalized view of a string: lowercase ASCII, typographic quotes and
// dashes folded to ASCII, whitespace runs collapsed to one space, leading and
// trailing whitespace removed. `origin[i]` is the source byte offset that
// produced normalized byte i; `origin_end[i]` is one past its last source byte.
struct Normalized {
  std::string text;
  std::vector<std::size_t> origin;
  std::vector<std::size_t> origin_end;
};

Normalized normalize(std::string_view s);
std::string normalize_text(std::string_view s);

// Tokens compared by the fuzzy matcher: normalized, punctuation stripped.
std::vector<std::string> comparison_tokens(std::string_view s);

bool contains_word_ci(std::string_view haystack, std::string_view word);

}  // namespace writor::text
