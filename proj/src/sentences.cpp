#include "writor/sentences.hpp"

#include "writor/resources.hpp"
#include "writor/text.hpp"

namespace writor {
namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Closing punctuation allowed between a terminator and the following space.
std::size_t closer_length(std::string_view s, std::size_t i) {
  if (i >= s.size()) return 0;
  char c = s[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') return 1;
  for (std::string_view q : {"”", "’", "»"}) {
    if (s.substr(i).starts_with(q)) return q.size();
  }
  return 0;
}

// The word ending right before position `dot` (exclusive), lowercased and
// with leading punctuation removed.
std::string word_before(std::string_view s, std::size_t sentence_start, std::size_t dot) {
  std::size_t b = dot;
  while (b > sentence_start && !text::is_space(s[b - 1])) --b;
  std::string_view w = s.substr(b, dot - b);
  while (!w.empty() && (w.front() == '(' || w.front() == '"' || w.front() == '\'' ||
                        w.front() == '[')) {
    w.remove_prefix(1);
  }
  return text::to_lower_ascii(w);
}

bool is_blank_line_at(std::string_view s, std::size_t i) {
  // s[i] is '\n'; a blank line follows if another '\n' comes before any
  // non-whitespace character.
  for (std::size_t j = i + 1; j < s.size(); ++j) {
    if (s[j] == '\n') return true;
    if (!text::is_space(s[j])) return false;
  }
  return false;
}

}  // namespace

AbbreviationList parse_abbreviations(std::string_view file_text) {
  AbbreviationList out;
  std::size_t pos = 0;
  while (pos <= file_text.size()) {
    std::size_t nl = file_text.find('\n', pos);
    if (nl == std::string_view::npos) nl = file_text.size();
    std::string_view line = text::trim(file_text.substr(pos, nl - pos));
    if (!line.empty() && line.front() != '#') out.insert(text::to_lower_ascii(line));
    pos = nl + 1;
  }
  return out;
}

const AbbreviationList& default_abbreviations() {
  static const AbbreviationList list = parse_abbreviations(resources::get("abbreviations.txt"));
  return list;
}

std::vector<SentenceSpan> split_sentences(std::string_view s, const AbbreviationList& abbreviations) {
  std::vector<SentenceSpan> out;
  std::size_t i = 0;
  auto emit = [&](std::size_t start, std::size_t end) {
    while (end > start && text::is_space(s[end - 1])) --end;
    if (end > start) out.push_back(SentenceSpan{std::string(s.substr(start, end - start)), start, end});
  };
  while (i < s.size()) {
    while (i < s.size() && text::is_space(s[i])) ++i;
    if (i >= s.size()) break;
    const std::size_t start = i;
    std::size_t end = s.size();
    while (i < s.size()) {
      char c = s[i];
      if (c == '\n' && is_blank_line_at(s, i)) {
        end = i;
        break;
      }
      if (!is_terminator(c)) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < s.size() && is_terminator(s[j])) ++j;
      while (std::size_t n = closer_length(s, j)) j += n;
      bool at_boundary = j >= s.size() || text::is_space(s[j]);
      if (!at_boundary) {
        i = j;
        continue;
      }
      if (c == '.' && j == i + 1) {
        std::string w = word_before(s, start, i);
        // "J. Smith": a lone capital other than the pronoun I.
        bool initial = w.size() == 1 && s[i - 1] >= 'A' && s[i - 1] <= 'Z' && s[i - 1] != 'I';
        if (abbreviations.contains(w) || initial) {
          i = j;
          continue;
        }
      }
      end = j;
      i = j;
      break;
    }
    if (end == s.size()) i = s.size();
    emit(start, end);
  }
  return out;
}

}  // namespace writor
