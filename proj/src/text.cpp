#include "writor/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace writor::text {
namespace {

struct Fold {
  std::string_view from;
  char to;
};

// Typographic characters folded to ASCII by normalize().
constexpr std::array<Fold, 13> kFolds = {{
    {"\u2018", '\''}, {"\u2019", '\''}, {"\u201a", '\''}, {"\u2032", '\''},
    {"\u201c", '"'},  {"\u201d", '"'},  {"\u201e", '"'},  {"\u2033", '"'},
    {"\u2013", '-'},  {"\u2014", '-'},  {"\u2212", '-'},  {"\u2026", '.'},
    {"\u00a0", ' '},
}};

bool is_punct_byte(unsigned char c) { return c < 0x80 && std::ispunct(c); }

// Length of a typographic quote at the front/back of s, or 0.
std::size_t typographic_quote_prefix(std::string_view s) {
  for (std::string_view q : {"‘", "’", "“", "”", "«", "»", "…"}) {
    if (s.starts_with(q)) return q.size();
  }
  return 0;
}

std::size_t typographic_quote_suffix(std::string_view s) {
  for (std::string_view q : {"‘", "’", "“", "”", "«", "»", "…"}) {
    if (s.ends_with(q)) return q.size();
  }
  return 0;
}

}  // namespace

std::size_t scalar_count(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view strip_punct(std::string_view token) {
  for (;;) {
    if (!token.empty() && is_punct_byte(static_cast<unsigned char>(token.front()))) {
      token.remove_prefix(1);
    } else if (std::size_t n = typographic_quote_prefix(token); n > 0) {
      token.remove_prefix(n);
    } else {
      break;
    }
  }
  for (;;) {
    if (!token.empty() && is_punct_byte(static_cast<unsigned char>(token.back()))) {
      token.remove_suffix(1);
    } else if (std::size_t n = typographic_quote_suffix(token); n > 0) {
      token.remove_suffix(n);
    } else {
      break;
    }
  }
  return token;
}

bool has_alnum(std::string_view token) {
  // Typographic punctuation folds to ASCII first; any non-ASCII byte left
  // over belongs to a letter.
  std::string folded = normalize_text(token);
  return std::any_of(folded.begin(), folded.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u);
  });
}

Normalized normalize(std::string_view s) {
  Normalized out;
  out.text.reserve(s.size());
  bool pending_space = false;
  std::size_t i = 0;
  auto emit = [&](char c, std::size_t from, std::size_t to) {
    if (pending_space && !out.text.empty()) {
      out.text.push_back(' ');
      out.origin.push_back(from);
      out.origin_end.push_back(from);
    }
    pending_space = false;
    out.text.push_back(c);
    out.origin.push_back(from);
    out.origin_end.push_back(to);
  };
  while (i < s.size()) {
    const Fold* fold = nullptr;
    for (const auto& f : kFolds) {
      if (s.substr(i).starts_with(f.from)) {
        fold = &f;
        break;
      }
    }
    if (fold != nullptr) {
      if (fold->to == ' ') {
        pending_space = true;
      } else {
        emit(fold->to, i, i + fold->from.size());
      }
      i += fold->from.size();
      continue;
    }
    char c = s[i];
    if (is_space(c)) {
      pending_space = true;
    } else {
      emit((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c, i, i + 1);
    }
    ++i;
  }
  return out;
}

std::string normalize_text(std::string_view s) { return normalize(s).text; }

std::vector<std::string> comparison_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string norm = normalize_text(s);
  for (std::string_view tok : split_whitespace(norm)) {
    std::string_view core = strip_punct(tok);
    if (!core.empty()) out.emplace_back(core);
  }
  return out;
}

bool contains_word_ci(std::string_view haystack, std::string_view word) {
  std::string h = to_lower_ascii(haystack);
  std::string w = to_lower_ascii(word);
  if (w.empty()) return false;
  auto is_word_char = [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u);
  };
  std::size_t pos = 0;
  while ((pos = h.find(w, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || !is_word_char(h[pos - 1]);
    std::size_t after = pos + w.size();
    bool right_ok = after >= h.size() || !is_word_char(h[after]);
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

}  // namespace writor::text
