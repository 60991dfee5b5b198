#include "writor/metrics.hpp"

#include <cctype>
#include <cmath>

#include "writor/errors.hpp"
#include "writor/hash.hpp"
#include "writor/resources.hpp"
#include "writor/text.hpp"

namespace writor {
namespace {

struct TagName {
  std::string_view name;
  PosTag tag;
};

constexpr TagName kTagNames[] = {
    {"DET", PosTag::det},   {"POSS", PosTag::poss}, {"PRON", PosTag::pron}, {"PREP", PosTag::prep},
    {"CONJ", PosTag::conj}, {"AUX", PosTag::aux},   {"NEG", PosTag::neg},   {"ADV", PosTag::adv},
    {"VERB", PosTag::verb}, {"ADJ", PosTag::adj},   {"NUM", PosTag::num},   {"NOUN", PosTag::noun},
};

template <typename Fn>
void for_each_data_line(std::string_view data, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    std::size_t nl = data.find('\n', pos);
    if (nl == std::string_view::npos) nl = data.size();
    std::string_view line = text::trim(data.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    fn(line, line_no);
  }
}

bool ends_with(std::string_view w, std::string_view suffix, std::size_t min_len) {
  return w.size() >= min_len && w.ends_with(suffix);
}

bool is_number(std::string_view w) {
  bool digit = false;
  for (char c : w) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c != ',' && c != '.' && c != '%') {
      return false;
    }
  }
  return digit;
}

bool ends_with_boundary_punct(std::string_view raw) {
  std::string folded = text::normalize_text(raw);
  while (!folded.empty()) {
    char c = folded.back();
    if (c == ',' || c == ';' || c == ':' || c == '.' || c == '!' || c == '?' || c == ')' || c == ']' ||
        c == '-') {
      return true;
    }
    if (c == '"' || c == '\'') {
      folded.pop_back();
      continue;
    }
    return false;
  }
  return false;
}

bool starts_with_boundary_punct(std::string_view raw) {
  std::string folded = text::normalize_text(raw);
  return !folded.empty() && (folded.front() == '(' || folded.front() == '[' || folded.front() == '"');
}

// Lowercase core of a raw whitespace token with typographic quotes folded.
std::string token_core(std::string_view raw) {
  return std::string(text::strip_punct(text::normalize_text(raw)));
}

}  // namespace

std::string_view to_string(PosTag t) {
  for (const auto& n : kTagNames) {
    if (n.tag == t) return n.name;
  }
  return "PUNCT";
}

PosTagger PosTagger::parse(std::string_view data) {
  PosTagger t;
  for_each_data_line(data, [&](std::string_view line, std::size_t line_no) {
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw PreconditionError("pos lexicon line " + std::to_string(line_no) + ": expected token<TAB>tag");
    }
    std::string_view word = line.substr(0, tab);
    std::string_view tag = text::trim(line.substr(tab + 1));
    const TagName* found = nullptr;
    for (const auto& n : kTagNames) {
      if (n.name == tag) found = &n;
    }
    if (found == nullptr) {
      throw PreconditionError("pos lexicon line " + std::to_string(line_no) + ": unknown tag " + std::string(tag));
    }
    t.lexicon_.emplace(text::to_lower_ascii(word), found->tag);
  });
  return t;
}

const PosTagger& PosTagger::bundled() {
  static const PosTagger t = parse(resources::get("lexicon/pos_lexicon.txt"));
  return t;
}

PosTag PosTagger::tag_word(std::string_view w) const {
  if (auto it = lexicon_.find(w); it != lexicon_.end()) return it->second;
  if (is_number(w)) return PosTag::num;

  auto lex = [&](std::string_view stem) -> const PosTag* {
    auto it = lexicon_.find(stem);
    return it == lexicon_.end() ? nullptr : &it->second;
  };

  if (w.ends_with("n't")) return PosTag::aux;
  if (w.ends_with("'s") || w.ends_with("s'")) {
    std::string_view stem = w.ends_with("'s") ? w.substr(0, w.size() - 2) : w.substr(0, w.size() - 1);
    if (const PosTag* t = lex(stem); t != nullptr && *t == PosTag::pron) return PosTag::pron;
    return PosTag::poss;
  }
  if (w.ends_with("'re") || w.ends_with("'ve") || w.ends_with("'ll") || w.ends_with("'d") || w.ends_with("'m")) {
    return PosTag::pron;
  }

  // Comparatives and superlatives of listed adjectives: clearer, widest.
  for (std::string_view suffix : {"er", "est"}) {
    if (w.size() > suffix.size() + 2 && w.ends_with(suffix)) {
      std::string_view stem = w.substr(0, w.size() - suffix.size());
      std::string with_e = std::string(stem) + "e";
      const PosTag* t = lex(stem);
      if (t == nullptr) t = lex(with_e);
      if (t == nullptr && stem.size() > 2 && stem[stem.size() - 1] == stem[stem.size() - 2]) {
        t = lex(stem.substr(0, stem.size() - 1));  // bigger -> big
      }
      if (t != nullptr && *t == PosTag::adj) return PosTag::adj;
    }
  }
  // Third-person forms of listed verbs.
  if (w.size() > 3 && w.ends_with('s')) {
    const PosTag* t = lex(w.substr(0, w.size() - 1));
    if ((t == nullptr || *t != PosTag::verb) && w.ends_with("es")) t = lex(w.substr(0, w.size() - 2));
    if (t != nullptr && *t == PosTag::verb) return PosTag::verb;
  }

  if (ends_with(w, "ly", 5)) return PosTag::adv;
  for (std::string_view s : {"tion", "sion", "ment", "ness", "ity", "ance", "ence", "ship", "ism", "ist", "age", "ure"}) {
    if (ends_with(w, s, s.size() + 2)) return PosTag::noun;
  }
  // Plural nouns with a noun suffix: statements, arguments.
  if (w.size() > 4 && w.ends_with('s')) {
    std::string_view stem = w.substr(0, w.size() - 1);
    for (std::string_view s : {"tion", "sion", "ment", "ness", "ance", "ence", "ship", "ist"}) {
      if (ends_with(stem, s, s.size() + 2)) return PosTag::noun;
    }
  }
  for (std::string_view s : {"ous", "ful", "ive", "able", "ible", "al", "ic", "less", "ish", "ary"}) {
    if (ends_with(w, s, s.size() + 3)) return PosTag::adj;
  }
  if (ends_with(w, "ing", 6)) return PosTag::verb;
  if (ends_with(w, "ed", 5)) return PosTag::verb;
  for (std::string_view s : {"ize", "ise", "ify"}) {
    if (ends_with(w, s, s.size() + 3)) return PosTag::verb;
  }
  return PosTag::noun;
}

std::vector<TaggedToken> PosTagger::tag(std::string_view input) const {
  std::vector<TaggedToken> out;
  for (std::string_view raw : text::split_whitespace(input)) {
    if (starts_with_boundary_punct(raw) && !out.empty()) out.back().boundary_after = true;
    std::string core = token_core(raw);
    if (core.empty() || !text::has_alnum(core)) {
      if (!out.empty()) out.back().boundary_after = true;
      continue;
    }
    TaggedToken t;
    t.tag = tag_word(core);
    t.text = std::move(core);
    t.boundary_after = ends_with_boundary_punct(raw);
    out.push_back(std::move(t));
  }
  return out;
}

SentimentLexicon SentimentLexicon::parse(std::string_view valence_text, std::string_view negation_text) {
  SentimentLexicon s;
  for_each_data_line(valence_text, [&](std::string_view line, std::size_t line_no) {
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw PreconditionError("sentiment lexicon line " + std::to_string(line_no) + ": expected token<TAB>valence");
    }
    std::string value(text::trim(line.substr(tab + 1)));
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') {
      throw PreconditionError("sentiment lexicon line " + std::to_string(line_no) + ": bad valence " + value);
    }
    s.valence_.emplace(text::to_lower_ascii(line.substr(0, tab)), v);
  });
  for_each_data_line(negation_text, [&](std::string_view line, std::size_t) {
    s.negators_.emplace(text::to_lower_ascii(line));
  });
  return s;
}

const SentimentLexicon& SentimentLexicon::bundled() {
  static const SentimentLexicon s =
      parse(resources::get("lexicon/sentiment_lexicon.txt"), resources::get("lexicon/negations.txt"));
  return s;
}

const double* SentimentLexicon::valence(std::string_view w) const {
  auto it = valence_.find(w);
  return it == valence_.end() ? nullptr : &it->second;
}

bool SentimentLexicon::is_negator(std::string_view w) const { return negators_.contains(w); }

std::size_t count_words(std::string_view s) {
  std::size_t n = 0;
  for (auto tok : text::split_whitespace(s)) {
    if (text::has_alnum(tok)) ++n;
  }
  return n;
}

namespace {

// [begin, end) token ranges of each chunk.
std::vector<std::pair<std::size_t, std::size_t>> chunk_ranges(const std::vector<TaggedToken>& toks) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t n = toks.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    bool open = true;  // may the run continue past toks[j-1]?
    if (toks[j].tag == PosTag::det || toks[j].tag == PosTag::poss) {
      open = !toks[j].boundary_after;
      ++j;
    }
    while (open && j < n && (toks[j].tag == PosTag::adj || toks[j].tag == PosTag::num)) {
      open = !toks[j].boundary_after;
      ++j;
    }
    std::size_t k = j;
    while (open && k < n && toks[k].tag == PosTag::noun) {
      open = !toks[k].boundary_after;
      ++k;
    }
    if (k > j) {
      out.emplace_back(i, k);
      i = k;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace

std::size_t count_noun_chunks(std::string_view s, const PosTagger& tagger) {
  return chunk_ranges(tagger.tag(s)).size();
}

std::vector<std::string> noun_chunks(std::string_view s, const PosTagger& tagger) {
  auto toks = tagger.tag(s);
  std::vector<std::string> out;
  for (auto [b, e] : chunk_ranges(toks)) {
    std::string chunk;
    for (std::size_t i = b; i < e; ++i) {
      if (!chunk.empty()) chunk += ' ';
      chunk += toks[i].text;
    }
    out.push_back(std::move(chunk));
  }
  return out;
}

double raw_sentiment(std::string_view s, const SentimentLexicon& lexicon, const SentimentOptions& options) {
  double sum = 0.0;
  std::size_t negate_left = 0;
  for (std::string_view raw : text::split_whitespace(s)) {
    std::string w = token_core(raw);
    if (w.empty()) continue;
    if (lexicon.is_negator(w)) {
      negate_left = options.negation_window;
      continue;
    }
    if (const double* v = lexicon.valence(w)) sum += negate_left > 0 ? -*v : *v;
    if (negate_left > 0) --negate_left;
  }
  return sum;
}

double score_sentiment(std::string_view s, const SentimentLexicon& lexicon, const SentimentOptions& options) {
  double raw = raw_sentiment(s, lexicon, options);
  if (raw == 0.0) return 0.0;
  return raw / std::sqrt(raw * raw + options.alpha);
}

MetricVector measure(std::string_view s) {
  return MetricVector{count_words(s), count_noun_chunks(s), score_sentiment(s)};
}

std::string metrics_data_hash() {
  std::string all;
  for (std::string_view name : {"lexicon/pos_lexicon.txt", "lexicon/sentiment_lexicon.txt", "lexicon/negations.txt"}) {
    all += std::string(name) + '\0' + std::string(resources::get(name)) + '\0';
  }
  return sha256_hex(all);
}

}  // namespace writor
