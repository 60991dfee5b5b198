#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace writor {

enum class PosTag { det, poss, pron, prep, conj, aux, neg, adv, verb, adj, num, noun, punct };

std::string_view to_string(PosTag t);

struct TaggedToken {
  std::string text;  // lowercase, punctuation stripped
  PosTag tag = PosTag::noun;
  bool boundary_after = false;  // token was followed by , ; : . ! ? or similar
};

// Closed-class lists and a few open-class words, then suffix rules, then
// NOUN. Data format: "token<TAB>TAG" per line, '#' comments.
class PosTagger {
 public:
  static const PosTagger& bundled();
  static PosTagger parse(std::string_view lexicon_text);

  PosTag tag_word(std::string_view lowercase_word) const;
  std::vector<TaggedToken> tag(std::string_view text) const;

 private:
  std::map<std::string, PosTag, std::less<>> lexicon_;
};

// Data format: "token<TAB>valence" per line; negators one per line.
class SentimentLexicon {
 public:
  static const SentimentLexicon& bundled();
  static SentimentLexicon parse(std::string_view valence_text, std::string_view negation_text);

  const double* valence(std::string_view lowercase_word) const;
  bool is_negator(std::string_view lowercase_word) const;

 private:
  std::map<std::string, double, std::less<>> valence_;
  std::set<std::string, std::less<>> negators_;
};

struct SentimentOptions {
  std::size_t negation_window = 3;
  double alpha = 15.0;
};

struct MetricVector {
  std::size_t length_words = 0;
  std::size_t specificity_chunks = 0;
  double sentiment = 0.0;

  bool operator==(const MetricVector&) const = default;
};

// Whitespace tokens that contain at least one letter or digit.
std::size_t count_words(std::string_view text);

// Maximal runs of (DET|POSS)? (ADJ|NUM)* NOUN+ within punctuation-free stretches.
std::size_t count_noun_chunks(std::string_view text, const PosTagger& tagger = PosTagger::bundled());
std::vector<std::string> noun_chunks(std::string_view text, const PosTagger& tagger = PosTagger::bundled());

// Raw valence sum with negation flips; a negator flips the next
// `negation_window` tokens.
double raw_sentiment(std::string_view text, const SentimentLexicon& lexicon = SentimentLexicon::bundled(),
                     const SentimentOptions& options = {});

// raw / sqrt(raw^2 + alpha), in (-1, 1).
double score_sentiment(std::string_view text, const SentimentLexicon& lexicon = SentimentLexicon::bundled(),
                       const SentimentOptions& options = {});

MetricVector measure(std::string_view text);

// sha256 of the bundled tagger lexicon, valence lexicon and negation list.
std::string metrics_data_hash();

}  // namespace writor
