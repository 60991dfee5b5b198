#include <gtest/gtest.h>

#include <random>

#include "writor/sentences.hpp"

using namespace writor;

TEST(Sentences, EmptyText) { EXPECT_TRUE(split_sentences("").empty()); }

TEST(Sentences, WhitespaceOnly) { EXPECT_TRUE(split_sentences("  \n\t ").empty()); }

TEST(Sentences, TwoShortSentences) {
  auto s = split_sentences("A cat. A dog?");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], (SentenceSpan{"A cat.", 0, 6}));
  EXPECT_EQ(s[1], (SentenceSpan{"A dog?", 7, 13}));
}

TEST(Sentences, AbbreviationDoesNotSplit) {
  auto s = split_sentences("Dr. Smith wrote. Then left.");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].text, "Dr. Smith wrote.");
  EXPECT_EQ(s[1].text, "Then left.");
}

TEST(Sentences, ExclamationAndClosingQuote) {
  auto s = split_sentences("She said \"Stop!\" Then we ran.");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].text, "She said \"Stop!\"");
}

TEST(Sentences, TrailingTextWithoutTerminator) {
  auto s = split_sentences("First one. And a fragment");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].text, "And a fragment");
}

TEST(Sentences, BlankLineEndsASentence) {
  auto s = split_sentences("Dear Hiring Manager,\n\nI am writing.");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].text, "Dear Hiring Manager,");
}

TEST(Sentences, InitialsAndDecimals) {
  auto s = split_sentences("J. R. Tolkien wrote it. It cost 3.50 dollars.");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].text, "It cost 3.50 dollars.");
}

TEST(Sentences, CustomAbbreviationList) {
  auto abbr = parse_abbreviations("# comment\nfig\n");
  EXPECT_EQ(split_sentences("See fig. 2 for data.", abbr).size(), 1u);
  EXPECT_EQ(split_sentences("See fig. 2 for data.", AbbreviationList{}).size(), 2u);
}

TEST(SentencesProperty, SpansReconstructTextAndAreOrdered) {
  const std::vector<std::string> pieces = {"The", "cat", "sat.", "Dr.", "Who?", "yes!", "e.g.", "\"quoted.\"",
                                           "3.14", "end", "\n\n", "  ", "It’s", "(aside)."};
  std::mt19937 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    int n = static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      text += pieces[rng() % pieces.size()];
      text += (rng() % 4 == 0) ? "  " : " ";
    }
    auto spans = split_sentences(text);
    std::size_t prev_end = 0;
    for (const auto& s : spans) {
      ASSERT_LT(s.start, s.end);
      ASSERT_LE(s.end, text.size());
      ASSERT_GE(s.start, prev_end);
      ASSERT_EQ(text.substr(s.start, s.end - s.start), s.text);
      ASSERT_FALSE(std::isspace(static_cast<unsigned char>(s.text.front())));
      ASSERT_FALSE(std::isspace(static_cast<unsigned char>(s.text.back())));
      prev_end = s.end;
    }
    // Every non-space byte is covered by some span.
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (std::isspace(static_cast<unsigned char>(text[i]))) continue;
      bool covered = false;
      for (const auto& s : spans) covered |= (i >= s.start && i < s.end);
      ASSERT_TRUE(covered) << "byte " << i << " of: " << text;
    }
  }
}
