#include <gtest/gtest.h>

#include "writor/text.hpp"

using namespace writor;

TEST(Text, ScalarCountCountsCodePoints) {
  EXPECT_EQ(text::scalar_count(""), 0u);
  EXPECT_EQ(text::scalar_count("abc"), 3u);
  EXPECT_EQ(text::scalar_count("café"), 4u);
  EXPECT_EQ(text::scalar_count("“hi”"), 4u);
  EXPECT_EQ(text::scalar_count("\U0001F600"), 1u);
}

TEST(Text, TrimAndSplit) {
  EXPECT_EQ(text::trim("  a b \n"), "a b");
  EXPECT_EQ(text::trim("   "), "");
  auto parts = text::split_whitespace(" one  two\tthree\n");
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[0], "one");
  EXPECT_EQ(parts[2], "three");
}

TEST(Text, StripPunct) {
  EXPECT_EQ(text::strip_punct("\"word,\""), "word");
  EXPECT_EQ(text::strip_punct("reader's"), "reader's");
  EXPECT_EQ(text::strip_punct("--"), "");
}

TEST(Text, NormalizeFoldsTypographyCaseAndSpace) {
  EXPECT_EQ(text::normalize_text("It’s  A  “Test”"), "it's a \"test\"");
  EXPECT_EQ(text::normalize_text("  lead and trail  "), "lead and trail");
  EXPECT_EQ(text::normalize_text("a b"), "a b");
}

TEST(Text, NormalizeOriginMapsBackToSource) {
  std::string src = "Ab  “C”";
  auto n = text::normalize(src);
  ASSERT_EQ(n.text.size(), n.origin.size());
  ASSERT_EQ(n.text.size(), n.origin_end.size());
  for (std::size_t i = 0; i < n.text.size(); ++i) {
    EXPECT_LE(n.origin[i], n.origin_end[i]);
    EXPECT_LE(n.origin_end[i], src.size());
    if (i > 0) EXPECT_GE(n.origin[i], n.origin[i - 1]);
  }
  // 'c' comes from the byte right after the 3-byte opening quote.
  auto pos = n.text.find('c');
  ASSERT_NE(pos, std::string::npos);
  EXPECT_EQ(src[n.origin[pos]], 'C');
}

TEST(Text, ComparisonTokens) {
  auto t = text::comparison_tokens("Hello, WORLD! (again)");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0], "hello");
  EXPECT_EQ(t[1], "world");
  EXPECT_EQ(t[2], "again");
}

TEST(Text, ContainsWordIsWholeWordAndCaseInsensitive) {
  EXPECT_TRUE(text::contains_word_ci("Strong Thesis", "strong"));
  EXPECT_FALSE(text::contains_word_ci("Stronger thesis", "strong"));
  EXPECT_TRUE(text::contains_word_ci("Well-organized", "well"));
}
