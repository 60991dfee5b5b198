#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "writor/anchoring.hpp"
#include "writor/errors.hpp"
#include "writor/text.hpp"
#include "oracles.hpp"

using namespace writor;
using writor::oracles::oracle_similarity;

namespace {

std::string slice(const Draft& d, const TextAnchor& a) { return d.content.substr(*a.start, *a.end - *a.start); }

}  // namespace

TEST(Anchor, ExactMatchHasOffsets) {
  Draft d = Draft::make("Parks matter. Cars do not. Parks matter most of all.", 2);
  auto a = resolve_anchor("Cars do not.", d);
  EXPECT_EQ(a.resolution, AnchorResolution::exact);
  EXPECT_EQ(a.confidence, 1.0);
  EXPECT_EQ(*a.start, 14u);
  EXPECT_EQ(slice(d, a), "Cars do not.");
  EXPECT_EQ(a.draft_version, 2);
  // First occurrence wins.
  EXPECT_EQ(*resolve_anchor("Parks matter", d).start, 0u);
}

TEST(Anchor, CurlyApostropheIsNormalized) {
  Draft d = Draft::make("Intro. The reader's view changes everything. End.", 1);
  auto a = resolve_anchor("The reader’s view changes everything.", d);
  EXPECT_EQ(a.resolution, AnchorResolution::normalized);
  EXPECT_DOUBLE_EQ(a.confidence, kNormalizedConfidence);
  EXPECT_EQ(slice(d, a), "The reader's view changes everything.");
}

TEST(Anchor, WhitespaceAndCaseNormalized) {
  Draft d = Draft::make("One.\nThe   city needs\tmore parks. Two.", 1);
  auto a = resolve_anchor("the city NEEDS more parks.", d);
  EXPECT_EQ(a.resolution, AnchorResolution::normalized);
  EXPECT_EQ(slice(d, a), "The   city needs\tmore parks.");
}

TEST(Anchor, FuzzyTwelveTokensTwoChanged) {
  Draft d = Draft::make(
      "Cities should turn unused parking lots into small parks for every neighborhood. "
      "Traffic would barely change.",
      1);
  // 12 tokens, two substituted.
  auto a = resolve_anchor("Cities should turn empty parking lots into small gardens for every neighborhood.", d);
  EXPECT_EQ(a.resolution, AnchorResolution::fuzzy);
  EXPECT_NEAR(a.confidence, 10.0 / 12.0, 1e-12);
  EXPECT_EQ(slice(d, a), d.sentence_index[0].text);
}

TEST(Anchor, BelowThresholdIsUnanchored) {
  Draft d = Draft::make(
      "Cities should turn unused parking lots into small parks for every neighborhood.", 1);
  // Three of twelve changed: 0.75.
  auto a = resolve_anchor("Towns should turn empty parking lots into small gardens for every neighborhood.", d);
  EXPECT_EQ(a.resolution, AnchorResolution::unanchored);
  EXPECT_FALSE(a.start);
  EXPECT_FALSE(a.end);
  EXPECT_EQ(a.confidence, 0.0);
  EXPECT_EQ(a.quoted_sentence, "Towns should turn empty parking lots into small gardens for every neighborhood.");
}

TEST(Anchor, EmptyQuoteRejected) {
  Draft d = Draft::make("Hi there.", 1);
  EXPECT_THROW(resolve_anchor("", d), PreconditionError);
  EXPECT_THROW(resolve_anchor("  \n", d), PreconditionError);
}

TEST(Anchor, Similarity) {
  EXPECT_EQ(token_similarity({}, {}), 1.0);
  EXPECT_EQ(token_similarity({"a"}, {}), 0.0);
  EXPECT_DOUBLE_EQ(token_similarity({"a", "b", "c", "d"}, {"a", "c", "d"}), 0.75);
}

TEST(AnchorSpan, Bounds) {
  Draft d = Draft::make("Hello world.  Next.", 1);
  auto a = anchor_span(d, 6, 12);
  EXPECT_EQ(a.quoted_sentence, "world.");
  EXPECT_EQ(a.resolution, AnchorResolution::exact);
  EXPECT_THROW(anchor_span(d, 3, 3), PreconditionError);
  EXPECT_THROW(anchor_span(d, 5, 4), PreconditionError);
  EXPECT_THROW(anchor_span(d, 0, 100), PreconditionError);
  EXPECT_THROW(anchor_span(d, 12, 14), PreconditionError);
}

TEST(Rebind, KeepsExactOffsetsAndTracksMovedText) {
  Draft v1 = Draft::make("Alpha beta gamma. Delta epsilon zeta.", 1);
  Draft v2 = Draft::make("New opening line here. Alpha beta gamma. Delta epsilon zeta.", 2);
  FeedbackCard c;
  c.anchor = resolve_anchor("Delta epsilon zeta.", v1);
  c.anchor.insertion_point = true;
  auto out = rebind_anchors({c}, v1, v2);
  EXPECT_EQ(out[0].anchor.resolution, AnchorResolution::exact);
  EXPECT_EQ(slice(v2, out[0].anchor), "Delta epsilon zeta.");
  EXPECT_EQ(out[0].anchor.draft_version, 2);
  EXPECT_TRUE(out[0].anchor.insertion_point);
  EXPECT_THROW(rebind_anchors({c}, v1, Draft::make("x", 3)), PreconditionError);
}

TEST(Rebind, VanishedSentenceDegrades) {
  Draft v1 = Draft::make("The mayor should act now on parks. Other text.", 1);
  Draft v2 = Draft::make("The mayor must act now on parks. Other text.", 2);
  Draft v3 = Draft::make("Completely different words appear.", 3);
  FeedbackCard c;
  c.anchor = resolve_anchor("The mayor should act now on parks.", v1);
  auto two = rebind_anchors({c}, v1, v2);
  EXPECT_EQ(two[0].anchor.resolution, AnchorResolution::fuzzy);
  auto three = rebind_anchors(two, v2, v3);
  EXPECT_EQ(three[0].anchor.resolution, AnchorResolution::unanchored);
  EXPECT_EQ(three[0].anchor.draft_version, 3);
  EXPECT_EQ(three[0].anchor.quoted_sentence, "The mayor should act now on parks.");
}

// --- property suite over generated (draft, mutation) pairs -------------


TEST(AnchorProperty, TwoHundredMutations) {
  std::mt19937 rng(2024);
  int exact = 0, fuzzy = 0, unanchored = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto [d, q] = writor::testing::anchor_mutation(rng);
    TextAnchor a = resolve_anchor(q, d);
    switch (a.resolution) {
      case AnchorResolution::exact:
        ++exact;
        EXPECT_EQ(a.confidence, 1.0);
        EXPECT_EQ(slice(d, a), a.quoted_sentence);
        EXPECT_EQ(a.quoted_sentence, std::string(text::trim(q)));
        break;
      case AnchorResolution::normalized:
        EXPECT_EQ(a.confidence, kNormalizedConfidence);
        EXPECT_EQ(text::normalize_text(slice(d, a)), text::normalize_text(q));
        break;
      case AnchorResolution::fuzzy: {
        ++fuzzy;
        EXPECT_GE(a.confidence, kFuzzyThreshold);
        double sim = oracle_similarity(text::comparison_tokens(q), text::comparison_tokens(slice(d, a)));
        EXPECT_NEAR(a.confidence, sim, 1e-12);
        // No other sentence is strictly more similar.
        for (const auto& s : d.sentence_index) {
          EXPECT_LE(oracle_similarity(text::comparison_tokens(q), text::comparison_tokens(s.text)), sim + 1e-12);
        }
        break;
      }
      case AnchorResolution::unanchored:
        ++unanchored;
        EXPECT_FALSE(a.start);
        for (const auto& s : d.sentence_index) {
          EXPECT_LT(oracle_similarity(text::comparison_tokens(q), text::comparison_tokens(s.text)), kFuzzyThreshold);
        }
        break;
    }
    if (a.anchored()) {
      ASSERT_TRUE(a.start && a.end);
      EXPECT_LE(*a.end, d.content.size());
      EXPECT_LT(*a.start, *a.end);
    }

    // Rebinding onto an unchanged next version is idempotent.
    FeedbackCard c;
    c.anchor = a;
    Draft next = Draft::make(d.content, 2);
    Draft third = Draft::make(d.content, 3);
    auto once = rebind_anchors({c}, d, next);
    auto twice = rebind_anchors(once, next, third);
    EXPECT_EQ(once[0].anchor.resolution, a.resolution);
    EXPECT_EQ(once[0].anchor.start, a.start);
    EXPECT_EQ(once[0].anchor.end, a.end);
    EXPECT_EQ(once[0].anchor.confidence, a.confidence);
    TextAnchor t = twice[0].anchor;
    t.draft_version = 2;
    EXPECT_EQ(t, once[0].anchor);
  }
  // The generator exercises every resolution.
  EXPECT_GT(exact, 0);
  EXPECT_GT(fuzzy, 0);
  EXPECT_GT(unanchored, 0);
}
