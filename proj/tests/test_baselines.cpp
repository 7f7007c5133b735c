#include "reic/baselines.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

namespace reic {
namespace {

constexpr EntityId kTarget = 50;
constexpr EntityId kBridgeA = 60;
constexpr EntityId kBridgeB = 61;

Sentence sent(int tokens, std::vector<EntityId> mentions = {}) {
  Sentence s;
  s.token_count = tokens;
  s.mentions = std::move(mentions);
  return s;
}

std::vector<Index> iota_indices(Index n) {
  std::vector<Index> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), Index{0});
  return v;
}

int total_tokens(const Document& doc, const std::vector<Index>& idx) {
  int sum = 0;
  for (Index i : idx) sum += doc.sentences[static_cast<std::size_t>(i)].token_count;
  return sum;
}

Document random_doc(Rng& rng, int M) {
  std::uniform_int_distribution<int> tokens(1, 120);
  std::uniform_int_distribution<int> pick(0, 5);
  std::vector<Sentence> s;
  for (int m = 0; m < M; ++m) {
    std::vector<EntityId> mentions;
    const int roll = pick(rng);
    if (roll == 0) mentions.push_back(kBridgeA);
    if (roll == 1) mentions = {kBridgeA, kBridgeB};
    if (roll == 2) mentions.push_back(kTarget);
    s.push_back(sent(tokens(rng), mentions));
  }
  return make_document(1, s);
}

TEST(Snippet, WholeDocumentUnderCap) {
  const auto doc = make_document(1, std::vector<Sentence>(6, sent(10)));
  EXPECT_EQ(snippet_select(doc, 2, {}), iota_indices(6));
}

TEST(Snippet, TargetAtStartExpandsForward) {
  const auto doc = make_document(1, std::vector<Sentence>(20, sent(100)));
  EXPECT_EQ(snippet_select(doc, 0, {}), (std::vector<Index>{0, 1, 2, 3, 4}));
}

TEST(Snippet, AlternatesAfterThenBefore) {
  const auto doc = make_document(1, std::vector<Sentence>(20, sent(100)));
  // Target 10 then 11, 9, 12, 8 fill 500 tokens.
  EXPECT_EQ(snippet_select(doc, 10, {}), (std::vector<Index>{8, 9, 10, 11, 12}));
}

TEST(Snippet, OversizedTargetStillIncluded) {
  const auto doc = make_document(1, {sent(10), sent(900), sent(10)});
  EXPECT_EQ(snippet_select(doc, 1, {}), (std::vector<Index>{1}));
}

TEST(Snippet, WindowBoundsRadius) {
  const auto doc = make_document(1, std::vector<Sentence>(20, sent(1)));
  BaselineConfig cfg;
  cfg.window = 2;
  EXPECT_EQ(snippet_select(doc, 5, cfg), (std::vector<Index>{3, 4, 5, 6, 7}));
}

TEST(Snippet, ContiguousWithinCapContainsTarget) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto doc = random_doc(rng, 1 + static_cast<int>(rng() % 40));
    const Index tgt = static_cast<Index>(rng() % static_cast<std::uint64_t>(doc.size()));
    const auto sel = snippet_select(doc, tgt, {});
    ASSERT_FALSE(sel.empty());
    EXPECT_TRUE(std::is_sorted(sel.begin(), sel.end()));
    EXPECT_EQ(sel.back() - sel.front() + 1, static_cast<Index>(sel.size()));
    EXPECT_TRUE(std::find(sel.begin(), sel.end(), tgt) != sel.end());
    if (sel.size() > 1) EXPECT_LE(total_tokens(doc, sel), 512);
  }
}

TEST(BridgeFilter, SortAndTieBreak) {
  const auto doc = make_document(1, {sent(10), sent(10, {kBridgeA, kBridgeA, kBridgeB}), sent(10, {kBridgeA}),
                                     sent(10, {kBridgeB, kBridgeB, kBridgeA})});
  BaselineConfig cfg;
  cfg.filter_cap = 2;
  EXPECT_EQ(bridge_filter_select(doc, {kBridgeA, kBridgeB}, kTarget, cfg), (std::vector<Index>{1, 3}));
}

TEST(BridgeFilter, TargetMentionsCount) {
  const auto doc = make_document(1, {sent(10, {kTarget, kTarget}), sent(10, {kBridgeA}), sent(10)});
  BaselineConfig cfg;
  cfg.filter_cap = 1;
  EXPECT_EQ(bridge_filter_select(doc, {kBridgeA}, kTarget, cfg), (std::vector<Index>{0}));
}

TEST(BridgeFilter, FallsBackToSnippetWithoutBridges) {
  std::vector<Sentence> s(20, sent(100));
  s[7] = sent(100, {kTarget});
  const auto doc = make_document(1, s);
  EXPECT_EQ(bridge_filter_select(doc, {kBridgeA}, kTarget, {}), snippet_select(doc, 7, {}));
}

TEST(BridgeFilter, RespectsTokenCap) {
  std::vector<Sentence> s(10, sent(200, {kBridgeA}));
  const auto doc = make_document(1, s);
  EXPECT_EQ(bridge_filter_select(doc, {kBridgeA}, kTarget, {}), (std::vector<Index>{0, 1}));
}

TEST(BridgeFilter, WithinBothCapsOnRandomDocs) {
  Rng rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    auto doc = random_doc(rng, 1 + static_cast<int>(rng() % 40));
    if (!doc.contains(kTarget)) continue;
    BaselineConfig cfg;
    cfg.filter_cap = 1 + static_cast<int>(rng() % 8);
    const auto sel = bridge_filter_select(doc, {kBridgeA, kBridgeB}, kTarget, cfg);
    ASSERT_FALSE(sel.empty());
    EXPECT_TRUE(std::adjacent_find(sel.begin(), sel.end(), std::greater_equal<>()) == sel.end());
    if (sel.size() > 1) EXPECT_LE(total_tokens(doc, sel), cfg.token_cap);
    const bool any_bridge = std::any_of(doc.sentences.begin(), doc.sentences.end(), [](const Sentence& x) {
      return x.mentions_entity(kBridgeA) || x.mentions_entity(kBridgeB);
    });
    if (any_bridge) EXPECT_LE(static_cast<int>(sel.size()), cfg.filter_cap);
    EXPECT_EQ(sel, bridge_filter_select(doc, {kBridgeA, kBridgeB}, kTarget, cfg));
  }
}

TEST(BaselineConfig, RejectsNonPositiveCaps) {
  BaselineConfig cfg;
  cfg.token_cap = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.filter_cap = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace reic
