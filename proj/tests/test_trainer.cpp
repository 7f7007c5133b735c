#include "oracles.hpp"

#include "reic/synthetic.hpp"
#include "reic/trainer.hpp"

#include <gtest/gtest.h>

namespace reic {
namespace {

SyntheticConfig tiny_synthetic() {
  SyntheticConfig s;
  s.n_bags = 12;
  s.n_eval_bags = 8;
  s.n_relations = 3;
  s.sentences_per_doc = 14;
  s.paths_per_bag = 2;
  s.dim = 6;
  s.evidence_offset_min = 4;
  s.n_distractor_entities = 6;
  s.seed = 21;
  return s;
}

TrainConfig tiny_train() {
  TrainConfig c;
  c.epochs = 2;
  c.batch_size = 4;
  c.T = 4;
  c.policy_hidden = 6;
  c.head_hidden = 6;
  c.lr_re = 1e-2;
  c.master_seed = 5;
  return c;
}

RewardConfig reward_for(const TrainConfig& c) {
  RewardConfig r;
  r.variant = c.head;
  return r;
}

TEST(Train, ZeroEpochsReturnsInitialModels) {
  const auto data = generate_synthetic(tiny_synthetic());
  auto cfg = tiny_train();
  cfg.epochs = 0;
  auto result = train<double>(data.train, data.store, cfg, reward_for(cfg));
  EXPECT_TRUE(result.history.steps.empty());
  EXPECT_TRUE(result.history.epochs.empty());
  auto init = init_models<double>(cfg, data.store.dim(), data.train.num_relations());
  EXPECT_EQ(nn::flatten_values<double>(result.models.parameters()), nn::flatten_values<double>(init.parameters()));
}

TEST(Train, SameSeedsGiveIdenticalHistoryAndModels) {
  const auto data = generate_synthetic(tiny_synthetic());
  const auto cfg = tiny_train();
  auto a = train<double>(data.train, data.store, cfg, reward_for(cfg));
  auto b = train<double>(data.train, data.store, cfg, reward_for(cfg));
  ASSERT_EQ(a.history.steps.size(), 6u);  // 12 bags / batch 4 * 2 epochs
  for (std::size_t k = 0; k < a.history.steps.size(); ++k) {
    EXPECT_EQ(a.history.steps[k].reward, b.history.steps[k].reward);
    EXPECT_EQ(a.history.steps[k].reward_ema, b.history.steps[k].reward_ema);
    EXPECT_EQ(a.history.steps[k].re_loss, b.history.steps[k].re_loss);
  }
  EXPECT_EQ(nn::flatten_values<double>(a.models.parameters()), nn::flatten_values<double>(b.models.parameters()));

  auto other = cfg;
  other.master_seed = 6;
  auto c = train<double>(data.train, data.store, other, reward_for(other));
  EXPECT_NE(nn::flatten_values<double>(c.models.parameters()), nn::flatten_values<double>(a.models.parameters()));
}

TEST(Train, HistoryShapeAndEma) {
  const auto data = generate_synthetic(tiny_synthetic());
  const auto cfg = tiny_train();
  const auto h = train<double>(data.train, data.store, cfg, reward_for(cfg)).history;
  ASSERT_EQ(h.epochs.size(), 2u);
  ASSERT_FALSE(h.steps.empty());
  EXPECT_EQ(h.steps[0].reward_ema, h.steps[0].reward);
  for (std::size_t k = 1; k < h.steps.size(); ++k) {
    EXPECT_EQ(h.steps[k].step, static_cast<long>(k));
    EXPECT_NEAR(h.steps[k].reward_ema, 0.99 * h.steps[k - 1].reward_ema + 0.01 * h.steps[k].reward, 1e-12);
    EXPECT_GE(h.steps[k].reward, 0.0);  // end-to-end rewards are clipped
  }
}

TEST(Train, FixedSelectorsNeverTouchThePolicy) {
  const auto data = generate_synthetic(tiny_synthetic());
  for (auto kind : {SelectorKind::Snippet, SelectorKind::Bridge}) {
    auto cfg = tiny_train();
    cfg.selector = kind;
    auto result = train<double>(data.train, data.store, cfg, reward_for(cfg));
    auto init = init_models<double>(cfg, data.store.dim(), data.train.num_relations());
    EXPECT_EQ(nn::flatten_values<double>(result.models.policy.parameters()),
              nn::flatten_values<double>(init.policy.parameters()));
    EXPECT_NE(nn::flatten_values<double>(result.models.head.parameters()),
              nn::flatten_values<double>(init.head.parameters()));
  }
}

TEST(Train, ThresholdVariantAndFloatRun) {
  const auto data = generate_synthetic(tiny_synthetic());
  auto cfg = tiny_train();
  cfg.head = HeadVariant::Threshold;
  cfg.selector = SelectorKind::OneStep;
  auto result = train<float>(data.train, data.store, cfg, reward_for(cfg));
  for (const auto& s : result.history.steps) {
    EXPECT_TRUE(std::isfinite(s.reward));
    EXPECT_TRUE(std::isfinite(s.re_loss));
  }
}

TEST(Train, MismatchedRewardVariantRejected) {
  const auto data = generate_synthetic(tiny_synthetic());
  auto cfg = tiny_train();
  RewardConfig r;
  r.variant = HeadVariant::Threshold;
  EXPECT_THROW(train<double>(data.train, data.store, cfg, r), ConfigError);
}

TEST(Train, MissingEmbeddingNamesKey) {
  auto data = generate_synthetic(tiny_synthetic());
  EmbeddingStore partial(data.store.dim());
  const auto& bag = data.train.bags[0];
  const DocId dropped = bag.paths[0].tail_doc;
  for (const auto& [key, rows] : data.store.entries())
    if (key.first != dropped) partial.insert(key.first, key.second, rows);
  try {
    train<double>(data.train, partial, tiny_train(), reward_for(tiny_train()));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(std::to_string(dropped)), std::string::npos);
  }
}

TEST(Evaluate, ArgmaxIsDeterministic) {
  const auto data = generate_synthetic(tiny_synthetic());
  const auto cfg = tiny_train();
  const auto models = train<double>(data.train, data.store, cfg, reward_for(cfg)).models;
  const auto a = evaluate(models, data.eval, data.store, cfg);
  const auto b = evaluate(models, data.eval, data.store, cfg);
  ASSERT_EQ(a.predictions.size(), b.predictions.size());
  for (std::size_t k = 0; k < a.predictions.size(); ++k) EXPECT_EQ(a.predictions[k].score, b.predictions[k].score);
  for (std::size_t k = 0; k < a.selections.size(); ++k)
    EXPECT_EQ(a.selections[k].head_sentences, b.selections[k].head_sentences);
  EXPECT_EQ(a.predictions.size(), data.eval.bags.size() * 3);
}

TEST(Evaluate, GoldScoredHighestGivesPerfectAuc) {
  // Noise-free corpus, bridge filter (keeps the evidence sentence), and a
  // threshold head whose score for relation r is tanh of the mean signature
  // coordinate r on each side. N/A paths score exactly 0 everywhere.
  auto s = tiny_synthetic();
  s.noise_sigma = 0.0;
  const auto data = generate_synthetic(s);
  auto cfg = tiny_train();
  cfg.selector = SelectorKind::Bridge;
  cfg.head = HeadVariant::Threshold;
  cfg.head_hidden = s.n_relations;
  auto models = init_models<double>(cfg, s.dim, s.n_relations);
  auto& head = models.head;
  head.hidden.weight.setZero();
  head.hidden.bias.setZero();
  for (int r = 0; r < s.n_relations; ++r) {
    head.hidden.weight(r, r) = 1.0;
    head.hidden.weight(r, s.dim + r) = 1.0;
  }
  head.out.weight.setIdentity();
  head.out.bias.setZero();
  const auto result = evaluate(models, data.eval, data.store, cfg);
  EXPECT_DOUBLE_EQ(result.metrics.auc, 1.0);
  EXPECT_DOUBLE_EQ(result.metrics.f1, 1.0);
  EXPECT_DOUBLE_EQ(result.metrics.evidence_recall, 1.0);
}

Sentence sent(std::vector<EntityId> mentions, bool evidence = false) {
  Sentence x;
  x.token_count = 5;
  x.mentions = std::move(mentions);
  if (evidence) x.evidence = true;
  return x;
}

TEST(Evaluate, EvidenceRecallHandCountedFixture) {
  // Token cap 10 with 5-token sentences: the snippet keeps the target and the
  // sentence right after it.
  Corpus c;
  c.entities = {"h", "t", "b"};
  c.relations = {"r"};
  c.add_document(make_document(1, {sent({0}), sent({0, 2}, true), sent({}), sent({})}));
  c.add_document(make_document(2, {sent({1}), sent({1, 2}, true), sent({}), sent({})}));
  c.add_document(make_document(3, {sent({0}), sent({0, 2}, true), sent({}), sent({})}));
  c.add_document(make_document(4, {sent({1}), sent({}), sent({}), sent({1, 2}, true)}));
  c.add_document(make_document(5, {sent({0, 2}), sent({})}));
  c.add_document(make_document(6, {sent({1, 2}), sent({})}));
  c.bags = {Bag{0, 1, 0, {{1, 2, {2}}}, std::vector<bool>{true}},
            Bag{0, 1, 0, {{3, 4, {2}}}, std::vector<bool>{true}},
            Bag{0, 1, kNoRelation, {{5, 6, {2}}}, std::vector<bool>{false}}};
  EmbeddingStore store(2);
  const std::pair<DocId, EntityId> keys[] = {{1, 0}, {2, 1}, {3, 0}, {4, 1}, {5, 0}, {6, 1}};
  for (auto [doc, ent] : keys) store.insert(doc, ent, EmbeddingMatrix::Zero(c.document(doc).size(), 2));

  auto cfg = tiny_train();
  cfg.selector = SelectorKind::Snippet;
  cfg.token_cap = 10;
  const auto models = init_models<double>(cfg, 2, 1);
  const auto result = evaluate(models, c, store, cfg);
  ASSERT_EQ(result.path_recall.size(), 3u);
  EXPECT_DOUBLE_EQ(result.path_recall[0], 1.0);
  EXPECT_DOUBLE_EQ(result.path_recall[1], 0.5);
  EXPECT_LT(result.path_recall[2], 0.0);
  EXPECT_DOUBLE_EQ(result.metrics.evidence_recall, 0.75);
}

}  // namespace
}  // namespace reic
