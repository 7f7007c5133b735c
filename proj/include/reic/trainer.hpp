#ifndef REIC_TRAINER_HPP
#define REIC_TRAINER_HPP

#include "reic/baselines.hpp"
#include "reic/corpus.hpp"
#include "reic/embedding_store.hpp"
#include "reic/metrics.hpp"
#include "reic/nn/optim.hpp"
#include "reic/rehead.hpp"
#include "reic/reward.hpp"
#include "reic/selector.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace reic {

enum class SelectorKind { Reic, OneStep, Snippet, Bridge };

struct TrainConfig {
  double lr_policy = 3e-3;
  double lr_re = 3e-5;
  int epochs = 30;
  int batch_size = 4;
  double grad_clip = 5.0;
  double weight_decay = 0.01;
  nn::OptimizerKind optimizer = nn::OptimizerKind::AdamW;
  std::uint64_t master_seed = 0;
  int T = 15;
  int token_cap = 512;
  DecodeMode eval_mode = DecodeMode::Argmax;
  SelectorKind selector = SelectorKind::Reic;
  HeadVariant head = HeadVariant::EndToEnd;
  int policy_hidden = 512;
  int head_hidden = 512;
  double threshold = 0.0;
  int snippet_window = 1000;
  int filter_cap = 16;

  void validate() const {
    if (!(lr_policy > 0.0) || !(lr_re > 0.0)) throw ConfigError("train: learning rates must be positive");
    if (epochs < 0) throw ConfigError("train: epochs must be non-negative");
    if (batch_size < 1) throw ConfigError("train: batch_size must be at least 1");
    if (policy_hidden < 1 || head_hidden < 1) throw ConfigError("train: hidden sizes must be positive");
    if (!std::isfinite(threshold)) throw ConfigError("train: threshold must be finite");
    selector_config(DecodeMode::Sample).validate();
    baseline_config().validate();
  }

  bool learns_policy() const { return selector == SelectorKind::Reic || selector == SelectorKind::OneStep; }

  SelectorConfig selector_config(DecodeMode mode) const {
    return {T, token_cap, selector == SelectorKind::OneStep, mode};
  }
  BaselineConfig baseline_config() const { return {snippet_window, token_cap, filter_cap}; }
};

template <typename Scalar>
struct Models {
  PolicyNetwork<Scalar> policy;
  RelationHead<Scalar> head;

  std::vector<nn::ParamSlot<Scalar>> parameters() {
    auto out = policy.parameters();
    auto h = head.parameters();
    out.insert(out.end(), h.begin(), h.end());
    return out;
  }
};

template <typename Scalar>
Models<Scalar> init_models(const TrainConfig& cfg, Index embedding_dim, int num_relations) {
  Rng rng(derive_seed(cfg.master_seed, 0x1417));
  Models<Scalar> m;
  m.policy = make_policy<Scalar>({embedding_dim, cfg.policy_hidden, cfg.policy_hidden}, rng);
  m.head = make_relation_head<Scalar>(cfg.head, 2 * embedding_dim, cfg.head_hidden, num_relations, &rng);
  m.head.threshold = static_cast<Scalar>(cfg.threshold);
  return m;
}

struct StepRecord {
  long step = 0;
  double reward = 0.0;
  double reward_ema = 0.0;
  double re_loss = 0.0;
  int epoch = 0;
};

struct EpochRecord {
  int epoch = 0;
  double mean_reward = 0.0;
  double mean_re_loss = 0.0;
  double seconds = 0.0;
};

struct TrainHistory {
  static constexpr double kEmaFactor = 0.99;
  std::vector<StepRecord> steps;
  std::vector<EpochRecord> epochs;
};

template <typename Scalar>
struct TrainResult {
  Models<Scalar> models;
  TrainHistory history;
};

template <typename Scalar>
struct DocSelection {
  std::vector<Index> sentences;  // after token capping, selection order
  std::optional<SelectionState<Scalar>> state;
};

template <typename Scalar>
struct PathForward {
  DocSelection<Scalar> head;
  DocSelection<Scalar> tail;
  Vector<Scalar> scores;
  HeadCache<Scalar> cache;
};

namespace detail {

inline std::uint64_t doc_stream(std::uint64_t master, std::uint64_t phase, std::uint64_t epoch, std::size_t bag,
                                std::size_t path, int side) {
  return derive_seed(master, phase, epoch, bag, path, side);
}

template <typename Scalar>
DocSelection<Scalar> select_document(const Models<Scalar>& models, const TrainConfig& cfg, const Document& doc,
                                     EntityId target, const std::vector<EntityId>& bridges, const Matrix<Scalar>& z,
                                     DecodeMode mode, Rng& rng) {
  if (z.rows() != doc.size())
    throw DataError("embedding entry for document " + std::to_string(doc.id) + " has " + std::to_string(z.rows()) +
                    " rows, document has " + std::to_string(doc.size()) + " sentences");
  const Index tgt = target_sentence_index(doc, target);
  DocSelection<Scalar> out;
  switch (cfg.selector) {
    case SelectorKind::Reic:
    case SelectorKind::OneStep: {
      out.state = run_selector(models.policy, z, tgt, cfg.selector_config(mode), rng);
      out.sentences = apply_token_cap(out.state->selected, doc, cfg.token_cap);
      break;
    }
    case SelectorKind::Snippet:
      out.sentences = snippet_select(doc, tgt, cfg.baseline_config());
      break;
    case SelectorKind::Bridge:
      out.sentences = bridge_filter_select(doc, bridges, target, cfg.baseline_config());
      break;
  }
  return out;
}

template <typename Scalar>
PathForward<Scalar> forward_path(const Models<Scalar>& models, const TrainConfig& cfg, const Corpus& corpus,
                                 const EmbeddingStore& store, const Bag& bag, const TextPath& path, DecodeMode mode,
                                 Rng& rng_head, Rng& rng_tail) {
  const auto& hd = corpus.document(path.head_doc);
  const auto& td = corpus.document(path.tail_doc);
  const Matrix<Scalar> zh = store.at(path.head_doc, bag.head).template cast<Scalar>();
  const Matrix<Scalar> zt = store.at(path.tail_doc, bag.tail).template cast<Scalar>();

  PathForward<Scalar> out;
  out.head = select_document(models, cfg, hd, bag.head, path.bridges, zh, mode, rng_head);
  out.tail = select_document(models, cfg, td, bag.tail, path.bridges, zt, mode, rng_tail);
  const Vector<Scalar> rep = path_representation<Scalar>(zh(out.head.sentences, Eigen::all),
                                                         zt(out.tail.sentences, Eigen::all));
  out.scores = score_relations(models.head, rep, &out.cache);
  return out;
}

/// Scores fed to the reward and the ranking: softmax probabilities for the
/// end-to-end head, raw scores for the threshold head.
template <typename Scalar>
Vector<Scalar> reward_scores(const RelationHead<Scalar>& head, const Vector<Scalar>& scores) {
  if (head.variant == HeadVariant::EndToEnd) return nn::log_softmax(scores).array().exp().matrix();
  return scores;
}

template <typename Scalar>
Scalar path_reward(const RelationHead<Scalar>& head, const Vector<Scalar>& scores, RelationId relation,
                   const RewardConfig& rcfg) {
  const Vector<Scalar> y = reward_scores(head, scores);
  return head.variant == HeadVariant::EndToEnd ? reward_end2end(y, relation, rcfg)
                                               : reward_threshold(y, relation, head.threshold, rcfg);
}

}  // namespace detail

/// Joint training: per batch, select sentences for every document of every
/// path with the current policy, score paths, max-aggregate to bags, update
/// the relation head on the bag loss (lr_re) and the policy with REINFORCE
/// on per-path rewards (lr_policy). The two parameter sets never share a
/// gradient.
template <typename Scalar>
TrainResult<Scalar> train(const Corpus& corpus, const EmbeddingStore& store, const TrainConfig& cfg,
                          const RewardConfig& rcfg) {
  cfg.validate();
  rcfg.validate();
  if (rcfg.variant != cfg.head) throw ConfigError("train: reward variant must match the relation head variant");

  TrainResult<Scalar> result{init_models<Scalar>(cfg, store.dim(), corpus.num_relations()), {}};
  auto& models = result.models;
  auto& history = result.history;

  nn::OptState<Scalar> opt_policy;
  opt_policy.kind = cfg.optimizer;
  opt_policy.weight_decay = cfg.weight_decay;
  nn::OptState<Scalar> opt_head = opt_policy;

  std::vector<std::size_t> order(corpus.bags.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  long step = 0;
  double ema = 0.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng shuffle_rng(derive_seed(cfg.master_seed, 0x5EED, static_cast<std::uint64_t>(epoch)));
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[shuffle_rng() % k]);

    double epoch_reward = 0.0;
    double epoch_loss = 0.0;
    long epoch_steps = 0;

    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const auto n_bags = static_cast<Scalar>(stop - start);

      std::vector<std::vector<PathForward<Scalar>>> forwards;
      forwards.reserve(stop - start);  // rollouts point into these
      std::vector<PathRollout<Scalar>> rollouts;
      double loss_sum = 0.0;
      double reward_sum = 0.0;
      std::size_t n_paths = 0;
      models.head.zero_grad();

      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t bag_idx = order[b];
        const Bag& bag = corpus.bags[bag_idx];
        auto& paths = forwards.emplace_back();
        std::vector<Vector<Scalar>> path_scores;
        for (std::size_t p = 0; p < bag.paths.size(); ++p) {
          Rng rh(detail::doc_stream(cfg.master_seed, 1, static_cast<std::uint64_t>(epoch), bag_idx, p, 0));
          Rng rt(detail::doc_stream(cfg.master_seed, 1, static_cast<std::uint64_t>(epoch), bag_idx, p, 1));
          paths.push_back(detail::forward_path(models, cfg, corpus, store, bag, bag.paths[p], DecodeMode::Sample, rh, rt));
          path_scores.push_back(paths.back().scores);
        }

        const auto agg = aggregate_bag<Scalar>(path_scores);
        LossGrad<Scalar> lg;
        if (cfg.head == HeadVariant::Threshold) {
          std::vector<RelationId> gold;
          if (bag.positive()) gold.push_back(bag.relation);
          lg = loss_threshold_grad(agg.scores, gold, models.head.threshold);
        } else {
          lg = loss_end2end_grad(agg.scores, bag.relation);
        }
        loss_sum += static_cast<double>(lg.loss);

        std::vector<Vector<Scalar>> dpath(paths.size(), Vector<Scalar>::Zero(agg.scores.size()));
        for (Index k = 0; k < agg.scores.size(); ++k)
          dpath[agg.source_path[static_cast<std::size_t>(k)]][k] += lg.dscores[k] / n_bags;
        for (std::size_t p = 0; p < paths.size(); ++p)
          if (!dpath[p].isZero(0)) score_relations_backward(models.head, paths[p].cache, dpath[p]);

        for (auto& fwd : paths) {
          const Scalar r = detail::path_reward(models.head, fwd.scores, bag.relation, rcfg);
          reward_sum += static_cast<double>(r);
          ++n_paths;
          if (fwd.head.state && fwd.tail.state) rollouts.push_back({&fwd.head.state->trace, &fwd.tail.state->trace, r});
        }
      }

      auto head_params = models.head.parameters();
      std::span<const nn::ParamSlot<Scalar>> head_view(head_params);
      nn::check_finite_grads(head_view);
      nn::clip_grad_norm(head_view, cfg.grad_clip);
      nn::opt_step(head_view, opt_head, cfg.lr_re);

      if (cfg.learns_policy())
        reinforce_update<Scalar>(models.policy, rollouts, opt_policy, cfg.lr_policy, cfg.grad_clip);

      const double mean_reward = n_paths ? reward_sum / static_cast<double>(n_paths) : 0.0;
      const double mean_loss = loss_sum / static_cast<double>(stop - start);
      ema = step == 0 ? mean_reward : TrainHistory::kEmaFactor * ema + (1.0 - TrainHistory::kEmaFactor) * mean_reward;
      history.steps.push_back({step, mean_reward, ema, mean_loss, epoch});
      ++step;
      ++epoch_steps;
      epoch_reward += mean_reward;
      epoch_loss += mean_loss;
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double denom = epoch_steps ? static_cast<double>(epoch_steps) : 1.0;
    history.epochs.push_back({epoch, epoch_reward / denom, epoch_loss / denom, secs});
  }
  return result;
}

struct EvalMetrics {
  double auc = std::numeric_limits<double>::quiet_NaN();
  double f1 = std::numeric_limits<double>::quiet_NaN();
  double p_at_50 = 0.0;
  double p_at_100 = 0.0;
  double evidence_recall = std::numeric_limits<double>::quiet_NaN();
  double mean_bridge_mentions_pos = 0.0;
  double mean_bridge_mentions_na = 0.0;
};

struct EvalResult {
  EvalMetrics metrics;
  std::vector<PathSelection> selections;
  std::vector<double> path_recall;  // per selection; negative = no planted evidence
  std::vector<RankedPrediction> predictions;
  BridgeMentionStats bridge;
};

/// Bag-level ranked predictions over the non-N/A relations plus selection
/// statistics. Deterministic under DecodeMode::Argmax; sampled decoding uses
/// rng streams derived from master_seed.
template <typename Scalar>
EvalResult evaluate(const Models<Scalar>& models, const Corpus& corpus, const EmbeddingStore& store,
                    const TrainConfig& cfg) {
  EvalResult out;
  for (std::size_t b = 0; b < corpus.bags.size(); ++b) {
    const Bag& bag = corpus.bags[b];
    std::vector<Vector<Scalar>> path_scores;
    for (std::size_t p = 0; p < bag.paths.size(); ++p) {
      Rng rh(detail::doc_stream(cfg.master_seed, 2, 0, b, p, 0));
      Rng rt(detail::doc_stream(cfg.master_seed, 2, 0, b, p, 1));
      auto fwd = detail::forward_path(models, cfg, corpus, store, bag, bag.paths[p], cfg.eval_mode, rh, rt);
      path_scores.push_back(fwd.scores);
      PathSelection sel{b, p, std::move(fwd.head.sentences), std::move(fwd.tail.sentences)};
      out.path_recall.push_back(path_evidence_recall(sel, corpus));
      out.selections.push_back(std::move(sel));
    }
    const auto agg = aggregate_bag<Scalar>(path_scores);
    const Vector<Scalar> ranked = detail::reward_scores(models.head, agg.scores);
    for (int r = 0; r < models.head.num_relations; ++r)
      out.predictions.push_back({b, r, static_cast<double>(ranked[r]), bag.relation == r});
  }

  auto& m = out.metrics;
  const bool any_correct =
      std::any_of(out.predictions.begin(), out.predictions.end(), [](const auto& p) { return p.is_correct; });
  if (any_correct) {
    m.auc = pr_auc(out.predictions);
    m.f1 = best_f1(out.predictions);
  }
  m.p_at_50 = precision_at_k(out.predictions, 50);
  m.p_at_100 = precision_at_k(out.predictions, 100);

  double recall_sum = 0.0;
  std::size_t recall_n = 0;
  for (double r : out.path_recall)
    if (r >= 0.0) {
      recall_sum += r;
      ++recall_n;
    }
  if (recall_n) m.evidence_recall = recall_sum / static_cast<double>(recall_n);

  out.bridge = bridge_mention_stats(out.selections, corpus);
  m.mean_bridge_mentions_pos = out.bridge.mean_positive_bags;
  m.mean_bridge_mentions_na = out.bridge.mean_na_bags;
  return out;
}

}  // namespace reic

#endif  // REIC_TRAINER_HPP
