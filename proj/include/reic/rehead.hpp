#ifndef REIC_REHEAD_HPP
#define REIC_REHEAD_HPP

#include "reic/core.hpp"
#include "reic/nn/dense.hpp"
#include "reic/nn/softmax.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace reic {

enum class HeadVariant { EndToEnd, Threshold };

/// Toy relation scorer over a path representation: 2d -> hidden -> scores.
/// EndToEnd appends an N/A logit (last entry); Threshold scores relations
/// only and compares them against `threshold`.
template <typename Scalar>
struct RelationHead {
  HeadVariant variant = HeadVariant::Threshold;
  int num_relations = 0;
  nn::DenseLayer<Scalar> hidden;
  nn::DenseLayer<Scalar> out;
  Scalar threshold = 0;

  Index output_dim() const { return num_relations + (variant == HeadVariant::EndToEnd ? 1 : 0); }
  Index na_index() const { return num_relations; }  // EndToEnd only

  std::vector<nn::ParamSlot<Scalar>> parameters() {
    std::vector<nn::ParamSlot<Scalar>> slots;
    hidden.append_parameters("head.hidden", slots);
    out.append_parameters("head.out", slots);
    return slots;
  }

  void zero_grad() {
    hidden.zero_grad();
    out.zero_grad();
  }
};

template <typename Scalar>
RelationHead<Scalar> make_relation_head(HeadVariant variant, Index rep_dim, Index hidden_dim, int num_relations,
                                        Rng* rng) {
  if (num_relations < 1) throw ConfigError("relation head needs at least one relation");
  RelationHead<Scalar> head;
  head.variant = variant;
  head.num_relations = num_relations;
  head.hidden = nn::DenseLayer<Scalar>(rep_dim, hidden_dim);
  head.out = nn::DenseLayer<Scalar>(hidden_dim, head.output_dim());
  if (rng) {
    nn::init_uniform(head.hidden, *rng);
    nn::init_uniform(head.out, *rng);
  }
  return head;
}

/// [mean(head rows); mean(tail rows)] over the selected sentences.
template <typename Scalar>
Vector<Scalar> path_representation(const Matrix<Scalar>& head_rows, const Matrix<Scalar>& tail_rows) {
  if (head_rows.rows() == 0 || tail_rows.rows() == 0)
    throw ShapeError("path_representation: empty sentence selection");
  if (head_rows.cols() != tail_rows.cols()) throw ShapeError("path_representation: embedding widths differ");
  Vector<Scalar> rep(2 * head_rows.cols());
  rep << head_rows.colwise().mean().transpose(), tail_rows.colwise().mean().transpose();
  return rep;
}

template <typename Scalar>
struct HeadCache {
  Vector<Scalar> rep;
  Vector<Scalar> activation;
};

template <typename Scalar>
Vector<Scalar> score_relations(const RelationHead<Scalar>& head, const Vector<std::type_identity_t<Scalar>>& rep,
                               HeadCache<Scalar>* cache = nullptr) {
  if (rep.size() != head.hidden.in_dim())
    throw ShapeError("score_relations: representation has " + std::to_string(rep.size()) + " entries, head expects " +
                     std::to_string(head.hidden.in_dim()));
  Vector<Scalar> act = nn::linear_forward(head.hidden, rep).array().tanh().matrix();
  Vector<Scalar> scores = nn::linear_forward(head.out, act);
  if (cache) {
    cache->rep = rep;
    cache->activation = std::move(act);
  }
  return scores;
}

/// Accumulates parameter gradients for upstream dL/dscores.
template <typename Scalar>
void score_relations_backward(RelationHead<Scalar>& head, const HeadCache<Scalar>& cache,
                              const Vector<std::type_identity_t<Scalar>>& dscores) {
  const Vector<Scalar> dact = nn::linear_backward(head.out, cache.activation, dscores);
  const Vector<Scalar> dpre = dact.cwiseProduct((Scalar(1) - cache.activation.array().square()).matrix());
  nn::linear_backward(head.hidden, cache.rep, dpre);
}

template <typename Scalar>
struct BagScores {
  Vector<Scalar> scores;
  std::vector<std::size_t> source_path;  // which path supplied each coordinate
};

/// Elementwise maximum over path score vectors (first path wins ties).
template <typename Scalar>
BagScores<Scalar> aggregate_bag(std::span<const Vector<Scalar>> path_scores) {
  if (path_scores.empty()) throw std::invalid_argument("aggregate_bag: bag has no paths");
  BagScores<Scalar> out{path_scores[0], std::vector<std::size_t>(static_cast<std::size_t>(path_scores[0].size()), 0)};
  for (std::size_t p = 1; p < path_scores.size(); ++p) {
    if (path_scores[p].size() != out.scores.size()) throw ShapeError("aggregate_bag: score lengths differ");
    for (Index k = 0; k < out.scores.size(); ++k) {
      if (path_scores[p][k] > out.scores[k]) {
        out.scores[k] = path_scores[p][k];
        out.source_path[static_cast<std::size_t>(k)] = p;
      }
    }
  }
  return out;
}

template <typename Scalar>
struct LossGrad {
  Scalar loss = 0;
  Vector<Scalar> dscores;
  Scalar dthreshold = 0;
};

/// Multi-label global-threshold loss
///   log(e^theta + sum_{r not in gold} e^{y_r}) + log(e^{-theta} + sum_{r in gold} e^{-y_r})
/// in log-sum-exp form, with gradients w.r.t. scores and theta.
template <typename Scalar>
LossGrad<Scalar> loss_threshold_grad(const Vector<Scalar>& scores, const std::vector<RelationId>& gold,
                                     Scalar theta) {
  const Index R = scores.size();
  std::vector<bool> in_gold(static_cast<std::size_t>(R), false);
  for (RelationId r : gold) {
    if (r < 0 || r >= R) throw std::invalid_argument("loss_threshold: gold relation outside score vector");
    in_gold[static_cast<std::size_t>(r)] = true;
  }

  // Negative side: theta and non-gold scores. Positive side: -theta and -gold scores.
  Vector<Scalar> neg(1), pos(1);
  neg[0] = theta;
  pos[0] = -theta;
  std::vector<Index> neg_idx, pos_idx;
  for (Index r = 0; r < R; ++r) (in_gold[static_cast<std::size_t>(r)] ? pos_idx : neg_idx).push_back(r);
  neg.conservativeResize(1 + static_cast<Index>(neg_idx.size()));
  pos.conservativeResize(1 + static_cast<Index>(pos_idx.size()));
  for (std::size_t k = 0; k < neg_idx.size(); ++k) neg[static_cast<Index>(k) + 1] = scores[neg_idx[k]];
  for (std::size_t k = 0; k < pos_idx.size(); ++k) pos[static_cast<Index>(k) + 1] = -scores[pos_idx[k]];

  const Scalar lse_neg = nn::log_sum_exp(neg);
  const Scalar lse_pos = nn::log_sum_exp(pos);

  LossGrad<Scalar> out;
  out.loss = lse_neg + lse_pos;
  out.dscores = Vector<Scalar>::Zero(R);
  for (std::size_t k = 0; k < neg_idx.size(); ++k)
    out.dscores[neg_idx[k]] = std::exp(neg[static_cast<Index>(k) + 1] - lse_neg);
  for (std::size_t k = 0; k < pos_idx.size(); ++k)
    out.dscores[pos_idx[k]] = -std::exp(pos[static_cast<Index>(k) + 1] - lse_pos);
  out.dthreshold = std::exp(neg[0] - lse_neg) - std::exp(pos[0] - lse_pos);
  return out;
}

template <typename Scalar>
Scalar loss_threshold(const Vector<Scalar>& scores, const std::vector<RelationId>& gold, Scalar theta) {
  return loss_threshold_grad(scores, gold, theta).loss;
}

/// Softmax cross-entropy over relations + N/A; `label` kNoRelation maps to
/// the last class.
template <typename Scalar>
LossGrad<Scalar> loss_end2end_grad(const Vector<Scalar>& scores, RelationId label) {
  const Index K = scores.size();
  const Index cls = label == kNoRelation ? K - 1 : label;
  if (cls < 0 || cls >= K - (label == kNoRelation ? 0 : 1))
    throw std::invalid_argument("loss_end2end: label " + std::to_string(label) + " outside relation vocabulary");
  const Vector<Scalar> logp = nn::log_softmax(scores);
  LossGrad<Scalar> out;
  out.loss = -logp[cls];
  out.dscores = logp.array().exp().matrix();
  out.dscores[cls] -= Scalar(1);
  return out;
}

template <typename Scalar>
Scalar loss_end2end(const Vector<Scalar>& scores, RelationId label) {
  return loss_end2end_grad(scores, label).loss;
}

}  // namespace reic

#endif  // REIC_REHEAD_HPP
