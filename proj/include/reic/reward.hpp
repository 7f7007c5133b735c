#ifndef REIC_REWARD_HPP
#define REIC_REWARD_HPP

#include "reic/core.hpp"
#include "reic/nn/optim.hpp"
#include "reic/nn/params.hpp"
#include "reic/rehead.hpp"
#include "reic/selector.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <span>

namespace reic {

struct RewardConfig {
  double lambda_positive = 10.0;
  double lambda_na = 1.0;
  HeadVariant variant = HeadVariant::EndToEnd;
  /// Unset = variant default (clip for EndToEnd, no clip for Threshold).
  std::optional<bool> clip_negative;

  bool clips() const { return clip_negative.value_or(variant == HeadVariant::EndToEnd); }
  double lambda_for(RelationId r) const { return r == kNoRelation ? lambda_na : lambda_positive; }

  void validate() const {
    if (!(lambda_positive > 0.0) || !(lambda_na > 0.0)) throw ConfigError("reward: lambda values must be positive");
  }
};

/// lambda_r * (y_r - max_{i != r} y_i) / y_r over scores that include the
/// N/A entry last. Zero when y_r == 0. The trainer passes softmax
/// probabilities here, so a confident correct N/A earns about 1.
template <typename Scalar>
Scalar reward_end2end(const Vector<Scalar>& scores, RelationId r_true, const RewardConfig& cfg) {
  const Index K = scores.size();
  if (K < 2) throw std::invalid_argument("reward_end2end: need at least two classes");
  const Index idx = r_true == kNoRelation ? K - 1 : r_true;
  if (idx < 0 || idx >= K || (r_true != kNoRelation && idx == K - 1))
    throw std::invalid_argument("reward_end2end: relation outside score vector");
  const Scalar y = scores[idx];
  if (y == Scalar(0)) return Scalar(0);
  Scalar runner_up = -std::numeric_limits<Scalar>::infinity();
  for (Index k = 0; k < K; ++k)
    if (k != idx) runner_up = std::max(runner_up, scores[k]);
  Scalar r = static_cast<Scalar>(cfg.lambda_for(r_true)) * ((y - runner_up) / y);
  if (cfg.clips()) r = std::max(r, Scalar(0));
  return r;
}

/// lambda_r * (y_r - theta) for a positive relation; lambda_na * (theta -
/// max_r y_r) for N/A so that suppressing every relation is rewarded.
template <typename Scalar>
Scalar reward_threshold(const Vector<Scalar>& scores, RelationId r_true, Scalar theta, const RewardConfig& cfg) {
  Scalar r;
  if (r_true == kNoRelation) {
    r = static_cast<Scalar>(cfg.lambda_na) * (theta - scores.maxCoeff());
  } else {
    if (r_true < 0 || r_true >= scores.size()) throw std::invalid_argument("reward_threshold: relation outside scores");
    r = static_cast<Scalar>(cfg.lambda_positive) * (scores[r_true] - theta);
  }
  if (cfg.clips()) r = std::max(r, Scalar(0));
  return r;
}

/// Both documents of one text path share the path's reward.
template <typename Scalar>
struct PathRollout {
  SelectionTrace<Scalar>* head = nullptr;
  SelectionTrace<Scalar>* tail = nullptr;
  Scalar reward = 0;
};

struct ReinforceStats {
  double grad_norm = 0.0;
  bool applied = false;
};

/// Ascends mean_p R_p * (log pi(S^h_p) + log pi(S^t_p)): accumulates the
/// negated objective's gradient, clips its global norm and takes one
/// optimizer step. When every reward is zero the parameters and optimizer
/// state are left untouched.
template <typename Scalar>
ReinforceStats reinforce_update(PolicyNetwork<Scalar>& net, std::span<const PathRollout<Scalar>> rollouts,
                                nn::OptState<Scalar>& opt, double lr, double grad_clip) {
  ReinforceStats stats;
  if (rollouts.empty() ||
      std::all_of(rollouts.begin(), rollouts.end(), [](const auto& r) { return r.reward == Scalar(0); }))
    return stats;

  net.zero_grad();
  const auto n = static_cast<Scalar>(rollouts.size());
  for (const auto& r : rollouts) {
    if (r.reward == Scalar(0)) continue;
    const Scalar scale = -r.reward / n;
    if (r.head) backprop_trajectory(net, *r.head, scale);
    if (r.tail) backprop_trajectory(net, *r.tail, scale);
  }
  auto params = net.parameters();
  std::span<const nn::ParamSlot<Scalar>> view(params);
  nn::check_finite_grads(view);
  stats.grad_norm = nn::clip_grad_norm(view, grad_clip);
  nn::opt_step(view, opt, lr);
  stats.applied = true;
  return stats;
}

}  // namespace reic

#endif  // REIC_REWARD_HPP
