#ifndef REIC_SELECTOR_HPP
#define REIC_SELECTOR_HPP

#include "reic/core.hpp"
#include "reic/corpus.hpp"
#include "reic/nn/dense.hpp"
#include "reic/nn/recurrent.hpp"
#include "reic/nn/softmax.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace reic {

struct PolicyShape {
  Index embedding_dim = 768;
  Index recurrent_hidden = 512;
  Index scorer_hidden = 512;
};

/// Sentence scorer G([z_m, h]) = w2 . tanh(W1 [z_m; h] + b1) + b2 plus the
/// LSTM that summarizes already-selected sentences into h.
template <typename Scalar>
struct PolicyNetwork {
  nn::DenseLayer<Scalar> scorer_hidden;  // (d + H) -> S
  nn::DenseLayer<Scalar> scorer_out;     // S -> 1
  nn::RecurrentCell<Scalar> recurrent;   // d -> H

  PolicyNetwork() = default;
  explicit PolicyNetwork(const PolicyShape& shape)
      : scorer_hidden(shape.embedding_dim + shape.recurrent_hidden, shape.scorer_hidden),
        scorer_out(shape.scorer_hidden, 1),
        recurrent(shape.embedding_dim, shape.recurrent_hidden) {}

  Index embedding_dim() const { return recurrent.input_dim; }
  Index hidden_dim() const { return recurrent.hidden_dim; }
  Index scorer_dim() const { return scorer_hidden.out_dim(); }

  std::vector<nn::ParamSlot<Scalar>> parameters() {
    std::vector<nn::ParamSlot<Scalar>> out;
    scorer_hidden.append_parameters("policy.scorer_hidden", out);
    scorer_out.append_parameters("policy.scorer_out", out);
    recurrent.append_parameters("policy.recurrent", out);
    return out;
  }

  void zero_grad() {
    scorer_hidden.zero_grad();
    scorer_out.zero_grad();
    recurrent.zero_grad();
  }
};

template <typename Scalar>
PolicyNetwork<Scalar> make_policy(const PolicyShape& shape, Rng& rng) {
  PolicyNetwork<Scalar> net(shape);
  nn::init_uniform(net.scorer_hidden, rng);
  nn::init_uniform(net.scorer_out, rng);
  nn::init_uniform(net.recurrent, rng);
  return net;
}

enum class DecodeMode { Sample, Argmax };

struct SelectorConfig {
  int max_selections = 15;  // T
  int token_cap = 512;
  bool one_step = false;
  DecodeMode mode = DecodeMode::Sample;

  void validate() const {
    if (max_selections < 1) throw ConfigError("selector: T must be at least 1");
    if (token_cap < 1) throw ConfigError("selector: token_cap must be at least 1");
  }
};

/// One categorical draw: the candidates it ranged over, the scorer
/// activations for them and the resulting distribution.
template <typename Scalar>
struct ScoringStep {
  std::size_t recurrent_index = 0;  // recurrent output h the scores were conditioned on
  std::vector<Index> candidates;
  Matrix<Scalar> activations;  // [S x candidates]
  Vector<Scalar> probs;        // over candidates
  Index chosen = 0;            // position within candidates
  Scalar log_prob = 0;
};

template <typename Scalar>
struct SelectionTrace {
  Matrix<Scalar> embeddings;  // [M x d]
  std::vector<nn::RecurrentCache<Scalar>> recurrent;
  std::vector<ScoringStep<Scalar>> steps;
  bool replayed = false;

  void rearm() { replayed = false; }
};

template <typename Scalar>
struct SelectionState {
  std::vector<Index> selected;  // selection order, target first
  Mask mask;                    // false at selected indices
  nn::RecurrentState<Scalar> rec_state;
  Scalar logprob_sum = 0;
  SelectionTrace<Scalar> trace;
};

namespace detail {

template <typename Scalar>
void check_selection_inputs(const PolicyNetwork<Scalar>& net, const Matrix<std::type_identity_t<Scalar>>& z, Index tgt) {
  if (z.cols() != net.embedding_dim())
    throw ShapeError("selector: embeddings have " + std::to_string(z.cols()) + " columns, policy expects " +
                     std::to_string(net.embedding_dim()));
  if (z.rows() < 1) throw ShapeError("selector: document has no sentences");
  if (tgt < 0 || tgt >= z.rows())
    throw std::out_of_range("selector: target index " + std::to_string(tgt) + " outside [0, " +
                            std::to_string(z.rows()) + ")");
}

/// W_z Z^T: the h-independent part of the scorer pre-activation, [S x M].
template <typename Scalar>
Matrix<Scalar> project_embeddings(const PolicyNetwork<Scalar>& net, const Matrix<std::type_identity_t<Scalar>>& z) {
  return net.scorer_hidden.weight.leftCols(net.embedding_dim()) * z.transpose();
}

template <typename Scalar>
Vector<Scalar> score_candidates(const PolicyNetwork<Scalar>& net, const Matrix<std::type_identity_t<Scalar>>& projected,
                                const Vector<std::type_identity_t<Scalar>>& h, const std::vector<Index>& candidates,
                                Matrix<Scalar>& activations) {
  const Vector<Scalar> shift =
      net.scorer_hidden.weight.rightCols(net.hidden_dim()) * h + net.scorer_hidden.bias;
  activations = (projected(Eigen::all, candidates).colwise() + shift).array().tanh().matrix();
  Vector<Scalar> logits = (net.scorer_out.weight * activations).transpose();
  logits.array() += net.scorer_out.bias[0];
  return logits;
}

template <typename Scalar>
std::vector<Index> open_candidates(const Mask& mask) {
  std::vector<Index> out;
  for (Index m = 0; m < mask.size(); ++m)
    if (mask[m]) out.push_back(m);
  return out;
}

/// Fills step.probs / step.log_prob from logits and records `chosen`.
template <typename Scalar, typename Chooser>
void finish_step(ScoringStep<Scalar>& step, const Vector<Scalar>& logits, Chooser& choose) {
  const Vector<Scalar> logp = nn::log_softmax(logits);
  step.probs = logp.array().exp().matrix();
  step.chosen = choose(step.probs, step.candidates);
  step.log_prob = logp[step.chosen];
}

/// Shared driver for sampled, greedy and replayed trajectories.
template <typename Scalar, typename Chooser>
SelectionState<Scalar> run_trajectory(const PolicyNetwork<Scalar>& net, const Matrix<std::type_identity_t<Scalar>>& z, Index tgt,
                                      int max_selections, bool one_step, Chooser choose) {
  check_selection_inputs(net, z, tgt);
  const Index M = z.rows();

  SelectionState<Scalar> state;
  state.selected = {tgt};
  state.mask = Mask::Constant(M, true);
  state.mask[tgt] = false;
  auto& trace = state.trace;
  trace.embeddings = z;

  const Matrix<Scalar> projected = project_embeddings(net, z);
  auto rec = nn::RecurrentState<Scalar>::zeros(net.hidden_dim());
  trace.recurrent.emplace_back();
  rec = nn::recurrent_step<Scalar>(net.recurrent, z.row(tgt).transpose(), rec, &trace.recurrent.back());

  const Index n_steps = std::min<Index>(max_selections, M - 1);
  if (n_steps == 0) {
    state.rec_state = std::move(rec);
    return state;
  }

  if (one_step) {
    // One distribution from the initial state; draws without replacement
    // renormalize it over what is left.
    std::vector<Index> all = open_candidates<Scalar>(state.mask);
    Matrix<Scalar> all_act;
    const Vector<Scalar> all_logits = score_candidates(net, projected, rec.h, all, all_act);
    std::vector<Index> remaining(all.size());
    for (std::size_t k = 0; k < remaining.size(); ++k) remaining[k] = static_cast<Index>(k);

    for (Index t = 0; t < n_steps; ++t) {
      ScoringStep<Scalar> step;
      step.recurrent_index = 0;
      step.candidates.reserve(remaining.size());
      for (Index k : remaining) step.candidates.push_back(all[static_cast<std::size_t>(k)]);
      step.activations = all_act(Eigen::all, remaining);
      finish_step(step, Vector<Scalar>(all_logits(remaining)), choose);

      const Index picked = step.candidates[static_cast<std::size_t>(step.chosen)];
      state.logprob_sum += step.log_prob;
      state.selected.push_back(picked);
      state.mask[picked] = false;
      remaining.erase(remaining.begin() + step.chosen);
      trace.steps.push_back(std::move(step));
    }
    state.rec_state = std::move(rec);
    return state;
  }

  for (Index t = 0; t < n_steps; ++t) {
    if (t > 0) {
      trace.recurrent.emplace_back();
      rec = nn::recurrent_step<Scalar>(net.recurrent, z.row(state.selected.back()).transpose(), rec,
                                       &trace.recurrent.back());
    }
    ScoringStep<Scalar> step;
    step.recurrent_index = trace.recurrent.size() - 1;
    step.candidates = open_candidates<Scalar>(state.mask);
    const Vector<Scalar> logits = score_candidates(net, projected, rec.h, step.candidates, step.activations);
    finish_step(step, logits, choose);

    const Index picked = step.candidates[static_cast<std::size_t>(step.chosen)];
    state.logprob_sum += step.log_prob;
    state.selected.push_back(picked);
    state.mask[picked] = false;
    trace.steps.push_back(std::move(step));
  }
  state.rec_state = std::move(rec);
  return state;
}

template <typename Scalar>
Index sample_position(const Vector<Scalar>& probs, Rng& rng) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  for (Index k = 0; k < probs.size(); ++k) {
    cumulative += static_cast<double>(probs[k]);
    if (u < cumulative) return k;
  }
  return probs.size() - 1;
}

template <typename Scalar>
Index argmax_position(const Vector<Scalar>& probs) {
  Index best = 0;
  for (Index k = 1; k < probs.size(); ++k)
    if (probs[k] > probs[best]) best = k;
  return best;
}

template <typename Scalar>
auto make_chooser(DecodeMode mode, Rng& rng) {
  return [mode, &rng](const Vector<Scalar>& probs, const std::vector<Index>&) {
    return mode == DecodeMode::Argmax ? argmax_position(probs) : sample_position(probs, rng);
  };
}

}  // namespace detail

/// Logits G([z_m, h]) for every sentence m, [M].
template <typename Scalar>
Vector<Scalar> selection_logits(const PolicyNetwork<Scalar>& net, const Matrix<std::type_identity_t<Scalar>>& z, const Vector<std::type_identity_t<Scalar>>& h) {
  if (z.cols() != net.embedding_dim()) throw ShapeError("selection_logits: embedding width mismatch");
  if (h.size() != net.hidden_dim()) throw ShapeError("selection_logits: hidden state size mismatch");
  std::vector<Index> all(static_cast<std::size_t>(z.rows()));
  for (Index m = 0; m < z.rows(); ++m) all[static_cast<std::size_t>(m)] = m;
  Matrix<Scalar> act;
  return detail::score_candidates(net, detail::project_embeddings(net, z), h, all, act);
}

/// Selection distribution over unselected sentences; zero where mask is false.
template <typename Scalar>
Vector<Scalar> selection_probabilities(const PolicyNetwork<Scalar>& net, const Matrix<std::type_identity_t<Scalar>>& z,
                                       const Vector<std::type_identity_t<Scalar>>& h, const Mask& mask) {
  if (mask.size() != z.rows()) throw ShapeError("selection_probabilities: mask length differs from sentence count");
  return nn::masked_softmax(selection_logits(net, z, h), mask);
}

/// Iterative selection: the target is selected first and fed to the LSTM;
/// each of min(T, M-1) steps scores the unselected sentences, draws one,
/// masks it and feeds its embedding back into the LSTM.
template <typename Scalar>
SelectionState<Scalar> select(const PolicyNetwork<Scalar>& net, const Matrix<std::type_identity_t<Scalar>>& z, Index tgt,
                              const SelectorConfig& cfg, Rng& rng) {
  cfg.validate();
  return detail::run_trajectory(net, z, tgt, cfg.max_selections, false, detail::make_chooser<Scalar>(cfg.mode, rng));
}

/// Draws T distinct sentences from the single distribution computed after
/// the target step, renormalizing after each draw. The LSTM runs once.
template <typename Scalar>
SelectionState<Scalar> select_one_step(const PolicyNetwork<Scalar>& net, const Matrix<std::type_identity_t<Scalar>>& z, Index tgt,
                                       const SelectorConfig& cfg, Rng& rng) {
  cfg.validate();
  return detail::run_trajectory(net, z, tgt, cfg.max_selections, true, detail::make_chooser<Scalar>(cfg.mode, rng));
}

template <typename Scalar>
SelectionState<Scalar> run_selector(const PolicyNetwork<Scalar>& net, const Matrix<std::type_identity_t<Scalar>>& z, Index tgt,
                                    const SelectorConfig& cfg, Rng& rng) {
  return cfg.one_step ? select_one_step(net, z, tgt, cfg, rng) : select(net, z, tgt, cfg, rng);
}

/// Re-runs the policy along a fixed action sequence (indices chosen after the
/// target) and returns the resulting state; its logprob_sum is the
/// trajectory log-probability under `net`.
template <typename Scalar>
SelectionState<Scalar> replay_trajectory(const PolicyNetwork<Scalar>& net, const Matrix<std::type_identity_t<Scalar>>& z, Index tgt,
                                         const std::vector<Index>& actions, bool one_step) {
  std::size_t t = 0;
  auto forced = [&](const Vector<Scalar>&, const std::vector<Index>& candidates) -> Index {
    const auto it = std::find(candidates.begin(), candidates.end(), actions.at(t++));
    if (it == candidates.end()) throw std::invalid_argument("replay_trajectory: action is not a candidate");
    return static_cast<Index>(it - candidates.begin());
  };
  return detail::run_trajectory(net, z, tgt, static_cast<int>(actions.size()), one_step, forced);
}

/// Accumulates grad of scale * sum_t log pi(s_t | S_{t-1}) into the network's
/// gradient buffers, backpropagating through the recurrent steps. The network
/// must hold the parameters the trace was recorded with.
template <typename Scalar>
void backprop_trajectory(PolicyNetwork<Scalar>& net, SelectionTrace<Scalar>& trace, Scalar scale) {
  if (trace.replayed) throw TraceReplayError("backprop_trajectory: trace already replayed; call rearm() first");
  trace.replayed = true;

  const Index d = net.embedding_dim();
  const Index H = net.hidden_dim();
  const Index M = trace.embeddings.rows();
  if (trace.embeddings.cols() != d) throw ShapeError("backprop_trajectory: trace recorded with other dimensions");

  const auto w_h = net.scorer_hidden.weight.rightCols(H);
  const Vector<Scalar> w_out = net.scorer_out.weight.row(0).transpose();

  Matrix<Scalar> d_projected = Matrix<Scalar>::Zero(net.scorer_dim(), M);
  std::vector<Vector<Scalar>> dh(trace.recurrent.size(), Vector<Scalar>::Zero(H));

  for (const auto& step : trace.steps) {
    Vector<Scalar> dlogit = -step.probs;
    dlogit[step.chosen] += Scalar(1);
    dlogit *= scale;

    net.scorer_out.grad_weight.row(0) += (step.activations * dlogit).transpose();
    net.scorer_out.grad_bias[0] += dlogit.sum();

    const Matrix<Scalar> dpre =
        (w_out * dlogit.transpose()).cwiseProduct((Scalar(1) - step.activations.array().square()).matrix());
    for (std::size_t j = 0; j < step.candidates.size(); ++j)
      d_projected.col(step.candidates[j]) += dpre.col(static_cast<Index>(j));

    const Vector<Scalar> dsum = dpre.rowwise().sum();
    net.scorer_hidden.grad_bias += dsum;
    net.scorer_hidden.grad_weight.rightCols(H).noalias() += dsum * trace.recurrent[step.recurrent_index].h.transpose();
    dh[step.recurrent_index].noalias() += w_h.transpose() * dsum;
  }
  net.scorer_hidden.grad_weight.leftCols(d).noalias() += d_projected * trace.embeddings;

  Vector<Scalar> dh_next = Vector<Scalar>::Zero(H);
  Vector<Scalar> dc_next = Vector<Scalar>::Zero(H);
  for (std::size_t k = trace.recurrent.size(); k-- > 0;) {
    auto g = nn::recurrent_backward(net.recurrent, trace.recurrent[k], Vector<Scalar>(dh[k] + dh_next), dc_next);
    dh_next = std::move(g.dh_prev);
    dc_next = std::move(g.dc_prev);
  }
}

/// Longest prefix of `selection` (in selection order) whose token total fits
/// `cap`; the first entry (the target) is always kept.
std::vector<Index> apply_token_cap(const std::vector<Index>& selection, const Document& doc, int cap);

}  // namespace reic

#endif  // REIC_SELECTOR_HPP
