#ifndef REIC_NN_OPTIM_HPP
#define REIC_NN_OPTIM_HPP

#include "reic/core.hpp"
#include "reic/nn/params.hpp"

#include <cmath>
#include <span>
#include <sstream>
#include <vector>

namespace reic::nn {

enum class OptimizerKind { AdamW, Sgd };

/// Moment buffers and hyperparameters for adaptive-moment updates with
/// decoupled weight decay. Plain SGD ignores the moments.
template <typename Scalar>
struct OptState {
  OptimizerKind kind = OptimizerKind::AdamW;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  long step = 0;
  std::vector<Vector<Scalar>> first_moment;
  std::vector<Vector<Scalar>> second_moment;
};

/// Throws TrainingAborted naming the first non-finite gradient entry.
template <typename Scalar>
void check_finite_grads(std::span<const ParamSlot<Scalar>> params) {
  for (const auto& slot : params) {
    const auto g = slot.cgrads();
    for (Index k = 0; k < g.size(); ++k) {
      if (!std::isfinite(static_cast<double>(g[k]))) {
        std::ostringstream msg;
        msg << "non-finite gradient " << g[k] << " in " << slot.name << " at flat index " << k;
        throw TrainingAborted(msg.str());
      }
    }
  }
}

/// Applies one update using the gradients in `params`, then zeroes them.
template <typename Scalar>
void opt_step(std::span<const ParamSlot<Scalar>> params, OptState<Scalar>& opt, double lr) {
  if (!(lr > 0.0)) throw ConfigError("opt_step: learning rate must be positive");
  check_finite_grads(params);

  if (opt.kind == OptimizerKind::Sgd) {
    for (const auto& slot : params) {
      if (opt.weight_decay != 0.0) slot.values() *= static_cast<Scalar>(1.0 - lr * opt.weight_decay);
      slot.values() -= static_cast<Scalar>(lr) * slot.cgrads();
      slot.grads().setZero();
    }
    ++opt.step;
    return;
  }

  if (opt.first_moment.empty()) {
    for (const auto& slot : params) {
      opt.first_moment.push_back(Vector<Scalar>::Zero(slot.size()));
      opt.second_moment.push_back(Vector<Scalar>::Zero(slot.size()));
    }
  }
  if (opt.first_moment.size() != params.size()) throw ShapeError("opt_step: optimizer state tracks other parameters");

  ++opt.step;
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
  const auto b1 = static_cast<Scalar>(opt.beta1);
  const auto b2 = static_cast<Scalar>(opt.beta2);

  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& slot = params[k];
    auto& m = opt.first_moment[k];
    auto& v = opt.second_moment[k];
    if (m.size() != slot.size()) throw ShapeError("opt_step: moment shape mismatch for " + slot.name);
    const auto g = slot.cgrads();
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);

    auto p = slot.values();
    if (opt.weight_decay != 0.0) p *= static_cast<Scalar>(1.0 - lr * opt.weight_decay);
    const auto m_hat = (m.array() / static_cast<Scalar>(bc1));
    const auto v_hat = (v.array() / static_cast<Scalar>(bc2));
    p.array() -= static_cast<Scalar>(lr) * m_hat / (v_hat.sqrt() + static_cast<Scalar>(opt.eps));
    slot.grads().setZero();
  }
}

}  // namespace reic::nn

#endif  // REIC_NN_OPTIM_HPP
