#ifndef REIC_NN_SOFTMAX_HPP
#define REIC_NN_SOFTMAX_HPP

#include "reic/core.hpp"

#include <cmath>
#include <limits>

namespace reic::nn {

/// Softmax restricted to positions where mask is true; masked positions are
/// exactly zero. Throws EmptyCandidateError when nothing is selectable.
template <typename Scalar>
Vector<Scalar> masked_softmax(const Vector<Scalar>& logits, const Mask& mask) {
  if (logits.size() != mask.size()) throw ShapeError("masked_softmax: logits and mask lengths differ");
  if (!mask.any()) throw EmptyCandidateError("masked_softmax: every candidate is masked");

  Scalar max = -std::numeric_limits<Scalar>::infinity();
  for (Index k = 0; k < logits.size(); ++k)
    if (mask[k] && logits[k] > max) max = logits[k];

  Vector<Scalar> out = Vector<Scalar>::Zero(logits.size());
  Scalar total = 0;
  for (Index k = 0; k < logits.size(); ++k) {
    if (!mask[k]) continue;
    out[k] = std::exp(logits[k] - max);
    total += out[k];
  }
  out /= total;
  return out;
}

/// log(sum(exp(x))) with max subtraction.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& x) {
  using S = typename Derived::Scalar;
  if (x.size() == 0) return -std::numeric_limits<S>::infinity();
  const S m = x.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((x.derived().array() - m).exp().sum());
}

template <typename Scalar>
Vector<Scalar> log_softmax(const Vector<Scalar>& logits) {
  return logits.array() - log_sum_exp(logits);
}

}  // namespace reic::nn

#endif  // REIC_NN_SOFTMAX_HPP
