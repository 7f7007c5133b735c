#ifndef REIC_NN_GRADCHECK_HPP
#define REIC_NN_GRADCHECK_HPP

#include "reic/core.hpp"

#include <algorithm>
#include <cmath>

namespace reic::nn {

/// Central-difference gradient of f at params, one coordinate at a time.
template <typename Scalar, typename F>
Vector<Scalar> finite_diff_grad(F&& f, Vector<Scalar> params, Scalar eps) {
  Vector<Scalar> grad(params.size());
  for (Index k = 0; k < params.size(); ++k) {
    const Scalar saved = params[k];
    params[k] = saved + eps;
    const Scalar up = f(params);
    params[k] = saved - eps;
    const Scalar down = f(params);
    params[k] = saved;
    grad[k] = (up - down) / (Scalar(2) * eps);
  }
  return grad;
}

/// max_k |a_k - b_k| / max(|a_k|, |b_k|, floor), floor guarding
/// coordinates whose true gradient is near zero.
template <typename Scalar>
Scalar max_relative_error(const Vector<Scalar>& a, const Vector<Scalar>& b, Scalar floor = Scalar(1e-6)) {
  Scalar worst = 0;
  for (Index k = 0; k < a.size(); ++k) {
    const Scalar denom = std::max({std::abs(a[k]), std::abs(b[k]), floor});
    worst = std::max(worst, std::abs(a[k] - b[k]) / denom);
  }
  return worst;
}

}  // namespace reic::nn

#endif  // REIC_NN_GRADCHECK_HPP
