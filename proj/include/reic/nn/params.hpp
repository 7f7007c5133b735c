#ifndef REIC_NN_PARAMS_HPP
#define REIC_NN_PARAMS_HPP

#include "reic/core.hpp"

#include <cmath>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace reic::nn {

/// Flat view of one parameter tensor and its gradient buffer.
template <typename Scalar>
struct ParamSlot {
  std::string name;
  Scalar* value = nullptr;
  Scalar* grad = nullptr;
  Index rows = 0;
  Index cols = 0;

  Index size() const { return rows * cols; }
  Eigen::Map<Vector<std::remove_const_t<Scalar>>> values() const
    requires(!std::is_const_v<Scalar>)
  {
    return {value, size()};
  }
  Eigen::Map<Vector<std::remove_const_t<Scalar>>> grads() const
    requires(!std::is_const_v<Scalar>)
  {
    return {grad, size()};
  }
  Eigen::Map<const Vector<std::remove_const_t<Scalar>>> cvalues() const { return {value, size()}; }
  Eigen::Map<const Vector<std::remove_const_t<Scalar>>> cgrads() const { return {grad, size()}; }
};

template <typename Scalar>
using ConstParamSlot = ParamSlot<const Scalar>;

template <typename S, typename Derived, typename GradDerived>
ParamSlot<S> make_slot(std::string name, Derived& value, GradDerived& grad) {
  if (value.rows() != grad.rows() || value.cols() != grad.cols())
    throw ShapeError("gradient buffer shape differs from parameter " + name);
  return {std::move(name), value.data(), grad.data(), value.rows(), value.cols()};
}

template <typename Scalar>
Index total_size(std::span<const ParamSlot<Scalar>> slots) {
  Index n = 0;
  for (const auto& s : slots) n += s.size();
  return n;
}

template <typename Scalar>
Vector<std::remove_const_t<Scalar>> flatten_values(std::span<const ParamSlot<Scalar>> slots) {
  Vector<std::remove_const_t<Scalar>> out(total_size(slots));
  Index at = 0;
  for (const auto& s : slots) {
    out.segment(at, s.size()) = s.cvalues();
    at += s.size();
  }
  return out;
}

template <typename Scalar>
Vector<std::remove_const_t<Scalar>> flatten_grads(std::span<const ParamSlot<Scalar>> slots) {
  Vector<std::remove_const_t<Scalar>> out(total_size(slots));
  Index at = 0;
  for (const auto& s : slots) {
    out.segment(at, s.size()) = s.cgrads();
    at += s.size();
  }
  return out;
}

template <typename Scalar>
void assign_values(std::span<const ParamSlot<Scalar>> slots, const Vector<Scalar>& flat) {
  if (flat.size() != total_size(slots)) throw ShapeError("flat parameter vector has wrong length");
  Index at = 0;
  for (const auto& s : slots) {
    s.values() = flat.segment(at, s.size());
    at += s.size();
  }
}

template <typename Scalar>
void zero_grads(std::span<const ParamSlot<Scalar>> slots) {
  for (const auto& s : slots) s.grads().setZero();
}

template <typename Scalar>
double grad_norm(std::span<const ParamSlot<Scalar>> slots) {
  double sq = 0.0;
  for (const auto& s : slots) sq += static_cast<double>(s.cgrads().squaredNorm());
  return std::sqrt(sq);
}

/// Scales all gradients so their joint L2 norm is at most max_norm.
/// Returns the norm before clipping.
template <typename Scalar>
double clip_grad_norm(std::span<const ParamSlot<Scalar>> slots, double max_norm) {
  const double norm = grad_norm(slots);
  if (max_norm > 0.0 && norm > max_norm) {
    const auto scale = static_cast<Scalar>(max_norm / norm);
    for (const auto& s : slots) s.grads() *= scale;
  }
  return norm;
}

}  // namespace reic::nn

#endif  // REIC_NN_PARAMS_HPP
