#ifndef REIC_NN_DENSE_HPP
#define REIC_NN_DENSE_HPP

#include "reic/core.hpp"
#include "reic/nn/params.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace reic::nn {

/// Affine layer y = W x + b with gradient buffers of matching shape.
template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> weight;
  Vector<Scalar> bias;
  Matrix<Scalar> grad_weight;
  Vector<Scalar> grad_bias;

  DenseLayer() = default;
  DenseLayer(Index in_dim, Index out_dim)
      : weight(Matrix<Scalar>::Zero(out_dim, in_dim)),
        bias(Vector<Scalar>::Zero(out_dim)),
        grad_weight(Matrix<Scalar>::Zero(out_dim, in_dim)),
        grad_bias(Vector<Scalar>::Zero(out_dim)) {}

  Index in_dim() const { return weight.cols(); }
  Index out_dim() const { return weight.rows(); }

  void zero_grad() {
    grad_weight.setZero();
    grad_bias.setZero();
  }

  void append_parameters(const std::string& prefix, std::vector<ParamSlot<Scalar>>& out) {
    out.push_back(make_slot<Scalar>(prefix + ".weight", weight, grad_weight));
    out.push_back(make_slot<Scalar>(prefix + ".bias", bias, grad_bias));
  }

  template <typename Other>
  DenseLayer<Other> cast() const {
    DenseLayer<Other> out;
    out.weight = weight.template cast<Other>();
    out.bias = bias.template cast<Other>();
    out.grad_weight = grad_weight.template cast<Other>();
    out.grad_bias = grad_bias.template cast<Other>();
    return out;
  }
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero bias.
template <typename Scalar>
void init_uniform(DenseLayer<Scalar>& layer, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in_dim()));
  for (Index j = 0; j < layer.weight.cols(); ++j)
    for (Index i = 0; i < layer.weight.rows(); ++i)
      layer.weight(i, j) = static_cast<Scalar>((2.0 * uniform01(rng) - 1.0) * bound);
  layer.bias.setZero();
  layer.zero_grad();
}

template <typename Scalar>
Vector<Scalar> linear_forward(const DenseLayer<Scalar>& layer, const Vector<std::type_identity_t<Scalar>>& x) {
  if (x.size() != layer.in_dim())
    throw ShapeError("linear_forward: input has " + std::to_string(x.size()) + " entries, layer expects " +
                     std::to_string(layer.in_dim()));
  return layer.weight * x + layer.bias;
}

/// Column-wise forward over a batch X [in x n].
template <typename Scalar>
Matrix<Scalar> linear_forward_batch(const DenseLayer<Scalar>& layer, const Matrix<Scalar>& x) {
  if (x.rows() != layer.in_dim()) throw ShapeError("linear_forward_batch: input row count mismatch");
  return (layer.weight * x).colwise() + layer.bias;
}

/// Accumulates dL/dW and dL/db for upstream gradient dy at input x; returns dL/dx.
template <typename Scalar>
Vector<Scalar> linear_backward(DenseLayer<Scalar>& layer, const Vector<std::type_identity_t<Scalar>>& x,
                               const Vector<std::type_identity_t<Scalar>>& dy) {
  if (x.size() != layer.in_dim() || dy.size() != layer.out_dim())
    throw ShapeError("linear_backward: shape mismatch");
  layer.grad_weight.noalias() += dy * x.transpose();
  layer.grad_bias += dy;
  return layer.weight.transpose() * dy;
}

}  // namespace reic::nn

#endif  // REIC_NN_DENSE_HPP
