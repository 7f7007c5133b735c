#ifndef REIC_NN_RECURRENT_HPP
#define REIC_NN_RECURRENT_HPP

#include "reic/core.hpp"
#include "reic/nn/params.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace reic::nn {

/// Single-layer LSTM cell. Gate rows are stacked as [input; forget; output;
/// candidate], each block hidden_dim rows, acting on [x; h_prev].
template <typename Scalar>
struct RecurrentCell {
  Index input_dim = 0;
  Index hidden_dim = 0;
  Matrix<Scalar> weight;  // [4H x (I + H)]
  Vector<Scalar> bias;    // [4H]
  Matrix<Scalar> grad_weight;
  Vector<Scalar> grad_bias;

  RecurrentCell() = default;
  RecurrentCell(Index in, Index hidden)
      : input_dim(in),
        hidden_dim(hidden),
        weight(Matrix<Scalar>::Zero(4 * hidden, in + hidden)),
        bias(Vector<Scalar>::Zero(4 * hidden)),
        grad_weight(Matrix<Scalar>::Zero(4 * hidden, in + hidden)),
        grad_bias(Vector<Scalar>::Zero(4 * hidden)) {
    if (in <= 0 || hidden <= 0) throw ShapeError("RecurrentCell dimensions must be positive");
  }

  void zero_grad() {
    grad_weight.setZero();
    grad_bias.setZero();
  }

  void append_parameters(const std::string& prefix, std::vector<ParamSlot<Scalar>>& out) {
    out.push_back(make_slot<Scalar>(prefix + ".weight", weight, grad_weight));
    out.push_back(make_slot<Scalar>(prefix + ".bias", bias, grad_bias));
  }
};

template <typename Scalar>
struct RecurrentState {
  Vector<Scalar> h;
  Vector<Scalar> c;

  static RecurrentState zeros(Index hidden) {
    return {Vector<Scalar>::Zero(hidden), Vector<Scalar>::Zero(hidden)};
  }
};

/// Activations retained by a traced step for the backward pass.
template <typename Scalar>
struct RecurrentCache {
  Vector<Scalar> input;   // [x; h_prev]
  Vector<Scalar> c_prev;
  Vector<Scalar> in_gate, forget_gate, out_gate, candidate;
  Vector<Scalar> c;
  Vector<Scalar> tanh_c;
  Vector<Scalar> h;
};

/// Uniform(+-1/sqrt(I+H)) weights, zero biases except forget gate = 1.
template <typename Scalar>
void init_uniform(RecurrentCell<Scalar>& cell, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cell.input_dim + cell.hidden_dim));
  for (Index j = 0; j < cell.weight.cols(); ++j)
    for (Index i = 0; i < cell.weight.rows(); ++i)
      cell.weight(i, j) = static_cast<Scalar>((2.0 * uniform01(rng) - 1.0) * bound);
  cell.bias.setZero();
  cell.bias.segment(cell.hidden_dim, cell.hidden_dim).setConstant(Scalar(1));
  cell.zero_grad();
}

namespace detail {
template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return (S(1) / (S(1) + (-x.array()).exp())).matrix();
}
}  // namespace detail

template <typename Scalar>
RecurrentState<Scalar> recurrent_step(const RecurrentCell<Scalar>& cell, const Vector<std::type_identity_t<Scalar>>& x,
                                      const RecurrentState<std::type_identity_t<Scalar>>& s, RecurrentCache<Scalar>* cache = nullptr) {
  const Index H = cell.hidden_dim;
  if (x.size() != cell.input_dim)
    throw ShapeError("recurrent_step: input has " + std::to_string(x.size()) + " entries, cell expects " +
                     std::to_string(cell.input_dim));
  if (s.h.size() != H || s.c.size() != H) throw ShapeError("recurrent_step: state size mismatch");

  Vector<Scalar> input(cell.input_dim + H);
  input << x, s.h;
  const Vector<Scalar> pre = cell.weight * input + cell.bias;

  Vector<Scalar> i = detail::sigmoid(pre.segment(0, H));
  Vector<Scalar> f = detail::sigmoid(pre.segment(H, H));
  Vector<Scalar> o = detail::sigmoid(pre.segment(2 * H, H));
  Vector<Scalar> g = pre.segment(3 * H, H).array().tanh().matrix();

  RecurrentState<Scalar> next;
  next.c = f.cwiseProduct(s.c) + i.cwiseProduct(g);
  Vector<Scalar> tanh_c = next.c.array().tanh().matrix();
  next.h = o.cwiseProduct(tanh_c);

  if (cache) {
    cache->input = std::move(input);
    cache->c_prev = s.c;
    cache->in_gate = std::move(i);
    cache->forget_gate = std::move(f);
    cache->out_gate = std::move(o);
    cache->candidate = std::move(g);
    cache->c = next.c;
    cache->tanh_c = std::move(tanh_c);
    cache->h = next.h;
  }
  return next;
}

template <typename Scalar>
struct RecurrentGrads {
  Vector<Scalar> dx;
  Vector<Scalar> dh_prev;
  Vector<Scalar> dc_prev;
};

/// Backward through one traced step given dL/dh and dL/dc at its output.
/// Accumulates parameter gradients into the cell.
template <typename Scalar>
RecurrentGrads<Scalar> recurrent_backward(RecurrentCell<Scalar>& cell, const RecurrentCache<Scalar>& cache,
                                          const Vector<std::type_identity_t<Scalar>>& dh,
                                          const Vector<std::type_identity_t<Scalar>>& dc_next) {
  const Index H = cell.hidden_dim;
  const auto& i = cache.in_gate;
  const auto& f = cache.forget_gate;
  const auto& o = cache.out_gate;
  const auto& g = cache.candidate;

  const Vector<Scalar> d_o = dh.cwiseProduct(cache.tanh_c);
  const Vector<Scalar> dc =
      dc_next + dh.cwiseProduct(o).cwiseProduct((Scalar(1) - cache.tanh_c.array().square()).matrix());

  Vector<Scalar> dpre(4 * H);
  dpre.segment(0, H) = dc.cwiseProduct(g).cwiseProduct(i.cwiseProduct((Scalar(1) - i.array()).matrix()));
  dpre.segment(H, H) = dc.cwiseProduct(cache.c_prev).cwiseProduct(f.cwiseProduct((Scalar(1) - f.array()).matrix()));
  dpre.segment(2 * H, H) = d_o.cwiseProduct(o.cwiseProduct((Scalar(1) - o.array()).matrix()));
  dpre.segment(3 * H, H) = dc.cwiseProduct(i).cwiseProduct((Scalar(1) - g.array().square()).matrix());

  cell.grad_weight.noalias() += dpre * cache.input.transpose();
  cell.grad_bias += dpre;
  const Vector<Scalar> dinput = cell.weight.transpose() * dpre;

  return {dinput.head(cell.input_dim), dinput.tail(H), dc.cwiseProduct(f)};
}

}  // namespace reic::nn

#endif  // REIC_NN_RECURRENT_HPP
