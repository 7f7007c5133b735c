#ifndef REIC_TESTS_ORACLES_HPP
#define REIC_TESTS_ORACLES_HPP

// Independent reference computations shared by the unit tests and the
// acceptance binary.

#include "reic/nn/gradcheck.hpp"
#include "reic/nn/params.hpp"
#include "reic/nn/recurrent.hpp"
#include "reic/rehead.hpp"
#include "reic/selector.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace reic::oracle {

inline Matrix<double> random_matrix(Index rows, Index cols, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix<double> m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

inline Vector<double> random_vector(Index n, Rng& rng, double scale = 1.0) {
  return random_matrix(n, 1, rng, scale).col(0);
}

/// Fills every parameter slot with N(0, scale^2) so that no coordinate sits
/// at an initialization special case (zero biases, forget bias 1).
inline void randomize(std::span<const nn::ParamSlot<double>> slots, Rng& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  for (const auto& s : slots)
    for (Index k = 0; k < s.size(); ++k) s.value[k] = n(rng);
}

/// Worst relative error between the gradient accumulated by `backward` and
/// central differences of `objective`, over every coordinate of `slots`.
template <typename Objective, typename Backward>
double gradient_error(std::span<const nn::ParamSlot<double>> slots, Objective objective, Backward backward,
                      double eps = 1e-5, double floor = 1e-5) {
  nn::zero_grads(slots);
  backward();
  const Vector<double> analytic = nn::flatten_grads(slots);
  const Vector<double> theta = nn::flatten_values(slots);
  const Vector<double> numeric = nn::finite_diff_grad<double>(
      [&](const Vector<double>& p) {
        nn::assign_values(slots, p);
        return objective();
      },
      theta, eps);
  nn::assign_values(slots, theta);
  return nn::max_relative_error<double>(analytic, numeric, floor);
}

inline double dense_gradient_error(Rng& rng) {
  std::uniform_int_distribution<int> dim(1, 6);
  nn::DenseLayer<double> layer(dim(rng), dim(rng));
  std::vector<nn::ParamSlot<double>> slots;
  layer.append_parameters("dense", slots);
  randomize(slots, rng, 1.0);
  const Vector<double> x = random_vector(layer.in_dim(), rng);
  const Vector<double> w = random_vector(layer.out_dim(), rng);
  // f = sum_k w_k * tanh(y_k) so the upstream gradient is not constant.
  auto f = [&] { return w.dot(nn::linear_forward(layer, x).array().tanh().matrix()); };
  auto b = [&] {
    const Vector<double> y = nn::linear_forward(layer, x);
    nn::linear_backward(layer, x, Vector<double>(w.array() * (1.0 - y.array().tanh().square())));
  };
  return gradient_error(slots, f, b);
}

inline double recurrent_gradient_error(Rng& rng) {
  std::uniform_int_distribution<int> dim(1, 5);
  nn::RecurrentCell<double> cell(dim(rng), dim(rng));
  std::vector<nn::ParamSlot<double>> slots;
  cell.append_parameters("cell", slots);
  randomize(slots, rng, 0.7);
  const Vector<double> x = random_vector(cell.input_dim, rng);
  nn::RecurrentState<double> s{random_vector(cell.hidden_dim, rng, 0.5), random_vector(cell.hidden_dim, rng)};
  const Vector<double> u = random_vector(cell.hidden_dim, rng);
  // ||h'||^2 + u.c' exercises both the hidden and the cell output paths.
  auto f = [&] {
    const auto n = nn::recurrent_step(cell, x, s);
    return n.h.squaredNorm() + u.dot(n.c);
  };
  auto b = [&] {
    nn::RecurrentCache<double> cache;
    const auto n = nn::recurrent_step(cell, x, s, &cache);
    nn::recurrent_backward(cell, cache, Vector<double>(2.0 * n.h), u);
  };
  return gradient_error(slots, f, b);
}

/// Gradient of a sampled multi-step trajectory's log-probability versus
/// central differences of the replayed log-probability.
inline double trajectory_gradient_error(Rng& rng, bool one_step = false) {
  std::uniform_int_distribution<int> dim(2, 5);
  std::uniform_int_distribution<int> sentences(3, 7);
  const PolicyShape shape{dim(rng), dim(rng), dim(rng)};
  auto net = make_policy<double>(shape, rng);
  const auto slots = net.parameters();
  randomize(slots, rng, 0.8);
  const Index M = sentences(rng);
  const Matrix<double> z = random_matrix(M, shape.embedding_dim, rng);
  const Index tgt = std::uniform_int_distribution<Index>(0, M - 1)(rng);
  const int T = std::uniform_int_distribution<int>(1, static_cast<int>(M) - 1)(rng);

  SelectorConfig cfg{T, 512, one_step, DecodeMode::Sample};
  auto state = run_selector(net, z, tgt, cfg, rng);
  const std::vector<Index> actions(state.selected.begin() + 1, state.selected.end());
  auto f = [&] { return replay_trajectory(net, z, tgt, actions, one_step).logprob_sum; };
  auto b = [&] { backprop_trajectory(net, state.trace, 1.0); };
  return gradient_error(std::span<const nn::ParamSlot<double>>(slots), f, b);
}

/// Every ordered action sequence of length min(T, M-1) over the non-target
/// sentences.
inline std::vector<std::vector<Index>> all_orderings(Index M, Index tgt, int T) {
  std::vector<Index> pool;
  for (Index m = 0; m < M; ++m)
    if (m != tgt) pool.push_back(m);
  const auto len = static_cast<std::size_t>(std::min<Index>(T, M - 1));
  std::vector<std::vector<Index>> out;
  std::vector<Index> cur;
  std::vector<bool> used(pool.size(), false);
  auto rec = [&](auto&& self) -> void {
    if (cur.size() == len) {
      out.push_back(cur);
      return;
    }
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (used[k]) continue;
      used[k] = true;
      cur.push_back(pool[k]);
      self(self);
      cur.pop_back();
      used[k] = false;
    }
  };
  rec(rec);
  return out;
}

/// Exact probability of each ordering, from replayed log-probabilities.
inline std::map<std::vector<Index>, double> exact_ordering_distribution(const PolicyNetwork<double>& net,
                                                                       const Matrix<double>& z, Index tgt, int T,
                                                                       bool one_step) {
  std::map<std::vector<Index>, double> out;
  for (const auto& seq : all_orderings(z.rows(), tgt, T))
    out[seq] = std::exp(replay_trajectory(net, z, tgt, seq, one_step).logprob_sum);
  return out;
}

/// Pearson chi-square goodness-of-fit p-value of observed counts against
/// expected probabilities (cells with zero expectation are skipped).
inline double chi_square_p_value(const std::map<std::vector<Index>, long>& counts,
                                 const std::map<std::vector<Index>, double>& probs, long n) {
  double stat = 0.0;
  int cells = 0;
  for (const auto& [key, p] : probs) {
    if (p <= 0.0) continue;
    const double expected = p * static_cast<double>(n);
    const auto it = counts.find(key);
    const double observed = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    stat += (observed - expected) * (observed - expected) / expected;
    ++cells;
  }
  const boost::math::chi_squared dist(cells - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

/// Enumerable selection MDP: M = 3 sentences, target 0, T = 2. The second
/// step is forced, so the two trajectories are the two orderings of {1, 2}
/// and the reward depends on which sentence comes first.
struct TinyMdp {
  PolicyNetwork<double> net;
  Matrix<double> z;
  Index tgt = 0;
  int T = 2;
  std::map<std::vector<Index>, double> reward{{{1, 2}, 1.0}, {{2, 1}, 0.2}};

  static TinyMdp make(std::uint64_t seed) {
    Rng rng(seed);
    TinyMdp mdp{make_policy<double>({4, 3, 5}, rng), random_matrix(3, 4, rng), 0, 2, {{{1, 2}, 1.0}, {{2, 1}, 0.2}}};
    randomize(mdp.net.parameters(), rng, 0.6);
    return mdp;
  }

  /// sum over trajectories of pi(traj) * R(traj).
  double expected_reward() const {
    double total = 0.0;
    for (const auto& [seq, p] : exact_ordering_distribution(net, z, tgt, T, false)) total += p * reward.at(seq);
    return total;
  }

  /// Exact gradient of expected_reward by central differences of the
  /// enumeration (no backpropagation involved).
  Vector<double> exact_gradient() {
    const auto slots = net.parameters();
    const Vector<double> theta = nn::flatten_values<double>(slots);
    const Vector<double> g = nn::finite_diff_grad<double>(
        [&](const Vector<double>& p) {
          nn::assign_values<double>(slots, p);
          return expected_reward();
        },
        theta, 1e-5);
    nn::assign_values<double>(slots, theta);
    return g;
  }

  /// REINFORCE estimate mean_i R_i * grad log pi(traj_i) over n sampled
  /// trajectories, accumulated through backprop_trajectory.
  Vector<double> reinforce_gradient(long n, std::uint64_t seed) {
    Rng rng(seed);
    net.zero_grad();
    const SelectorConfig cfg{T, 512, false, DecodeMode::Sample};
    for (long i = 0; i < n; ++i) {
      auto state = select(net, z, tgt, cfg, rng);
      const std::vector<Index> seq(state.selected.begin() + 1, state.selected.end());
      backprop_trajectory(net, state.trace, reward.at(seq) / static_cast<double>(n));
    }
    const auto slots = net.parameters();
    return nn::flatten_grads<double>(slots);
  }
};

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("reic-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace reic::oracle

#endif  // REIC_TESTS_ORACLES_HPP
