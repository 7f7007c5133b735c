#ifndef REIC_CORE_HPP
#define REIC_CORE_HPP

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace reic {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Row-major float storage used for sentence embeddings on disk and in memory.
using EmbeddingMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Candidate mask over sentences: true = still selectable.
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

using EntityId = std::uint64_t;
using DocId = std::uint64_t;
using RelationId = int;
inline constexpr RelationId kNoRelation = -1;

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits, independent of the
/// standard library's distribution implementation.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// SplitMix64 finalizer; used to derive independent rng streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <typename... Keys>
std::uint64_t derive_seed(std::uint64_t master, Keys... keys) {
  std::uint64_t s = mix64(master);
  ((s = mix64(s ^ static_cast<std::uint64_t>(keys))), ...);
  return s;
}

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptyCandidateError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotFoundError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct TraceReplayError : std::logic_error {
  using std::logic_error::logic_error;
};

struct TrainingAborted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UndefinedMetricError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Malformed binary input; carries the byte offset where parsing failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace reic

#endif  // REIC_CORE_HPP
