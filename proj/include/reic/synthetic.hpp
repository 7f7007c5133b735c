#ifndef REIC_SYNTHETIC_HPP
#define REIC_SYNTHETIC_HPP

#include "reic/corpus.hpp"
#include "reic/embedding_store.hpp"

#include <cstdint>

namespace reic {

/// Planted-evidence corpus parameters.
struct SyntheticConfig {
  int n_bags = 200;        // training bags
  int n_eval_bags = 100;   // held-out bags sharing the relation signatures
  int n_relations = 4;
  int sentences_per_doc = 60;
  int paths_per_bag = 3;
  int dim = 768;
  double noise_sigma = 0.5;
  double signature_scale = 10.0;
  double na_bag_fraction = 0.5;
  double positive_path_fraction = 0.5;  // extra positive paths beyond the first, in positive bags
  int evidence_offset_min = 20;
  int tokens_per_sentence = 25;
  int n_distractor_entities = 40;
  std::uint64_t seed = 1;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

struct SyntheticData {
  Corpus train;
  Corpus eval;
  EmbeddingStore store;  // covers both splits
};

/// Deterministic in `cfg` (seed included).
///
/// Every path gets a fresh head and tail document. The target sentence sits
/// in [0, M - offset); a positive path plants one evidence sentence per
/// document at least `evidence_offset_min` sentences after the target. The
/// head-side evidence mentions head + bridge, the tail-side bridge + tail.
/// Evidence rows carry signature_scale * e_r in the first n_relations
/// coordinates on top of N(0, sigma^2) noise; every other row is pure noise.
/// Each document also mentions its bridge entity in 1-3 random non-target
/// sentences, and filler sentences carry up to two distractor mentions.
SyntheticData generate_synthetic(const SyntheticConfig& cfg);

}  // namespace reic

#endif  // REIC_SYNTHETIC_HPP
