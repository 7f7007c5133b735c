#ifndef REIC_METRICS_HPP
#define REIC_METRICS_HPP

#include "reic/corpus.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace reic {

/// One (bag, relation) entry of the global ranking; N/A is never ranked.
struct RankedPrediction {
  std::size_t bag = 0;
  RelationId relation = 0;
  double score = 0.0;
  bool is_correct = false;
};

/// Average precision over the ranking (score descending, ties in input
/// order): sum over correct ranks of precision@k times the recall increment.
/// Throws UndefinedMetricError when no prediction is correct.
double pr_auc(std::span<const RankedPrediction> preds);

/// Best F1 over all score thresholds (tied scores are cut together).
double best_f1(std::span<const RankedPrediction> preds);

/// Fraction correct among the top-k (k clamped to the list length).
double precision_at_k(std::span<const RankedPrediction> preds, std::size_t k);

/// Sentences a selector kept for one text path (document order or selection
/// order; both work here).
struct PathSelection {
  std::size_t bag = 0;
  std::size_t path = 0;
  std::vector<Index> head_sentences;
  std::vector<Index> tail_sentences;
};

/// Bridge-entity mentions inside the selected sentences of one path.
int count_bridge_mentions(const PathSelection& sel, const Corpus& corpus);

/// |selected ∩ planted evidence| / |planted evidence| over both documents;
/// negative when the path carries no evidence sentences.
double path_evidence_recall(const PathSelection& sel, const Corpus& corpus);

struct BridgeMentionStats {
  double mean_positive_bags = 0.0;  // mean per path, paths of positive bags
  double mean_na_bags = 0.0;        // mean per path, paths of N/A bags
  std::size_t paths_positive_bags = 0;
  std::size_t paths_na_bags = 0;
  std::map<int, std::size_t> histogram_positive_paths;  // within positive bags
  std::map<int, std::size_t> histogram_na_paths;        // N/A paths within positive bags
  std::map<int, std::size_t> histogram_unlabeled_paths; // positive bags without path oracle
};

BridgeMentionStats bridge_mention_stats(std::span<const PathSelection> selections, const Corpus& corpus);

}  // namespace reic

#endif  // REIC_METRICS_HPP
