#include "reic/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace reic {

namespace {

std::vector<std::size_t> ranking(std::span<const RankedPrediction> preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });
  return order;
}

std::size_t count_correct(std::span<const RankedPrediction> preds) {
  return static_cast<std::size_t>(
      std::count_if(preds.begin(), preds.end(), [](const RankedPrediction& p) { return p.is_correct; }));
}

}  // namespace

double pr_auc(std::span<const RankedPrediction> preds) {
  const std::size_t positives = count_correct(preds);
  if (positives == 0) throw UndefinedMetricError("pr_auc: no correct predictions to recall");
  double auc = 0.0;
  std::size_t hits = 0;
  const auto order = ranking(preds);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (!preds[order[k]].is_correct) continue;
    ++hits;
    auc += (static_cast<double>(hits) / static_cast<double>(k + 1)) / static_cast<double>(positives);
  }
  return auc;
}

double best_f1(std::span<const RankedPrediction> preds) {
  const std::size_t positives = count_correct(preds);
  if (positives == 0) throw UndefinedMetricError("best_f1: no correct predictions to recall");
  const auto order = ranking(preds);
  double best = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (preds[order[k]].is_correct) ++hits;
    const bool cut_here = k + 1 == order.size() || preds[order[k + 1]].score != preds[order[k]].score;
    if (!cut_here || hits == 0) continue;
    const double precision = static_cast<double>(hits) / static_cast<double>(k + 1);
    const double recall = static_cast<double>(hits) / static_cast<double>(positives);
    best = std::max(best, 2.0 * precision * recall / (precision + recall));
  }
  return best;
}

double precision_at_k(std::span<const RankedPrediction> preds, std::size_t k) {
  if (k < 1) throw std::invalid_argument("precision_at_k: k must be at least 1");
  if (preds.empty()) return 0.0;
  const auto order = ranking(preds);
  const std::size_t n = std::min(k, order.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += preds[order[i]].is_correct ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(n);
}

int count_bridge_mentions(const PathSelection& sel, const Corpus& corpus) {
  const auto& path = corpus.bags.at(sel.bag).paths.at(sel.path);
  int total = 0;
  auto add = [&](const Document& doc, const std::vector<Index>& idx) {
    for (Index m : idx)
      for (EntityId b : path.bridges) total += doc.sentences.at(static_cast<std::size_t>(m)).count_mentions(b);
  };
  add(corpus.document(path.head_doc), sel.head_sentences);
  add(corpus.document(path.tail_doc), sel.tail_sentences);
  return total;
}

double path_evidence_recall(const PathSelection& sel, const Corpus& corpus) {
  const auto& path = corpus.bags.at(sel.bag).paths.at(sel.path);
  int planted = 0;
  int hits = 0;
  auto scan = [&](const Document& doc, const std::vector<Index>& idx) {
    for (Index m = 0; m < doc.size(); ++m) {
      const auto& s = doc.sentences[static_cast<std::size_t>(m)];
      if (!s.evidence.value_or(false)) continue;
      ++planted;
      if (std::find(idx.begin(), idx.end(), m) != idx.end()) ++hits;
    }
  };
  scan(corpus.document(path.head_doc), sel.head_sentences);
  scan(corpus.document(path.tail_doc), sel.tail_sentences);
  return planted == 0 ? -1.0 : static_cast<double>(hits) / planted;
}

BridgeMentionStats bridge_mention_stats(std::span<const PathSelection> selections, const Corpus& corpus) {
  BridgeMentionStats stats;
  double sum_pos = 0.0;
  double sum_na = 0.0;
  for (const auto& sel : selections) {
    const auto& bag = corpus.bags.at(sel.bag);
    const int count = count_bridge_mentions(sel, corpus);
    if (bag.positive()) {
      sum_pos += count;
      ++stats.paths_positive_bags;
      if (!bag.path_labels) ++stats.histogram_unlabeled_paths[count];
      else if ((*bag.path_labels).at(sel.path)) ++stats.histogram_positive_paths[count];
      else ++stats.histogram_na_paths[count];
    } else {
      sum_na += count;
      ++stats.paths_na_bags;
    }
  }
  if (stats.paths_positive_bags) stats.mean_positive_bags = sum_pos / static_cast<double>(stats.paths_positive_bags);
  if (stats.paths_na_bags) stats.mean_na_bags = sum_na / static_cast<double>(stats.paths_na_bags);
  return stats;
}

}  // namespace reic
