#include "reic/baselines.hpp"

#include <algorithm>
#include <numeric>

namespace reic {

void BaselineConfig::validate() const {
  if (window < 0) throw ConfigError("baseline: window must be non-negative");
  if (token_cap < 1 || filter_cap < 1) throw ConfigError("baseline: caps must be at least 1");
}

std::vector<Index> snippet_select(const Document& doc, Index tgt_idx, const BaselineConfig& cfg) {
  cfg.validate();
  if (tgt_idx < 0 || tgt_idx >= doc.size()) throw std::out_of_range("snippet_select: target index out of range");

  auto tokens = [&](Index m) { return doc.sentences[static_cast<std::size_t>(m)].token_count; };
  std::vector<Index> out{tgt_idx};
  long total = tokens(tgt_idx);
  Index after = tgt_idx + 1;
  Index before = tgt_idx - 1;
  bool take_after = true;

  for (;;) {
    const bool after_ok = after < doc.size() && after - tgt_idx <= cfg.window;
    const bool before_ok = before >= 0 && tgt_idx - before <= cfg.window;
    if (!after_ok && !before_ok) break;
    const bool use_after = after_ok && (take_after || !before_ok);
    const Index next = use_after ? after : before;
    if (total + tokens(next) > cfg.token_cap) break;
    total += tokens(next);
    out.push_back(next);
    if (use_after) ++after;
    else --before;
    take_after = !use_after;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Index> bridge_filter_select(const Document& doc, const std::vector<EntityId>& bridge_entities,
                                        EntityId target_entity, const BaselineConfig& cfg) {
  cfg.validate();
  const auto M = static_cast<std::size_t>(doc.size());
  std::vector<int> bridge_count(M, 0);
  std::vector<int> score(M, 0);
  for (std::size_t m = 0; m < M; ++m) {
    const auto& s = doc.sentences[m];
    for (EntityId b : bridge_entities) bridge_count[m] += s.count_mentions(b);
    score[m] = bridge_count[m] + s.count_mentions(target_entity);
  }

  if (std::all_of(bridge_count.begin(), bridge_count.end(), [](int c) { return c == 0; }))
    return snippet_select(doc, target_sentence_index(doc, target_entity), cfg);

  std::vector<Index> order(M);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
  });

  std::vector<Index> out;
  long total = 0;
  for (Index m : order) {
    if (score[static_cast<std::size_t>(m)] == 0) break;
    if (static_cast<int>(out.size()) >= cfg.filter_cap) break;
    const int t = doc.sentences[static_cast<std::size_t>(m)].token_count;
    if (total + t > cfg.token_cap) break;
    total += t;
    out.push_back(m);
  }
  if (out.empty()) out.push_back(order.front());  // top sentence alone overflows the cap
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace reic
