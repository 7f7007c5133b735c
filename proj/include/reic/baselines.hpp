#ifndef REIC_BASELINES_HPP
#define REIC_BASELINES_HPP

#include "reic/corpus.hpp"

#include <vector>

namespace reic {

struct BaselineConfig {
  int window = 1000;     // snippet radius in sentences
  int token_cap = 512;
  int filter_cap = 16;   // bridge filter: max sentences per document

  void validate() const;
};

/// Grows a window around the target one sentence at a time, alternating
/// after/before, until the next sentence would overflow the token cap or the
/// window radius is exhausted. Returns indices in document order.
std::vector<Index> snippet_select(const Document& doc, Index tgt_idx, const BaselineConfig& cfg);

/// Ranks sentences by mentions of bridge entities plus the target entity
/// (ties by ascending index) and keeps the leading ones within filter_cap and
/// token_cap. Falls back to snippet_select when no sentence mentions a bridge.
/// Approximates entity-based input filtering; not an exact port.
std::vector<Index> bridge_filter_select(const Document& doc, const std::vector<EntityId>& bridge_entities,
                                        EntityId target_entity, const BaselineConfig& cfg);

}  // namespace reic

#endif  // REIC_BASELINES_HPP
