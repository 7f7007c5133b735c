#include "reic/selector.hpp"

namespace reic {

std::vector<Index> apply_token_cap(const std::vector<Index>& selection, const Document& doc, int cap) {
  std::vector<Index> out;
  long total = 0;
  for (Index m : selection) {
    if (m < 0 || m >= doc.size()) throw std::out_of_range("apply_token_cap: sentence index out of range");
    total += doc.sentences[static_cast<std::size_t>(m)].token_count;
    if (total > cap && !out.empty()) break;
    out.push_back(m);
  }
  return out;
}

}  // namespace reic
