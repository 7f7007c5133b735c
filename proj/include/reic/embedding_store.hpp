#ifndef REIC_EMBEDDING_STORE_HPP
#define REIC_EMBEDDING_STORE_HPP

#include "reic/core.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <utility>

namespace reic {

/// Pair-encoded sentence embeddings keyed by (document, target entity).
/// Each entry holds one row per sentence of the document.
///
/// Binary layout (little-endian):
///   "REICEMB1" | u32 dim | u32 n_entries |
///   n_entries x ( u64 doc_id | u64 target_entity_id | u32 M | M*dim f32 row-major )
class EmbeddingStore {
 public:
  using Key = std::pair<DocId, EntityId>;
  static constexpr std::array<char, 8> kMagic{'R', 'E', 'I', 'C', 'E', 'M', 'B', '1'};

  EmbeddingStore() = default;
  explicit EmbeddingStore(std::uint32_t dim);

  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(DocId doc, EntityId target) const { return entries_.count({doc, target}) != 0; }

  /// Throws DataError naming the missing (doc, entity) key.
  const EmbeddingMatrix& at(DocId doc, EntityId target) const;
  void insert(DocId doc, EntityId target, EmbeddingMatrix rows);

  const std::map<Key, EmbeddingMatrix>& entries() const { return entries_; }

  bool operator==(const EmbeddingStore& other) const;

 private:
  std::uint32_t dim_ = 0;
  std::map<Key, EmbeddingMatrix> entries_;
};

void write_embedding_store(const EmbeddingStore& store, const std::filesystem::path& path);

/// Parses and validates a store file. expected_dim = 0 accepts any dimension.
EmbeddingStore load_embedding_store(const std::filesystem::path& path, std::uint32_t expected_dim = 0);

}  // namespace reic

#endif  // REIC_EMBEDDING_STORE_HPP
