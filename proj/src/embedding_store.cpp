#include "reic/embedding_store.hpp"

#include "reic/binary_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace reic {

EmbeddingStore::EmbeddingStore(std::uint32_t dim) : dim_(dim) {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
}

const EmbeddingMatrix& EmbeddingStore::at(DocId doc, EntityId target) const {
  auto it = entries_.find({doc, target});
  if (it == entries_.end())
    throw DataError("embedding store has no entry for (doc " + std::to_string(doc) + ", entity " +
                    std::to_string(target) + ")");
  return it->second;
}

void EmbeddingStore::insert(DocId doc, EntityId target, EmbeddingMatrix rows) {
  if (rows.cols() != static_cast<Index>(dim_))
    throw ShapeError("embedding rows have " + std::to_string(rows.cols()) + " columns, store dim is " +
                     std::to_string(dim_));
  if (rows.rows() == 0) throw ShapeError("embedding entry must have at least one row");
  if (!rows.allFinite()) throw DataError("non-finite embedding value");
  entries_.insert_or_assign({doc, target}, std::move(rows));
}

bool EmbeddingStore::operator==(const EmbeddingStore& other) const {
  if (dim_ != other.dim_ || entries_.size() != other.entries_.size()) return false;
  for (auto a = entries_.begin(), b = other.entries_.begin(); a != entries_.end(); ++a, ++b) {
    if (a->first != b->first || a->second.rows() != b->second.rows()) return false;
    if (std::memcmp(a->second.data(), b->second.data(), sizeof(float) * a->second.size()) != 0) return false;
  }
  return true;
}

void write_embedding_store(const EmbeddingStore& store, const std::filesystem::path& path) {
  ByteWriter w;
  w.bytes(EmbeddingStore::kMagic.data(), EmbeddingStore::kMagic.size());
  w.u32(store.dim());
  w.u32(static_cast<std::uint32_t>(store.size()));
  for (const auto& [key, rows] : store.entries()) {
    w.u64(key.first);
    w.u64(key.second);
    w.u32(static_cast<std::uint32_t>(rows.rows()));
    for (Index k = 0; k < rows.size(); ++k) w.f32(rows.data()[k]);
  }
  write_file(path, w.buffer());
}

EmbeddingStore load_embedding_store(const std::filesystem::path& path, std::uint32_t expected_dim) {
  const auto data = read_file(path);
  ByteReader r(data);
  r.expect_magic(EmbeddingStore::kMagic.data(), EmbeddingStore::kMagic.size(), "REICEMB1");

  const auto dim_offset = r.offset();
  const std::uint32_t dim = r.u32();
  if (dim == 0) throw FormatError("embedding dimension is zero", dim_offset);
  if (expected_dim != 0 && dim != expected_dim)
    throw FormatError("dim mismatch: file has " + std::to_string(dim) + ", expected " + std::to_string(expected_dim),
                      dim_offset);
  const std::uint32_t n = r.u32();

  EmbeddingStore store(dim);
  for (std::uint32_t e = 0; e < n; ++e) {
    const auto entry_offset = r.offset();
    const DocId doc = r.u64();
    const EntityId target = r.u64();
    const std::uint32_t m = r.u32();
    if (m == 0) throw FormatError("entry " + std::to_string(e) + " has zero sentences", entry_offset);
    if (store.contains(doc, target))
      throw FormatError("duplicate entry (doc " + std::to_string(doc) + ", entity " + std::to_string(target) + ")",
                        entry_offset);
    const auto values = static_cast<std::uint64_t>(m) * dim;
    r.require(values * 4, "embedding rows");
    EmbeddingMatrix rows(m, dim);
    for (std::uint64_t k = 0; k < values; ++k) {
      const auto at = r.offset();
      const float v = r.f32();
      if (!std::isfinite(v)) throw FormatError("non-finite embedding value", at);
      rows.data()[k] = v;
    }
    store.insert(doc, target, std::move(rows));
  }
  if (!r.at_end()) throw FormatError("trailing bytes after last entry", r.offset());
  return store;
}

}  // namespace reic
