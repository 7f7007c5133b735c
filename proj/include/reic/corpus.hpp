#ifndef REIC_CORPUS_HPP
#define REIC_CORPUS_HPP

#include "reic/core.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace reic {

struct Sentence {
  int token_count = 1;
  std::vector<EntityId> mentions;
  /// Planted-evidence flag; only synthetic corpora carry it and training never reads it.
  std::optional<bool> evidence;

  bool mentions_entity(EntityId e) const;
  int count_mentions(EntityId e) const;
};

struct Document {
  DocId id = 0;
  std::vector<Sentence> sentences;
  std::vector<EntityId> entity_set;  // sorted, unique

  Index size() const { return static_cast<Index>(sentences.size()); }
  bool contains(EntityId e) const;
};

/// Builds a document and derives its entity set from the sentence mentions.
Document make_document(DocId id, std::vector<Sentence> sentences);

struct TextPath {
  DocId head_doc = 0;
  DocId tail_doc = 0;
  std::vector<EntityId> bridges;
};

struct Bag {
  EntityId head = 0;
  EntityId tail = 0;
  RelationId relation = kNoRelation;
  std::vector<TextPath> paths;
  /// Per-path oracle: true = the path expresses the bag relation (synthetic only).
  std::optional<std::vector<bool>> path_labels;

  bool positive() const { return relation != kNoRelation; }
};

class Corpus {
 public:
  std::vector<std::string> entities;
  std::vector<std::string> relations;
  std::vector<Bag> bags;

  const std::vector<Document>& documents() const { return documents_; }
  void add_document(Document doc);
  const Document& document(DocId id) const;
  bool has_document(DocId id) const { return index_.count(id) != 0; }
  int num_relations() const { return static_cast<int>(relations.size()); }

 private:
  std::vector<Document> documents_;
  std::unordered_map<DocId, std::size_t> index_;
};

/// Lowest sentence index mentioning `entity`; NotFoundError if absent.
Index target_sentence_index(const Document& doc, EntityId entity);

/// Human-readable violations of the path conditions (head entity in head
/// document, tail entity in tail document, non-empty bridge set present in
/// both). Empty means the bag is well formed.
std::vector<std::string> validate_bag(const Bag& bag, const Corpus& corpus);

/// Checks table references (mention ids, relation ids, document ids, token
/// counts). Throws DataError on the first problem.
void validate_corpus(const Corpus& corpus);

void write_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);
std::string corpus_to_json_string(const Corpus& corpus);

}  // namespace reic

#endif  // REIC_CORPUS_HPP
