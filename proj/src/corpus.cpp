#include "reic/corpus.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace reic {

using nlohmann::json;

bool Sentence::mentions_entity(EntityId e) const {
  return std::find(mentions.begin(), mentions.end(), e) != mentions.end();
}

int Sentence::count_mentions(EntityId e) const {
  return static_cast<int>(std::count(mentions.begin(), mentions.end(), e));
}

bool Document::contains(EntityId e) const {
  return std::binary_search(entity_set.begin(), entity_set.end(), e);
}

Document make_document(DocId id, std::vector<Sentence> sentences) {
  Document doc;
  doc.id = id;
  doc.sentences = std::move(sentences);
  for (const auto& s : doc.sentences) doc.entity_set.insert(doc.entity_set.end(), s.mentions.begin(), s.mentions.end());
  std::sort(doc.entity_set.begin(), doc.entity_set.end());
  doc.entity_set.erase(std::unique(doc.entity_set.begin(), doc.entity_set.end()), doc.entity_set.end());
  return doc;
}

void Corpus::add_document(Document doc) {
  if (index_.count(doc.id)) throw DataError("duplicate document id " + std::to_string(doc.id));
  index_.emplace(doc.id, documents_.size());
  documents_.push_back(std::move(doc));
}

const Document& Corpus::document(DocId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw DataError("unknown document id " + std::to_string(id));
  return documents_[it->second];
}

Index target_sentence_index(const Document& doc, EntityId entity) {
  for (Index m = 0; m < doc.size(); ++m)
    if (doc.sentences[static_cast<std::size_t>(m)].mentions_entity(entity)) return m;
  throw NotFoundError("entity " + std::to_string(entity) + " is not mentioned in document " + std::to_string(doc.id));
}

std::vector<std::string> validate_bag(const Bag& bag, const Corpus& corpus) {
  std::vector<std::string> out;
  if (bag.paths.empty()) out.push_back("bag has no text paths");
  if (bag.relation != kNoRelation && (bag.relation < 0 || bag.relation >= corpus.num_relations()))
    out.push_back("relation id " + std::to_string(bag.relation) + " outside vocabulary");
  if (bag.path_labels && bag.path_labels->size() != bag.paths.size())
    out.push_back("path_labels length differs from path count");

  for (std::size_t n = 0; n < bag.paths.size(); ++n) {
    const auto& p = bag.paths[n];
    const std::string where = "path " + std::to_string(n) + ": ";
    if (!corpus.has_document(p.head_doc) || !corpus.has_document(p.tail_doc)) {
      out.push_back(where + "references a missing document");
      continue;
    }
    const auto& hd = corpus.document(p.head_doc);
    const auto& td = corpus.document(p.tail_doc);
    if (!hd.contains(bag.head)) out.push_back(where + "head entity absent from head document");
    if (!td.contains(bag.tail)) out.push_back(where + "tail entity absent from tail document");
    if (p.bridges.empty()) out.push_back(where + "empty bridge entity set");
    for (EntityId b : p.bridges)
      if (!hd.contains(b) || !td.contains(b))
        out.push_back(where + "bridge entity " + std::to_string(b) + " not shared by both documents");
  }
  return out;
}

void validate_corpus(const Corpus& corpus) {
  const auto n_entities = corpus.entities.size();
  for (const auto& doc : corpus.documents()) {
    if (doc.sentences.empty()) throw DataError("document " + std::to_string(doc.id) + " has no sentences");
    for (std::size_t m = 0; m < doc.sentences.size(); ++m) {
      const auto& s = doc.sentences[m];
      if (s.token_count < 1)
        throw DataError("document " + std::to_string(doc.id) + " sentence " + std::to_string(m) +
                        " has non-positive token_count");
      for (EntityId e : s.mentions)
        if (e >= n_entities)
          throw DataError("document " + std::to_string(doc.id) + " mentions unknown entity " + std::to_string(e));
    }
  }
  for (std::size_t b = 0; b < corpus.bags.size(); ++b) {
    const auto& bag = corpus.bags[b];
    if (bag.head >= n_entities || bag.tail >= n_entities)
      throw DataError("bag " + std::to_string(b) + " references an unknown entity");
    for (const auto& p : bag.paths)
      if (!corpus.has_document(p.head_doc) || !corpus.has_document(p.tail_doc))
        throw DataError("bag " + std::to_string(b) + " references an unknown document");
    if (bag.relation != kNoRelation && (bag.relation < 0 || bag.relation >= corpus.num_relations()))
      throw DataError("bag " + std::to_string(b) + " has relation outside vocabulary");
  }
}

namespace {

json to_json(const Corpus& corpus) {
  json docs = json::array();
  for (const auto& doc : corpus.documents()) {
    json sentences = json::array();
    for (const auto& s : doc.sentences) {
      json js = {{"token_count", s.token_count}, {"mentions", s.mentions}};
      if (s.evidence) js["evidence"] = *s.evidence;
      sentences.push_back(std::move(js));
    }
    docs.push_back({{"id", doc.id}, {"sentences", std::move(sentences)}});
  }

  json bags = json::array();
  for (const auto& bag : corpus.bags) {
    json paths = json::array();
    for (const auto& p : bag.paths)
      paths.push_back({{"head_doc", p.head_doc}, {"tail_doc", p.tail_doc}, {"bridges", p.bridges}});
    json jb = {{"head", bag.head},
               {"tail", bag.tail},
               {"relation", bag.relation == kNoRelation ? json(nullptr) : json(bag.relation)},
               {"paths", std::move(paths)}};
    if (bag.path_labels) jb["path_labels"] = *bag.path_labels;
    bags.push_back(std::move(jb));
  }

  return {{"entities", corpus.entities},
          {"relations", corpus.relations},
          {"documents", std::move(docs)},
          {"bags", std::move(bags)}};
}

Corpus from_json(const json& j) {
  Corpus corpus;
  corpus.entities = j.at("entities").get<std::vector<std::string>>();
  corpus.relations = j.at("relations").get<std::vector<std::string>>();
  for (const auto& jd : j.at("documents")) {
    std::vector<Sentence> sentences;
    for (const auto& js : jd.at("sentences")) {
      Sentence s;
      s.token_count = js.at("token_count").get<int>();
      s.mentions = js.at("mentions").get<std::vector<EntityId>>();
      if (js.contains("evidence")) s.evidence = js.at("evidence").get<bool>();
      sentences.push_back(std::move(s));
    }
    corpus.add_document(make_document(jd.at("id").get<DocId>(), std::move(sentences)));
  }
  for (const auto& jb : j.at("bags")) {
    Bag bag;
    bag.head = jb.at("head").get<EntityId>();
    bag.tail = jb.at("tail").get<EntityId>();
    bag.relation = jb.at("relation").is_null() ? kNoRelation : jb.at("relation").get<RelationId>();
    for (const auto& jp : jb.at("paths")) {
      TextPath p;
      p.head_doc = jp.at("head_doc").get<DocId>();
      p.tail_doc = jp.at("tail_doc").get<DocId>();
      p.bridges = jp.at("bridges").get<std::vector<EntityId>>();
      bag.paths.push_back(std::move(p));
    }
    if (jb.contains("path_labels")) bag.path_labels = jb.at("path_labels").get<std::vector<bool>>();
    corpus.bags.push_back(std::move(bag));
  }
  return corpus;
}

}  // namespace

std::string corpus_to_json_string(const Corpus& corpus) { return to_json(corpus).dump(1); }

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << corpus_to_json_string(corpus) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  Corpus corpus;
  try {
    corpus = from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw DataError("malformed corpus file " + path.string() + ": " + e.what());
  }
  validate_corpus(corpus);
  return corpus;
}

}  // namespace reic
