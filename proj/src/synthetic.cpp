#include "reic/synthetic.hpp"

#include <algorithm>
#include <numeric>

namespace reic {

void SyntheticConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("synthetic config: " + msg); };
  if (n_bags < 0 || n_eval_bags < 0) fail("bag counts must be non-negative");
  if (n_relations < 2) fail("n_relations must be at least 2");
  if (sentences_per_doc < 2) fail("sentences_per_doc must be at least 2");
  if (paths_per_bag < 1) fail("paths_per_bag must be at least 1");
  if (dim < n_relations) fail("dim must be at least n_relations (signature subspace)");
  if (!(noise_sigma >= 0.0)) fail("noise_sigma must be non-negative");
  if (!(na_bag_fraction >= 0.0 && na_bag_fraction < 1.0)) fail("na_bag_fraction must lie in [0, 1)");
  if (!(positive_path_fraction >= 0.0 && positive_path_fraction <= 1.0))
    fail("positive_path_fraction must lie in [0, 1]");
  if (evidence_offset_min < 0 || evidence_offset_min >= sentences_per_doc)
    fail("evidence_offset_min must satisfy 0 <= offset < sentences_per_doc");
  if (tokens_per_sentence < 1) fail("tokens_per_sentence must be positive");
  if (n_distractor_entities < 0) fail("n_distractor_entities must be non-negative");
}

namespace {

class Generator {
 public:
  explicit Generator(const SyntheticConfig& cfg) : cfg_(cfg), rng_(cfg.seed), noise_(0.0, cfg.noise_sigma) {}

  SyntheticData run() {
    SyntheticData out{Corpus{}, Corpus{}, EmbeddingStore(static_cast<std::uint32_t>(cfg_.dim))};
    std::vector<std::string> entities;
    for (int k = 0; k < cfg_.n_distractor_entities; ++k) entities.push_back("distractor_" + std::to_string(k));
    std::vector<std::string> relations;
    for (int r = 0; r < cfg_.n_relations; ++r) relations.push_back("rel_" + std::to_string(r));

    const int total = cfg_.n_bags + cfg_.n_eval_bags;
    std::vector<Document> docs_train, docs_eval;
    for (int b = 0; b < total; ++b) {
      const bool is_train = b < cfg_.n_bags;
      Corpus& split = is_train ? out.train : out.eval;
      auto& docs = is_train ? docs_train : docs_eval;

      Bag bag;
      const bool positive = uniform01(rng_) >= cfg_.na_bag_fraction;
      bag.relation = positive ? static_cast<RelationId>(rng_() % static_cast<std::uint64_t>(cfg_.n_relations))
                              : kNoRelation;
      bag.head = new_entity(entities, "head_" + std::to_string(b));
      bag.tail = new_entity(entities, "tail_" + std::to_string(b));
      std::vector<bool> labels;
      for (int p = 0; p < cfg_.paths_per_bag; ++p) {
        const bool path_positive = positive && (p == 0 || uniform01(rng_) < cfg_.positive_path_fraction);
        const EntityId bridge = new_entity(entities, "bridge_" + std::to_string(b) + "_" + std::to_string(p));
        TextPath path;
        path.bridges = {bridge};
        path.head_doc = next_doc_;
        docs.push_back(make_doc(bag.head, bridge, path_positive, bag.relation, out.store));
        path.tail_doc = next_doc_;
        docs.push_back(make_doc(bag.tail, bridge, path_positive, bag.relation, out.store));
        bag.paths.push_back(std::move(path));
        labels.push_back(path_positive);
      }
      bag.path_labels = std::move(labels);
      split.bags.push_back(std::move(bag));
    }

    for (Corpus* c : {&out.train, &out.eval}) {
      c->entities = entities;
      c->relations = relations;
    }
    for (auto& d : docs_train) out.train.add_document(std::move(d));
    for (auto& d : docs_eval) out.eval.add_document(std::move(d));
    return out;
  }

 private:
  EntityId new_entity(std::vector<std::string>& table, std::string name) {
    table.push_back(std::move(name));
    return static_cast<EntityId>(table.size() - 1);
  }

  std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  Document make_doc(EntityId target, EntityId bridge, bool plant_evidence, RelationId relation,
                    EmbeddingStore& store) {
    const auto M = static_cast<std::size_t>(cfg_.sentences_per_doc);
    const auto offset = static_cast<std::size_t>(std::max(cfg_.evidence_offset_min, 1));
    std::vector<Sentence> sentences(M);
    for (auto& s : sentences) {
      s.token_count = cfg_.tokens_per_sentence;
      s.evidence = false;
    }

    // The target must stay the first mention of its entity, so evidence
    // (which also mentions the target entity on the head side) goes after it.
    const std::size_t tgt = uniform_index(M - offset);
    sentences[tgt].mentions.push_back(target);

    std::size_t evidence = M;
    if (plant_evidence) {
      evidence = tgt + offset + uniform_index(M - tgt - offset);
      sentences[evidence].mentions = {target, bridge};
      sentences[evidence].evidence = true;
    }

    std::vector<std::size_t> filler;
    for (std::size_t m = 0; m < M; ++m)
      if (m != tgt && m != evidence) filler.push_back(m);

    const std::size_t k_bridge = std::min<std::size_t>(1 + uniform_index(3), filler.size());
    if (filler.empty()) {
      sentences[tgt].mentions.push_back(bridge);
    } else {
      std::vector<std::size_t> pool = filler;
      for (std::size_t k = 0; k < k_bridge; ++k) {
        const std::size_t pick = k + uniform_index(pool.size() - k);
        std::swap(pool[k], pool[pick]);
        sentences[pool[k]].mentions.push_back(bridge);
      }
    }
    if (cfg_.n_distractor_entities > 0) {
      for (std::size_t m : filler) {
        const std::size_t n = uniform_index(3);
        for (std::size_t k = 0; k < n; ++k)
          sentences[m].mentions.push_back(
              static_cast<EntityId>(uniform_index(static_cast<std::size_t>(cfg_.n_distractor_entities))));
      }
    }

    EmbeddingMatrix rows(static_cast<Index>(M), cfg_.dim);
    for (Index k = 0; k < rows.size(); ++k) rows.data()[k] = static_cast<float>(noise_(rng_));
    if (plant_evidence) rows(static_cast<Index>(evidence), relation) += static_cast<float>(cfg_.signature_scale);

    const DocId id = next_doc_++;
    store.insert(id, target, std::move(rows));
    return make_document(id, std::move(sentences));
  }

  const SyntheticConfig& cfg_;
  Rng rng_;
  std::normal_distribution<double> noise_;
  DocId next_doc_ = 0;
};

}  // namespace

SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  return Generator(cfg).run();
}

}  // namespace reic
