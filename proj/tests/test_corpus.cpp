#include "oracles.hpp"

#include "reic/binary_io.hpp"
#include "reic/corpus.hpp"
#include "reic/embedding_store.hpp"
#include "reic/synthetic.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <fstream>

namespace reic {
namespace {

Sentence sentence(std::vector<EntityId> mentions, int tokens = 10) {
  Sentence s;
  s.token_count = tokens;
  s.mentions = std::move(mentions);
  return s;
}

SyntheticConfig small_config() {
  SyntheticConfig cfg;
  cfg.n_bags = 30;
  cfg.n_eval_bags = 10;
  cfg.dim = 8;
  cfg.seed = 4;
  return cfg;
}

std::vector<std::uint8_t> store_bytes(const EmbeddingStore& store, const oracle::TempDir& dir) {
  write_embedding_store(store, dir / "s.bin");
  return read_file(dir / "s.bin");
}

TEST(TargetSentence, FirstMentionWins) {
  const auto only_first = make_document(1, {sentence({7}), sentence({}), sentence({})});
  EXPECT_EQ(target_sentence_index(only_first, 7), 0);
  std::vector<Sentence> s(9, sentence({}));
  s[3] = sentence({5});
  s[7] = sentence({5, 6});
  EXPECT_EQ(target_sentence_index(make_document(2, s), 5), 3);
  EXPECT_THROW(target_sentence_index(make_document(3, s), 99), NotFoundError);
}

TEST(TargetSentence, ReturnedIndexAlwaysMentionsEntity) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Sentence> s;
    const int M = 1 + static_cast<int>(rng() % 20);
    for (int m = 0; m < M; ++m) {
      std::vector<EntityId> mentions;
      for (int k = 0; k < 2; ++k) mentions.push_back(rng() % 6);
      s.push_back(sentence(mentions));
    }
    const auto doc = make_document(1, s);
    for (EntityId e : doc.entity_set) {
      const Index idx = target_sentence_index(doc, e);
      EXPECT_TRUE(doc.sentences[static_cast<std::size_t>(idx)].mentions_entity(e));
      for (Index m = 0; m < idx; ++m) EXPECT_FALSE(doc.sentences[static_cast<std::size_t>(m)].mentions_entity(e));
    }
  }
}

TEST(Document, EntitySetIsSortedUnique) {
  const auto doc = make_document(1, {sentence({4, 2}), sentence({2, 9})});
  EXPECT_EQ(doc.entity_set, (std::vector<EntityId>{2, 4, 9}));
}

Corpus tiny_corpus() {
  Corpus c;
  c.entities = {"head", "tail", "bridge"};
  c.relations = {"rel"};
  c.add_document(make_document(10, {sentence({0}), sentence({2})}));
  c.add_document(make_document(11, {sentence({2, 1})}));
  Bag bag;
  bag.head = 0;
  bag.tail = 1;
  bag.relation = 0;
  bag.paths.push_back({10, 11, {2}});
  c.bags.push_back(bag);
  return c;
}

TEST(ValidateBag, WellFormedBagHasNoViolations) {
  const auto c = tiny_corpus();
  EXPECT_TRUE(validate_bag(c.bags[0], c).empty());
}

TEST(ValidateBag, EmptyBridgeSetIsOneViolation) {
  auto c = tiny_corpus();
  c.bags[0].paths[0].bridges.clear();
  EXPECT_EQ(validate_bag(c.bags[0], c).size(), 1u);
}

TEST(ValidateBag, ReportsEachBrokenCondition) {
  auto c = tiny_corpus();
  c.bags[0].head = 1;                   // tail entity is not in the head document
  c.bags[0].paths[0].bridges = {0, 2};  // entity 0 is absent from the tail document
  EXPECT_EQ(validate_bag(c.bags[0], c).size(), 2u);
}

TEST(CorpusJson, RoundTripPreservesEverything) {
  oracle::TempDir dir("corpus");
  auto c = tiny_corpus();
  c.bags[0].path_labels = std::vector<bool>{true};
  Sentence ev = sentence({0, 2}, 31);
  ev.evidence = true;
  c.add_document(make_document(12, {ev}));
  write_corpus(c, dir / "c.json");
  const auto back = load_corpus(dir / "c.json");
  EXPECT_EQ(corpus_to_json_string(back), corpus_to_json_string(c));
  EXPECT_EQ(back.document(12).sentences[0].token_count, 31);
  EXPECT_TRUE(*back.document(12).sentences[0].evidence);
  EXPECT_FALSE(back.document(10).sentences[0].evidence.has_value());
}

TEST(CorpusJson, NullRelationMeansNoRelation) {
  oracle::TempDir dir("corpus");
  auto c = tiny_corpus();
  c.bags[0].relation = kNoRelation;
  write_corpus(c, dir / "c.json");
  EXPECT_EQ(load_corpus(dir / "c.json").bags[0].relation, kNoRelation);
  std::ifstream in(dir / "c.json");
  EXPECT_TRUE(nlohmann::json::parse(in)["bags"][0]["relation"].is_null());
}

TEST(CorpusJson, MalformedInputsAreDataErrors) {
  oracle::TempDir dir("corpus");
  std::ofstream(dir / "bad.json") << "{\"entities\": [";
  EXPECT_THROW(load_corpus(dir / "bad.json"), DataError);
  std::ofstream(dir / "ref.json")
      << R"({"entities":["a"],"relations":["r"],"documents":[{"id":1,"sentences":[{"token_count":3,"mentions":[5]}]}],"bags":[]})";
  EXPECT_THROW(load_corpus(dir / "ref.json"), DataError);
  EXPECT_THROW(load_corpus(dir / "missing.json"), DataError);
}

TEST(EmbeddingStoreFormat, RoundTripIsBitExact) {
  oracle::TempDir dir("store");
  Rng rng(1);
  EmbeddingStore store(5);
  for (DocId d = 0; d < 4; ++d) store.insert(d, 100 + d, oracle::random_matrix(3 + d, 5, rng).cast<float>());
  write_embedding_store(store, dir / "s.bin");
  const auto back = load_embedding_store(dir / "s.bin", 5);
  EXPECT_TRUE(back == store);
  EXPECT_EQ(store_bytes(back, dir), read_file(dir / "s.bin"));
}

TEST(EmbeddingStoreFormat, SizeArithmetic) {
  oracle::TempDir dir("store");
  EmbeddingStore store(3);
  store.insert(1, 2, EmbeddingMatrix::Zero(2, 3));
  // magic 8 + dim 4 + count 4 + (doc 8 + entity 8 + M 4) + 2 rows * 3 floats * 4 bytes.
  EXPECT_EQ(store_bytes(store, dir).size(), 60u);
}

TEST(EmbeddingStoreFormat, LittleEndianLayout) {
  oracle::TempDir dir("store");
  EmbeddingStore store(1);
  EmbeddingMatrix row(1, 1);
  row(0, 0) = 1.0f;
  store.insert(0x0102, 7, row);
  const auto b = store_bytes(store, dir);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 8), "REICEMB1");
  EXPECT_EQ(b[8], 1);    // dim
  EXPECT_EQ(b[12], 1);   // entries
  EXPECT_EQ(b[16], 0x02);
  EXPECT_EQ(b[17], 0x01);
  EXPECT_EQ(b[24], 7);
  EXPECT_EQ(b[32], 1);   // M
  EXPECT_EQ(b[39], 0x3f);  // 1.0f = 0x3f800000
  EXPECT_EQ(b[38], 0x80);
}

TEST(EmbeddingStoreFormat, CorruptedMagicNamesExpectedMagic) {
  oracle::TempDir dir("store");
  EmbeddingStore store(2);
  store.insert(1, 1, EmbeddingMatrix::Zero(1, 2));
  auto bytes = store_bytes(store, dir);
  bytes[3] = 'X';
  write_file(dir / "bad.bin", bytes);
  try {
    load_embedding_store(dir / "bad.bin");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("REICEMB1"), std::string::npos);
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(EmbeddingStoreFormat, TruncationReportsOffset) {
  oracle::TempDir dir("store");
  EmbeddingStore store(3);
  store.insert(1, 2, EmbeddingMatrix::Zero(2, 3));
  auto bytes = store_bytes(store, dir);
  bytes.resize(50);
  write_file(dir / "short.bin", bytes);
  try {
    load_embedding_store(dir / "short.bin");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_GE(e.offset(), 36u);
    EXPECT_LE(e.offset(), 50u);
  }
}

TEST(EmbeddingStoreFormat, RejectsDimMismatchAndTrailingBytes) {
  oracle::TempDir dir("store");
  EmbeddingStore store(3);
  store.insert(1, 2, EmbeddingMatrix::Zero(2, 3));
  write_embedding_store(store, dir / "s.bin");
  EXPECT_THROW(load_embedding_store(dir / "s.bin", 768), FormatError);
  auto bytes = read_file(dir / "s.bin");
  bytes.push_back(0);
  write_file(dir / "long.bin", bytes);
  EXPECT_THROW(load_embedding_store(dir / "long.bin"), FormatError);
}

TEST(EmbeddingStoreFormat, RejectsNonFiniteValues) {
  EmbeddingStore store(2);
  EmbeddingMatrix rows = EmbeddingMatrix::Zero(1, 2);
  rows(0, 1) = std::numeric_limits<float>::infinity();
  EXPECT_THROW(store.insert(1, 1, rows), DataError);
  EXPECT_THROW(store.insert(1, 1, EmbeddingMatrix::Zero(1, 3)), ShapeError);
}

TEST(EmbeddingStoreAccess, MissingKeyNamesIt) {
  EmbeddingStore store(2);
  try {
    store.at(41, 42);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("41"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("42"), std::string::npos);
  }
}

TEST(Synthetic, SameSeedIsByteIdentical) {
  oracle::TempDir dir("synthetic");
  const auto a = generate_synthetic(small_config());
  const auto b = generate_synthetic(small_config());
  EXPECT_EQ(corpus_to_json_string(a.train), corpus_to_json_string(b.train));
  EXPECT_EQ(corpus_to_json_string(a.eval), corpus_to_json_string(b.eval));
  EXPECT_EQ(store_bytes(a.store, dir), store_bytes(b.store, dir));

  auto other = small_config();
  other.seed = 5;
  EXPECT_NE(corpus_to_json_string(generate_synthetic(other).train), corpus_to_json_string(a.train));
}

TEST(Synthetic, NoNaBagsWhenFractionZero) {
  auto cfg = small_config();
  cfg.na_bag_fraction = 0.0;
  const auto data = generate_synthetic(cfg);
  for (const auto& bag : data.train.bags) EXPECT_TRUE(bag.positive());
  for (const auto& bag : data.eval.bags) EXPECT_TRUE(bag.positive());
}

TEST(Synthetic, EvidenceRespectsOffsetExhaustiveScan) {
  auto cfg = small_config();
  cfg.sentences_per_doc = 60;
  cfg.evidence_offset_min = 20;
  cfg.n_bags = 150;
  const auto data = generate_synthetic(cfg);
  int evidence_seen = 0;
  for (const Corpus* c : {&data.train, &data.eval}) {
    for (const auto& bag : c->bags) {
      for (const auto& path : bag.paths) {
        for (auto [doc_id, target] : {std::pair{path.head_doc, bag.head}, std::pair{path.tail_doc, bag.tail}}) {
          const auto& doc = c->document(doc_id);
          const Index tgt = target_sentence_index(doc, target);
          for (Index m = 0; m < doc.size(); ++m) {
            const auto& s = doc.sentences[static_cast<std::size_t>(m)];
            if (!s.evidence.value_or(false)) continue;
            ++evidence_seen;
            EXPECT_GE(std::abs(m - tgt), 20);
          }
        }
      }
    }
  }
  EXPECT_GT(evidence_seen, 50);
}

TEST(Synthetic, ThousandBagsValidate) {
  auto cfg = small_config();
  cfg.n_bags = 1000;
  cfg.n_eval_bags = 1;
  cfg.dim = 4;
  cfg.sentences_per_doc = 30;
  cfg.evidence_offset_min = 10;
  const auto data = generate_synthetic(cfg);
  ASSERT_EQ(data.train.bags.size(), 1000u);
  std::size_t violations = 0;
  for (const auto& bag : data.train.bags) violations += validate_bag(bag, data.train).size();
  EXPECT_EQ(violations, 0u);
  EXPECT_NO_THROW(validate_corpus(data.train));
}

TEST(Synthetic, EvidencePlantingMatchesOracleLabels) {
  const auto cfg = small_config();
  const auto data = generate_synthetic(cfg);
  for (const auto& bag : data.train.bags) {
    ASSERT_TRUE(bag.path_labels.has_value());
    bool any_positive = false;
    for (std::size_t p = 0; p < bag.paths.size(); ++p) {
      const bool label = (*bag.path_labels)[p];
      any_positive |= label;
      if (!bag.positive()) EXPECT_FALSE(label);
      const auto& path = bag.paths[p];
      for (auto [doc_id, target] : {std::pair{path.head_doc, bag.head}, std::pair{path.tail_doc, bag.tail}}) {
        const auto& doc = data.train.document(doc_id);
        const auto& rows = data.store.at(doc_id, target);
        EXPECT_EQ(rows.rows(), doc.size());
        int evidence = 0;
        for (Index m = 0; m < doc.size(); ++m) {
          const auto& s = doc.sentences[static_cast<std::size_t>(m)];
          if (!s.evidence.value_or(false)) continue;
          ++evidence;
          EXPECT_TRUE(s.mentions_entity(target));
          for (EntityId b : path.bridges) EXPECT_TRUE(s.mentions_entity(b));
          EXPECT_GT(rows(m, bag.relation), cfg.signature_scale / 2);
        }
        EXPECT_EQ(evidence, label ? 1 : 0);
      }
    }
    EXPECT_EQ(any_positive, bag.positive());
  }
}

TEST(Synthetic, InvalidConfigRejected) {
  auto cfg = small_config();
  cfg.evidence_offset_min = cfg.sentences_per_doc;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = small_config();
  cfg.n_relations = 1;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = small_config();
  cfg.na_bag_fraction = 1.0;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
}

}  // namespace
}  // namespace reic
