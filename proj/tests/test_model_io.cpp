#include <doctest.h>

#include <sstream>

#include "idepnn/errors.hpp"
#include "idepnn/model.hpp"

using namespace idepnn;

namespace {

TrainedModel tiny_model() {
  TrainedModel m;
  m.config.variant = Variant::IDepNnAdp;
  m.config.word_dim = 3;
  m.config.subtree_dim = 2;
  m.config.hidden_dim = 4;
  m.config.seed = 77;
  m.schema.entries.push_back({"REL", "TA", "TB"});
  m.labels = {"REL", kNoneLabel};
  m.words.add("cat", 4);
  m.words.add("dog", 2);
  m.pos_tags.add("NOUN");
  m.etypes.add("TA");
  m.etypes.add("TB");
  m.rels.add("nsubj");
  m.rels.add("obj");

  m.params.seq = init_sequence_params(5, 4, 2, 1);
  m.params.rec = init_recursive_params(m.rels.size(), 3, 2, 2);
  m.params.word = random_table(m.words.size(), 3, 0.1, 3);
  m.params.pos = random_table(m.pos_tags.size(), 2, 0.1, 4, {TagVocab::kNull});
  m.params.pi = random_table(kPiZoneCount, 2, 0.1, 5);
  m.params.et = random_table(m.etypes.size(), 2, 0.1, 6, {TagVocab::kNull});
  m.meta.epochs_run = 9;
  m.meta.best_epoch = 4;
  m.meta.best_dev_f1 = 0.5;
  return m;
}

std::string to_bytes(const TrainedModel& m) {
  std::ostringstream out(std::ios::binary);
  save_model(m, out);
  return out.str();
}

}  // namespace

TEST_CASE("model save/load round-trips bit-identically") {
  const TrainedModel m = tiny_model();
  const std::string bytes = to_bytes(m);
  std::istringstream in(bytes);
  const TrainedModel back = load_model(in);

  CHECK(to_bytes(back) == bytes);
  CHECK(back.config.variant == Variant::IDepNnAdp);
  CHECK(back.labels == m.labels);
  CHECK(back.words.size() == m.words.size());
  CHECK(back.words.lookup("dog") == m.words.lookup("dog"));
  CHECK(back.words.freq(back.words.lookup("cat")) == 4);
  CHECK(back.pos_tags.lookup("NOUN") == m.pos_tags.lookup("NOUN"));
  CHECK(back.rels.lookup("obj") == m.rels.lookup("obj"));
  CHECK(back.params.seq.input_transform == m.params.seq.input_transform);
  CHECK(back.params.rec.c_leaf == m.params.rec.c_leaf);
  CHECK(back.params.word.rows == m.params.word.rows);
  CHECK(back.params.pos.row_is_trainable(TagVocab::kNull) == false);
  CHECK(back.meta.best_epoch == 4);
  CHECK(back.meta.best_dev_f1 == 0.5);
}

TEST_CASE("model load rejects bad inputs") {
  const TrainedModel m = tiny_model();
  const std::string bytes = to_bytes(m);

  SUBCASE("wrong magic") {
    std::string corrupt = bytes;
    corrupt[0] = 'X';
    std::istringstream in(corrupt);
    CHECK_THROWS_WITH_AS(static_cast<void>(load_model(in)), doctest::Contains("magic"),
                         DataError);
  }

  SUBCASE("future version carries both version numbers") {
    std::string corrupt = bytes;
    corrupt[4] = 9;  // little-endian version field
    std::istringstream in(corrupt);
    CHECK_THROWS_WITH_AS(static_cast<void>(load_model(in)), doctest::Contains("version 9"),
                         DataError);
  }

  SUBCASE("truncated stream") {
    std::istringstream in(bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(static_cast<void>(load_model(in)), DataError);
  }
}

TEST_CASE("config JSON round trip") {
  ModelConfig cfg;
  cfg.variant = Variant::IBiRnn;
  cfg.word_dim = 12;
  cfg.features.et = false;
  cfg.k_train = 2;
  cfg.learning_rate = 0.005;
  cfg.seed = 31337;
  const ModelConfig back = ModelConfig::from_json(cfg.to_json());
  CHECK(back.variant == Variant::IBiRnn);
  CHECK(back.word_dim == 12);
  CHECK(back.features.et == false);
  CHECK(back.features.pos == true);
  CHECK(back.k_train == 2);
  CHECK(back.learning_rate == 0.005);
  CHECK(back.seed == 31337);
}

TEST_CASE("variant names round trip and reject junk") {
  for (Variant v : {Variant::IDepNnAdp, Variant::IDepNnSdp, Variant::IBiRnn}) {
    CHECK(variant_from_name(variant_name(v)) == v);
  }
  CHECK(variant_from_name("idepnn-sdp") == Variant::IDepNnSdp);
  CHECK_THROWS_AS(static_cast<void>(variant_from_name("transformer")), DataError);
}
