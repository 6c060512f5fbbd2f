#ifndef IDEPNN_MODEL_HPP
#define IDEPNN_MODEL_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "idepnn/features.hpp"
#include "idepnn/recursive.hpp"
#include "idepnn/sequence.hpp"

namespace idepnn {

enum class Variant { IDepNnAdp, IDepNnSdp, IBiRnn };

std::string variant_name(Variant v);          // "iDepNN-ADP" etc.
Variant variant_from_name(const std::string& name);  // case-insensitive

struct ModelConfig {
  Variant variant = Variant::IDepNnSdp;
  int word_dim = 200;
  int subtree_dim = 50;
  int hidden_dim = 100;
  LexicalFeatureConfig features;
  int k_train = 1;
  int subtree_depth = -1;       // < 0: unlimited
  long min_freq = 1;
  double learning_rate = 0.01;
  double clip_norm = 5.0;
  int max_epochs = 200;
  int patience = 10;
  bool train_word_embeddings = false;  // pretrained rows; specials always train
  std::uint64_t seed = 1;

  bool uses_recursive() const { return variant == Variant::IDepNnAdp; }
  EncoderMode mode() const {
    return variant == Variant::IDepNnAdp ? EncoderMode::Adp : EncoderMode::Sdp;
  }

  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
};

// Every learnable tensor of one model.
struct ModelParams {
  SequenceParams seq;
  RecursiveParams rec;        // empty transforms unless the variant uses them
  EmbeddingTable word;
  EmbeddingTable pos;
  EmbeddingTable pi;
  EmbeddingTable et;
};

struct TrainMetadata {
  int epochs_run = 0;
  int best_epoch = 0;
  double best_dev_f1 = 0.0;
  long skipped_candidates = 0;
  long clamped_losses = 0;
};

struct TrainedModel {
  ModelConfig config;
  RelationSchema schema;
  std::vector<std::string> labels;  // positive labels then NONE
  Vocab words;
  TagVocab pos_tags;
  TagVocab etypes;
  RelVocab rels;
  ModelParams params;
  TrainMetadata meta;

  int none_label_id() const { return static_cast<int>(labels.size()) - 1; }
  int label_id(const std::string& label) const;  // -1 when absent
  InputLayout layout() const;
};

// Versioned binary model file ("IDNN" magic, little-endian, section-tagged
// tensors, config echoed as JSON). save/load round-trips bit-identically.
void save_model(const TrainedModel& model, std::ostream& out);
void save_model_file(const TrainedModel& model, const std::string& path);
TrainedModel load_model(std::istream& in);
TrainedModel load_model_file(const std::string& path);

}  // namespace idepnn

#endif
