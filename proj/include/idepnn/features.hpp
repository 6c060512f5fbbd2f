#ifndef IDEPNN_FEATURES_HPP
#define IDEPNN_FEATURES_HPP

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "idepnn/corpus.hpp"
#include "idepnn/graph.hpp"

namespace idepnn {

// Surface vocabulary. Ids are dense from 0; the first five are reserved for
// the OOV word and the four entity-boundary markers. Lookups lowercase the
// surface form first.
class Vocab {
 public:
  static constexpr int kOov = 0;
  static constexpr int kE1Open = 1;
  static constexpr int kE1Close = 2;
  static constexpr int kE2Open = 3;
  static constexpr int kE2Close = 4;
  static constexpr int kSpecialCount = 5;

  Vocab();

  int size() const { return static_cast<int>(tokens_.size()); }
  // Adds the (already normalized) token if absent; returns its id.
  int add(const std::string& token, long freq = 0);
  // Id of the lowercased surface form, or kOov.
  int lookup(const std::string& surface) const;
  bool contains_normalized(const std::string& token) const;
  const std::string& token(int id) const { return tokens_[id]; }
  long freq(int id) const { return freq_[id]; }
  void bump_freq(int id, long by) { freq_[id] += by; }

  static int marker_id(TokenUnit::Kind kind);
  static std::string normalize(const std::string& surface);

  // "token\tid\tfreq" lines.
  void dump(std::ostream& out) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<long> freq_;
  std::unordered_map<std::string, int> ids_;
};

// Builds a vocabulary from corpus surface forms: tokens with frequency of at
// least min_freq get ids, ordered by (-freq, token) for determinism.
Vocab build_vocab(const Corpus& corpus, long min_freq);

// Tag inventory (POS tags or entity types). Id 0 is the null tag used by
// marker units, id 1 the fallback for unseen tags.
class TagVocab {
 public:
  static constexpr int kNull = 0;
  static constexpr int kUnk = 1;

  TagVocab();
  int size() const { return static_cast<int>(tags_.size()); }
  int add(const std::string& tag);
  int lookup(const std::string& tag) const;  // kUnk when unseen, kNull for ""
  const std::string& tag(int id) const { return tags_[id]; }

 private:
  std::vector<std::string> tags_;
  std::unordered_map<std::string, int> ids_;
};

TagVocab collect_pos_tags(const Corpus& corpus);
TagVocab collect_entity_types(const Corpus& corpus, const RelationSchema& schema);

struct EmbeddingTable {
  Eigen::MatrixXd rows;               // one row per id
  bool trainable = true;
  // Per-row override; empty means every row follows `trainable`.
  std::vector<std::uint8_t> row_trainable;

  int dim() const { return static_cast<int>(rows.cols()); }
  bool row_is_trainable(int row) const {
    return row_trainable.empty() ? trainable : row_trainable[row] != 0;
  }
};

// Reads "token v1 .. vD" lines. The vocabulary gains one entry per line after
// the reserved specials; special rows are drawn from N(0, 0.01^2) and stay
// trainable while loaded rows are frozen (flip EmbeddingTable::trainable to
// fine-tune them). Duplicate tokens and dimension mismatches are errors.
struct LoadedEmbeddings {
  EmbeddingTable table;
  Vocab vocab;
};
LoadedEmbeddings load_embeddings(std::istream& in, int expected_dim, std::uint64_t seed);

// Fresh table with every row drawn uniformly from [-scale, scale], except
// all-zero frozen null rows listed in `zero_rows`.
EmbeddingTable random_table(int rows, int dim, double scale, std::uint64_t seed,
                            const std::vector<int>& zero_rows = {});

enum class EncoderMode { Sdp, Adp };

struct LexicalFeatureConfig {
  bool pos = true;
  bool pi = true;
  bool et = true;
  int pos_dim = 5;
  int pi_dim = 5;
  int et_dim = 5;

  int total_dim() const {
    return (pos ? pos_dim : 0) + (pi ? pi_dim : 0) + (et ? et_dim : 0);
  }
};

// Concatenation layout of one input vector: [word | subtree? | POS | PI | ET]
// with disabled features skipped. Offsets of disabled blocks are -1.
struct InputLayout {
  int word_offset = 0;
  int word_dim = 0;
  int subtree_offset = -1;
  int subtree_dim = 0;
  int pos_offset = -1;
  int pi_offset = -1;
  int et_offset = -1;
  int total = 0;
};

InputLayout input_layout(EncoderMode mode, int word_dim, int subtree_dim,
                         const LexicalFeatureConfig& config);

// Feature ids of one token unit, resolved against the model vocabularies.
struct UnitIds {
  int word = Vocab::kOov;
  int pos = TagVocab::kNull;
  int et = TagVocab::kNull;
  int pi = 0;
};

UnitIds resolve_unit(const TokenUnit& unit, const Vocab& words, const TagVocab& pos_tags,
                     const TagVocab& etypes);

struct FeatureTables {
  const EmbeddingTable* word = nullptr;
  const EmbeddingTable* pos = nullptr;
  const EmbeddingTable* pi = nullptr;
  const EmbeddingTable* et = nullptr;
};

// Assembles the input vector for one unit. `subtree` must be non-null exactly
// in ADP mode (InternalError otherwise). The result's dimension always equals
// layout.total.
Eigen::VectorXd assemble_input(const UnitIds& ids, EncoderMode mode, const InputLayout& layout,
                               const FeatureTables& tables, const LexicalFeatureConfig& config,
                               const Eigen::VectorXd* subtree);

}  // namespace idepnn

#endif
