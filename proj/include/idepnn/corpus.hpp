#ifndef IDEPNN_CORPUS_HPP
#define IDEPNN_CORPUS_HPP

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace idepnn {

// Label attached to candidate pairs that carry no gold relation.
inline const std::string kNoneLabel = "NONE";

struct Token {
  int index = 0;          // 1-based position within the sentence
  std::string surface;
  std::string pos;
  int head = 0;           // governor index; 0 marks the syntactic root
  std::string deprel;
  // Character offsets [start, end) into the document text, counted in
  // Unicode scalar values. -1 when unknown.
  long char_start = -1;
  long char_end = -1;

  bool has_span() const { return char_start >= 0 && char_end >= 0; }
};

struct Sentence {
  int doc_index = 0;      // 0-based position within the document
  std::vector<Token> tokens;

  const Token& token(int index_1based) const { return tokens[index_1based - 1]; }
  int size() const { return static_cast<int>(tokens.size()); }
  // Index of the unique root token; requires a validated sentence.
  int root_index() const;
};

// Throws DataError unless the sentence is a proper single-root tree:
// heads in range, no self-loops, exactly one root, all tokens reachable.
// `where` prefixes the error message (e.g. "doc d1 sentence 3").
void validate_sentence(const Sentence& s, const std::string& where);

struct EntityMention {
  std::string id;
  int sentence = 0;       // doc_index of the containing sentence
  int first = 0;          // inclusive 1-based token range
  int last = 0;
  std::string etype;
};

struct RelationInstance {
  std::string e1;
  std::string e2;
  std::string label;
};

struct Document {
  std::string id;
  std::string text;
  std::vector<Sentence> sentences;
  std::vector<EntityMention> mentions;
  std::vector<RelationInstance> gold_relations;

  const EntityMention* find_mention(const std::string& mention_id) const;
};

// Throws DataError when any invariant fails, naming the document.
void validate_document(const Document& doc);

struct Corpus {
  std::vector<Document> docs;

  const Document* find(const std::string& doc_id) const;
};

struct CandidatePair {
  std::string doc_id;
  std::string e1;
  std::string e2;
  std::string label = kNoneLabel;
  int sentence_distance = 0;

  bool positive() const { return label != kNoneLabel; }
};

struct RelationSchema {
  struct Entry {
    std::string label;
    std::string role1;    // admissible entity type of e1
    std::string role2;    // admissible entity type of e2
  };
  std::vector<Entry> entries;

  // Throws DataError on duplicate labels or a NONE label.
  void validate() const;
  bool admits(const std::string& type1, const std::string& type2) const;
  std::vector<std::string> labels() const;
};

// All ordered mention pairs with schema-admissible types whose sentence
// distance is at most k_max. Pairs matching a gold relation (same ids, same
// role order) carry its label, everything else NONE. Order is deterministic:
// mentions sorted by (sentence, first, id), e1 outer, e2 inner.
std::vector<CandidatePair> generate_candidates(const Document& doc, int k_max,
                                               const RelationSchema& schema);

// Keeps every positive candidate and down-samples NONE candidates uniformly
// without replacement to the positive count. Output preserves input order.
std::vector<CandidatePair> sample_negatives(const std::vector<CandidatePair>& candidates,
                                            std::uint64_t seed);

struct SplitRatios {
  double train = 0.6;
  double dev = 0.2;
  double test = 0.2;
};

// Document-level partition; sizes match the ratios to within one document.
std::array<Corpus, 3> split_corpus(const Corpus& corpus, const SplitRatios& ratios,
                                   std::uint64_t seed);

}  // namespace idepnn

#endif
