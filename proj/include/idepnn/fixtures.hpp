#ifndef IDEPNN_FIXTURES_HPP
#define IDEPNN_FIXTURES_HPP

#include <array>
#include <cstdint>

#include "idepnn/corpus.hpp"

namespace idepnn {

// Deterministic desk-scale corpus generator. Each document carries one typed
// entity pair; the pair is positive exactly when the tree path between the
// two heads contains the trigger token.
struct FixtureSpec {
  int num_docs = 200;
  int min_sentences = 2;
  int max_sentences = 4;
  int min_tokens = 4;
  int max_tokens = 10;
  // P(sentence distance = k) for k in 0..3, clamped to what the document
  // allows; must sum to 1.
  std::array<double, 4> distance_weights = {0.4, 0.3, 0.2, 0.1};
  double positive_rate = 0.5;
  std::string relation_label = "REL";
  std::string role1 = "TA";
  std::string role2 = "TB";
  std::string trigger = "trigger";
  std::uint64_t seed = 1;

  RelationSchema schema() const {
    RelationSchema s;
    s.entries.push_back({relation_label, role1, role2});
    return s;
  }
};

// Random single-root dependency tree: token i > 1 attaches to a uniform
// earlier token with a label from a fixed 10-relation inventory.
Sentence random_tree(int n_tokens, std::uint64_t seed);

Corpus generate_corpus(const FixtureSpec& spec);

}  // namespace idepnn

#endif
