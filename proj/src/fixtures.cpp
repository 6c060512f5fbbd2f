#include "idepnn/fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <iterator>

#include "idepnn/errors.hpp"
#include "idepnn/graph.hpp"
#include "idepnn/rng.hpp"

namespace idepnn {

namespace {

const char* kWords[] = {"alpha",  "bravo",   "charlie", "delta", "echo",
                        "foxtrot", "golf",    "hotel",   "india", "juliett",
                        "kilo",   "lima",    "mike",    "november", "oscar",
                        "papa",   "quebec",  "romeo",   "sierra", "tango"};
const char* kPosTags[] = {"NOUN", "VERB", "ADJ", "ADV", "PROPN"};
const char* kDeprels[] = {"nsubj", "obj", "obl", "nmod", "amod",
                          "advmod", "det", "case", "conj", "cc"};

Sentence random_tree_impl(int n_tokens, Rng& rng) {
  if (n_tokens < 1) throw DataError("random_tree: need at least one token");
  Sentence s;
  for (int i = 1; i <= n_tokens; ++i) {
    Token t;
    t.index = i;
    t.surface = kWords[rng.below(std::size(kWords))];
    t.pos = kPosTags[rng.below(std::size(kPosTags))];
    if (i == 1) {
      t.head = 0;
      t.deprel = "root";
    } else {
      // Attaching to an earlier token keeps the tree acyclic and single-rooted.
      t.head = static_cast<int>(rng.range(1, i - 1));
      t.deprel = kDeprels[rng.below(std::size(kDeprels))];
    }
    s.tokens.push_back(std::move(t));
  }
  return s;
}

int sample_distance(const std::array<double, 4>& weights, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc += weights[k];
    if (u < acc) return k;
  }
  return 3;
}

}  // namespace

Sentence random_tree(int n_tokens, std::uint64_t seed) {
  Rng rng(seed);
  return random_tree_impl(n_tokens, rng);
}

Corpus generate_corpus(const FixtureSpec& spec) {
  if (spec.min_sentences < 1 || spec.max_sentences < spec.min_sentences ||
      spec.min_tokens < 1 || spec.max_tokens < spec.min_tokens) {
    throw DataError("generate_corpus: empty sentence/token range");
  }
  double weight_sum = 0.0;
  for (double w : spec.distance_weights) {
    if (w < 0.0) throw DataError("generate_corpus: negative distance weight");
    weight_sum += w;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9) {
    throw DataError("generate_corpus: distance weights must sum to 1");
  }

  Rng rng(spec.seed);
  Corpus corpus;
  for (int d = 0; d < spec.num_docs; ++d) {
    Document doc;
    char id[32];
    std::snprintf(id, sizeof(id), "synth%04d", d);
    doc.id = id;

    const int n_sents = static_cast<int>(rng.range(spec.min_sentences, spec.max_sentences));
    for (int s = 0; s < n_sents; ++s) {
      Sentence sent =
          random_tree_impl(static_cast<int>(rng.range(spec.min_tokens, spec.max_tokens)), rng);
      sent.doc_index = s;
      doc.sentences.push_back(std::move(sent));
    }

    const int k = std::min(sample_distance(spec.distance_weights, rng), n_sents - 1);
    const int s1 = static_cast<int>(rng.range(0, n_sents - 1 - k));
    const int s2 = s1 + k;
    const int len1 = doc.sentences[s1].size();
    const int len2 = doc.sentences[s2].size();
    int t1 = static_cast<int>(rng.range(1, len1));
    int t2 = static_cast<int>(rng.range(1, len2));
    if (s1 == s2) {
      if (len2 < 2) {
        corpus.docs.push_back(std::move(doc));  // no room for two mentions
        continue;
      }
      for (int attempt = 0; t2 == t1 && attempt < 64; ++attempt) {
        t2 = static_cast<int>(rng.range(1, len2));
      }
      if (t2 == t1) t2 = t1 == 1 ? 2 : 1;
    }

    doc.mentions.push_back({"T1", s1, t1, t1, spec.role1});
    doc.mentions.push_back({"T2", s2, t2, t2, spec.role2});

    if (rng.uniform() < spec.positive_rate) {
      // Plant the trigger on the tree path; prefer an interior node so the
      // mentions keep their own surfaces.
      const DocumentGraph graph = build_document_graph(doc);
      const ShortestPath path = shortest_path(graph, NodeRef{s1, t1}, NodeRef{s2, t2});
      std::size_t slot = path.nodes.size() / 2;
      if (path.nodes.size() >= 3 && (slot == 0 || slot + 1 == path.nodes.size())) slot = 1;
      const NodeRef target = path.nodes[slot];
      doc.sentences[target.sentence].tokens[target.token - 1].surface = spec.trigger;
      doc.gold_relations.push_back({"T1", "T2", spec.relation_label});
    }
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace idepnn
