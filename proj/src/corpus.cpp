#include "idepnn/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "idepnn/errors.hpp"
#include "idepnn/rng.hpp"

namespace idepnn {

int Sentence::root_index() const {
  for (const Token& t : tokens) {
    if (t.head == 0) return t.index;
  }
  return 0;
}

void validate_sentence(const Sentence& s, const std::string& where) {
  const int n = s.size();
  if (n == 0) throw DataError(where + ": empty sentence");
  int roots = 0;
  for (const Token& t : s.tokens) {
    if (t.head < 0 || t.head > n) {
      throw DataError(where + ": token " + std::to_string(t.index) +
                      " head " + std::to_string(t.head) + " out of range [0, " +
                      std::to_string(n) + "]");
    }
    if (t.head == t.index) {
      throw DataError(where + ": token " + std::to_string(t.index) + " self-loop head");
    }
    if (t.deprel.empty()) {
      throw DataError(where + ": token " + std::to_string(t.index) + " empty deprel");
    }
    if (t.head == 0) ++roots;
  }
  if (roots != 1) {
    throw DataError(where + ": expected exactly one root, found " + std::to_string(roots));
  }
  // Reachability from the root; anything unreached sits on a head cycle.
  std::vector<std::vector<int>> children(n + 1);
  int root = 0;
  for (const Token& t : s.tokens) {
    if (t.head == 0) {
      root = t.index;
    } else {
      children[t.head].push_back(t.index);
    }
  }
  std::vector<bool> seen(n + 1, false);
  std::vector<int> stack{root};
  seen[root] = true;
  int reached = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++reached;
    for (int c : children[v]) {
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  if (reached != n) throw DataError(where + ": cyclic heads (tree not fully reachable)");
}

const EntityMention* Document::find_mention(const std::string& mention_id) const {
  for (const EntityMention& m : mentions) {
    if (m.id == mention_id) return &m;
  }
  return nullptr;
}

void validate_document(const Document& doc) {
  const std::string where = "doc " + doc.id;
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    if (doc.sentences[i].doc_index != static_cast<int>(i)) {
      throw DataError(where + ": sentence " + std::to_string(i) + " carries doc_index " +
                      std::to_string(doc.sentences[i].doc_index));
    }
    validate_sentence(doc.sentences[i], where + " sentence " + std::to_string(i));
  }
  std::unordered_set<std::string> ids;
  for (const EntityMention& m : doc.mentions) {
    if (!ids.insert(m.id).second) {
      throw DataError(where + ": duplicate mention id " + m.id);
    }
    if (m.sentence < 0 || m.sentence >= static_cast<int>(doc.sentences.size())) {
      throw DataError(where + ": mention " + m.id + " sentence index " +
                      std::to_string(m.sentence) + " out of range");
    }
    const int n = doc.sentences[m.sentence].size();
    if (m.first < 1 || m.last > n || m.first > m.last) {
      throw DataError(where + ": mention " + m.id + " span [" + std::to_string(m.first) +
                      ", " + std::to_string(m.last) + "] invalid for sentence of length " +
                      std::to_string(n));
    }
  }
  for (const RelationInstance& r : doc.gold_relations) {
    if (r.e1 == r.e2) {
      throw DataError(where + ": relation " + r.label + " links " + r.e1 + " to itself");
    }
    if (!ids.count(r.e1)) throw DataError(where + ": relation argument " + r.e1 + " unresolved");
    if (!ids.count(r.e2)) throw DataError(where + ": relation argument " + r.e2 + " unresolved");
  }
}

const Document* Corpus::find(const std::string& doc_id) const {
  for (const Document& d : docs) {
    if (d.id == doc_id) return &d;
  }
  return nullptr;
}

void RelationSchema::validate() const {
  std::unordered_set<std::string> seen;
  for (const Entry& e : entries) {
    if (e.label == kNoneLabel) throw DataError("schema: " + kNoneLabel + " is not a schema label");
    if (e.label.empty()) throw DataError("schema: empty label");
    if (!seen.insert(e.label).second) throw DataError("schema: duplicate label " + e.label);
  }
}

bool RelationSchema::admits(const std::string& type1, const std::string& type2) const {
  for (const Entry& e : entries) {
    if (e.role1 == type1 && e.role2 == type2) return true;
  }
  return false;
}

std::vector<std::string> RelationSchema::labels() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const Entry& e : entries) out.push_back(e.label);
  return out;
}

std::vector<CandidatePair> generate_candidates(const Document& doc, int k_max,
                                               const RelationSchema& schema) {
  if (k_max < 0) throw DataError("generate_candidates: k_max must be >= 0");
  std::vector<const EntityMention*> order;
  order.reserve(doc.mentions.size());
  for (const EntityMention& m : doc.mentions) order.push_back(&m);
  std::sort(order.begin(), order.end(), [](const EntityMention* a, const EntityMention* b) {
    if (a->sentence != b->sentence) return a->sentence < b->sentence;
    if (a->first != b->first) return a->first < b->first;
    return a->id < b->id;
  });

  std::unordered_map<std::string, std::string> gold;  // "e1\x1fe2" -> label
  for (const RelationInstance& r : doc.gold_relations) {
    gold.emplace(r.e1 + '\x1f' + r.e2, r.label);
  }

  std::vector<CandidatePair> out;
  for (const EntityMention* a : order) {
    for (const EntityMention* b : order) {
      if (a == b || a->id == b->id) continue;
      const int dist = std::abs(a->sentence - b->sentence);
      if (dist > k_max) continue;
      if (!schema.admits(a->etype, b->etype)) continue;
      CandidatePair c;
      c.doc_id = doc.id;
      c.e1 = a->id;
      c.e2 = b->id;
      c.sentence_distance = dist;
      auto it = gold.find(a->id + '\x1f' + b->id);
      c.label = it == gold.end() ? kNoneLabel : it->second;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<CandidatePair> sample_negatives(const std::vector<CandidatePair>& candidates,
                                            std::uint64_t seed) {
  std::size_t positives = 0;
  std::vector<std::size_t> negative_at;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].positive()) {
      ++positives;
    } else {
      negative_at.push_back(i);
    }
  }
  std::vector<bool> keep(candidates.size(), true);
  if (negative_at.size() > positives) {
    Rng rng(seed);
    // Partial Fisher-Yates: the first `positives` slots become the sample.
    for (std::size_t i = 0; i < positives; ++i) {
      const std::size_t j = i + rng.below(negative_at.size() - i);
      std::swap(negative_at[i], negative_at[j]);
    }
    for (std::size_t i = positives; i < negative_at.size(); ++i) {
      keep[negative_at[i]] = false;
    }
  }
  std::vector<CandidatePair> out;
  out.reserve(positives * 2);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (keep[i]) out.push_back(candidates[i]);
  }
  return out;
}

std::array<Corpus, 3> split_corpus(const Corpus& corpus, const SplitRatios& ratios,
                                   std::uint64_t seed) {
  const double r[3] = {ratios.train, ratios.dev, ratios.test};
  double sum = 0.0;
  int nonzero = 0;
  for (double v : r) {
    if (v < 0.0) throw DataError("split_corpus: negative ratio");
    if (v > 0.0) ++nonzero;
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DataError("split_corpus: ratios must sum to 1");
  const std::size_t n = corpus.docs.size();
  if (n < static_cast<std::size_t>(nonzero)) {
    throw DataError("split_corpus: fewer documents (" + std::to_string(n) +
                    ") than nonzero splits (" + std::to_string(nonzero) + ")");
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(idx);

  // Cumulative rounding keeps every split within one document of its ratio.
  const std::size_t cut1 = static_cast<std::size_t>(std::llround(n * r[0]));
  const std::size_t cut2 = static_cast<std::size_t>(std::llround(n * (r[0] + r[1])));
  std::array<Corpus, 3> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int slot = i < cut1 ? 0 : (i < cut2 ? 1 : 2);
    out[slot].docs.push_back(corpus.docs[idx[i]]);
  }
  return out;
}

}  // namespace idepnn
