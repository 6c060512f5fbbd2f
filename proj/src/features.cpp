#include "idepnn/features.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "idepnn/errors.hpp"
#include "idepnn/rng.hpp"

namespace idepnn {

Vocab::Vocab() {
  for (const char* s : {"<oov>", "<e1>", "</e1>", "<e2>", "</e2>"}) {
    add(s);
  }
}

int Vocab::add(const std::string& token, long freq) {
  auto it = ids_.find(token);
  if (it != ids_.end()) {
    freq_[it->second] += freq;
    return it->second;
  }
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  freq_.push_back(freq);
  ids_.emplace(token, id);
  return id;
}

int Vocab::lookup(const std::string& surface) const {
  auto it = ids_.find(normalize(surface));
  return it == ids_.end() ? kOov : it->second;
}

bool Vocab::contains_normalized(const std::string& token) const {
  return ids_.count(token) != 0;
}

int Vocab::marker_id(TokenUnit::Kind kind) {
  switch (kind) {
    case TokenUnit::Kind::E1Open: return kE1Open;
    case TokenUnit::Kind::E1Close: return kE1Close;
    case TokenUnit::Kind::E2Open: return kE2Open;
    case TokenUnit::Kind::E2Close: return kE2Close;
    default: throw InternalError("marker_id called on a word unit");
  }
}

std::string Vocab::normalize(const std::string& surface) {
  std::string out = surface;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void Vocab::dump(std::ostream& out) const {
  for (int id = 0; id < size(); ++id) {
    out << tokens_[id] << '\t' << id << '\t' << freq_[id] << '\n';
  }
}

Vocab build_vocab(const Corpus& corpus, long min_freq) {
  if (min_freq < 1) throw DataError("build_vocab: min_freq must be >= 1");
  std::map<std::string, long> counts;
  for (const Document& doc : corpus.docs) {
    for (const Sentence& s : doc.sentences) {
      for (const Token& t : s.tokens) {
        ++counts[Vocab::normalize(t.surface)];
      }
    }
  }
  std::vector<std::pair<std::string, long>> entries(counts.begin(), counts.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocab vocab;
  for (const auto& [token, freq] : entries) {
    if (freq < min_freq) continue;
    if (vocab.contains_normalized(token)) continue;  // collides with a special
    vocab.add(token, freq);
  }
  return vocab;
}

TagVocab::TagVocab() {
  add("<null>");
  add("<unk>");
}

int TagVocab::add(const std::string& tag) {
  auto it = ids_.find(tag);
  if (it != ids_.end()) return it->second;
  const int id = static_cast<int>(tags_.size());
  tags_.push_back(tag);
  ids_.emplace(tag, id);
  return id;
}

int TagVocab::lookup(const std::string& tag) const {
  if (tag.empty()) return kNull;
  auto it = ids_.find(tag);
  return it == ids_.end() ? kUnk : it->second;
}

TagVocab collect_pos_tags(const Corpus& corpus) {
  std::map<std::string, int> seen;
  for (const Document& doc : corpus.docs) {
    for (const Sentence& s : doc.sentences) {
      for (const Token& t : s.tokens) seen[t.pos] = 1;
    }
  }
  TagVocab v;
  for (const auto& [tag, _] : seen) {
    if (!tag.empty()) v.add(tag);
  }
  return v;
}

TagVocab collect_entity_types(const Corpus& corpus, const RelationSchema& schema) {
  std::map<std::string, int> seen;
  for (const RelationSchema::Entry& e : schema.entries) {
    seen[e.role1] = 1;
    seen[e.role2] = 1;
  }
  for (const Document& doc : corpus.docs) {
    for (const EntityMention& m : doc.mentions) seen[m.etype] = 1;
  }
  TagVocab v;
  for (const auto& [tag, _] : seen) {
    if (!tag.empty()) v.add(tag);
  }
  return v;
}

LoadedEmbeddings load_embeddings(std::istream& in, int expected_dim, std::uint64_t seed) {
  if (expected_dim < 1) throw DataError("load_embeddings: expected_dim must be >= 1");
  LoadedEmbeddings out;
  std::vector<Eigen::VectorXd> loaded;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    const std::string norm = Vocab::normalize(token);
    if (out.vocab.contains_normalized(norm)) {
      throw DataError("embeddings line " + std::to_string(line_no) + ": duplicate token '" +
                      token + "'");
    }
    Eigen::VectorXd v(expected_dim);
    int got = 0;
    double value = 0.0;
    while (fields >> value) {
      if (got < expected_dim) v[got] = value;
      ++got;
    }
    if (got != expected_dim) {
      throw DataError("embeddings line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected_dim) + " values, found " + std::to_string(got));
    }
    out.vocab.add(norm);
    loaded.push_back(std::move(v));
  }

  Rng rng(seed);
  out.table.rows = Eigen::MatrixXd::Zero(out.vocab.size(), expected_dim);
  out.table.trainable = false;  // pretrained rows frozen by default
  out.table.row_trainable.assign(out.vocab.size(), 0);
  for (int r = 0; r < Vocab::kSpecialCount; ++r) {
    for (int c = 0; c < expected_dim; ++c) out.table.rows(r, c) = rng.gaussian(0.01);
    out.table.row_trainable[r] = 1;
  }
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    out.table.rows.row(static_cast<int>(i) + Vocab::kSpecialCount) = loaded[i].transpose();
  }
  return out;
}

EmbeddingTable random_table(int rows, int dim, double scale, std::uint64_t seed,
                            const std::vector<int>& zero_rows) {
  Rng rng(seed);
  EmbeddingTable table;
  table.rows = Eigen::MatrixXd::Zero(rows, dim);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < dim; ++c) table.rows(r, c) = rng.uniform(-scale, scale);
  }
  if (!zero_rows.empty()) {
    table.row_trainable.assign(rows, 1);
    for (int r : zero_rows) {
      table.rows.row(r).setZero();
      table.row_trainable[r] = 0;
    }
  }
  return table;
}

InputLayout input_layout(EncoderMode mode, int word_dim, int subtree_dim,
                         const LexicalFeatureConfig& config) {
  InputLayout layout;
  layout.word_offset = 0;
  layout.word_dim = word_dim;
  int at = word_dim;
  if (mode == EncoderMode::Adp) {
    layout.subtree_offset = at;
    layout.subtree_dim = subtree_dim;
    at += subtree_dim;
  }
  if (config.pos) {
    layout.pos_offset = at;
    at += config.pos_dim;
  }
  if (config.pi) {
    layout.pi_offset = at;
    at += config.pi_dim;
  }
  if (config.et) {
    layout.et_offset = at;
    at += config.et_dim;
  }
  layout.total = at;
  return layout;
}

UnitIds resolve_unit(const TokenUnit& unit, const Vocab& words, const TagVocab& pos_tags,
                     const TagVocab& etypes) {
  UnitIds ids;
  ids.pi = static_cast<int>(unit.zone);
  if (unit.marker()) {
    ids.word = Vocab::marker_id(unit.kind);
    ids.pos = TagVocab::kNull;
    ids.et = TagVocab::kNull;
  } else {
    ids.word = words.lookup(unit.surface);
    ids.pos = pos_tags.lookup(unit.pos);
    ids.et = etypes.lookup(unit.etype);
  }
  return ids;
}

Eigen::VectorXd assemble_input(const UnitIds& ids, EncoderMode mode, const InputLayout& layout,
                               const FeatureTables& tables, const LexicalFeatureConfig& config,
                               const Eigen::VectorXd* subtree) {
  if (mode == EncoderMode::Adp && subtree == nullptr) {
    throw InternalError("assemble_input: ADP mode requires a subtree vector");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(layout.total);
  v.segment(layout.word_offset, layout.word_dim) = tables.word->rows.row(ids.word).transpose();
  if (mode == EncoderMode::Adp) {
    if (subtree->size() != layout.subtree_dim) {
      throw InternalError("assemble_input: subtree vector has dimension " +
                          std::to_string(subtree->size()) + ", expected " +
                          std::to_string(layout.subtree_dim));
    }
    v.segment(layout.subtree_offset, layout.subtree_dim) = *subtree;
  }
  if (config.pos) {
    v.segment(layout.pos_offset, config.pos_dim) = tables.pos->rows.row(ids.pos).transpose();
  }
  if (config.pi) {
    v.segment(layout.pi_offset, config.pi_dim) = tables.pi->rows.row(ids.pi).transpose();
  }
  if (config.et) {
    v.segment(layout.et_offset, config.et_dim) = tables.et->rows.row(ids.et).transpose();
  }
  return v;
}

}  // namespace idepnn
