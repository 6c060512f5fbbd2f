#include "idepnn/recursive.hpp"

#include <cmath>

#include "idepnn/errors.hpp"
#include "idepnn/rng.hpp"

namespace idepnn {

int RelVocab::add(const std::string& label) {
  auto it = ids_.find(label);
  if (it != ids_.end()) return it->second;
  const int id = static_cast<int>(labels_.size());
  labels_.push_back(label);
  ids_.emplace(label, id);
  return id;
}

int RelVocab::lookup(const std::string& label) const {
  auto it = ids_.find(label);
  return it == ids_.end() ? unk_id() : it->second;
}

RecursiveParams init_recursive_params(int rel_count, int word_dim, int subtree_dim,
                                      std::uint64_t seed) {
  Rng rng(seed);
  RecursiveParams params;
  const int cols = word_dim + subtree_dim;
  const double scale = std::sqrt(6.0 / (subtree_dim + cols));
  params.rel_transform.resize(rel_count + 1);
  for (Eigen::MatrixXd& w : params.rel_transform) {
    w.resize(subtree_dim, cols);
    for (int r = 0; r < subtree_dim; ++r) {
      for (int c = 0; c < cols; ++c) w(r, c) = rng.uniform(-scale, scale);
    }
  }
  params.bias = Eigen::VectorXd::Zero(subtree_dim);
  params.c_leaf = Eigen::VectorXd::Zero(subtree_dim);
  return params;
}

SubtreeEncoding encode_subtree(const CompiledSubtree& tree, const Eigen::MatrixXd& word_table,
                               const RecursiveParams& params) {
  SubtreeEncoding enc;
  enc.source = &tree;
  if (tree.leaf()) {
    enc.c = params.c_leaf;
  } else {
    Eigen::VectorXd z = params.bias;
    enc.children.reserve(tree.children.size());
    for (const auto& [rel, child] : tree.children) {
      enc.children.push_back(encode_subtree(child, word_table, params));
      z += params.rel_transform[rel] * enc.children.back().p;
    }
    if (!z.allFinite()) throw InternalError("numeric overflow in subtree encoding");
    enc.c = z.array().tanh();
  }
  enc.p.resize(word_table.cols() + enc.c.size());
  enc.p << word_table.row(tree.word).transpose(), enc.c;
  return enc;
}

RecursiveGrads RecursiveGrads::zeros_like(const RecursiveParams& params) {
  RecursiveGrads g;
  g.rel_transform.reserve(params.rel_transform.size());
  for (const Eigen::MatrixXd& w : params.rel_transform) {
    g.rel_transform.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
  g.bias = Eigen::VectorXd::Zero(params.bias.size());
  g.c_leaf = Eigen::VectorXd::Zero(params.c_leaf.size());
  return g;
}

void RecursiveGrads::accumulate_word(int row, const Eigen::VectorXd& g) {
  auto [it, inserted] = word.try_emplace(row, g);
  if (!inserted) it->second += g;
}

void backprop_subtree(const SubtreeEncoding& encoding, const Eigen::VectorXd& upstream,
                      const Eigen::MatrixXd& word_table, const RecursiveParams& params,
                      RecursiveGrads& grads) {
  if (upstream.size() != encoding.c.size()) {
    throw InternalError("backprop_subtree: upstream gradient has dimension " +
                        std::to_string(upstream.size()) + ", expected " +
                        std::to_string(encoding.c.size()));
  }
  if (encoding.source->leaf()) {
    grads.c_leaf += upstream;
    return;
  }
  // c = tanh(z)  =>  dz = upstream .* (1 - c^2)
  const Eigen::VectorXd dz =
      (upstream.array() * (1.0 - encoding.c.array().square())).matrix();
  grads.bias += dz;
  const int word_dim = static_cast<int>(word_table.cols());
  for (std::size_t k = 0; k < encoding.children.size(); ++k) {
    const auto& [rel, child_tree] = encoding.source->children[k];
    const SubtreeEncoding& child = encoding.children[k];
    grads.rel_transform[rel] += dz * child.p.transpose();
    const Eigen::VectorXd dp = params.rel_transform[rel].transpose() * dz;
    grads.accumulate_word(child_tree.word, dp.head(word_dim));
    backprop_subtree(child, dp.tail(dp.size() - word_dim), word_table, params, grads);
  }
}

}  // namespace idepnn
