#ifndef IDEPNN_RECURSIVE_HPP
#define IDEPNN_RECURSIVE_HPP

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

namespace idepnn {

// Dependency relation inventory for the per-relation transforms. The label
// set is frozen from training data; unseen labels fall back to a shared
// extra matrix at index size().
class RelVocab {
 public:
  int size() const { return static_cast<int>(labels_.size()); }
  int unk_id() const { return size(); }
  int add(const std::string& label);
  int lookup(const std::string& label) const;  // unk_id() when unseen
  const std::string& label(int id) const { return labels_[id]; }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, int> ids_;
};

// Subtree with vocabulary lookups already applied: word rows into the word
// embedding table and relation ids into RelVocab (children in token order).
struct CompiledSubtree {
  int word = 0;
  std::vector<std::pair<int, CompiledSubtree>> children;  // (relation id, child)

  bool leaf() const { return children.empty(); }
};

// One transform per dependency relation plus the shared fallback, a bias and
// the learned leaf vector. Each transform maps the child representation
// p = [x, c] (word_dim + subtree_dim) to subtree_dim.
struct RecursiveParams {
  std::vector<Eigen::MatrixXd> rel_transform;  // RelVocab::size() + 1 entries
  Eigen::VectorXd bias;                        // subtree_dim
  Eigen::VectorXd c_leaf;                      // subtree_dim

  int subtree_dim() const { return static_cast<int>(c_leaf.size()); }
  int child_dim() const {
    return rel_transform.empty() ? 0 : static_cast<int>(rel_transform.front().cols());
  }
  int word_dim() const { return child_dim() - subtree_dim(); }
};

// Fan-based uniform init for every relation transform, zero bias and zero
// leaf vector.
RecursiveParams init_recursive_params(int rel_count, int word_dim, int subtree_dim,
                                      std::uint64_t seed);

// Forward cache for one subtree: c is the subtree embedding, p = [x, c].
struct SubtreeEncoding {
  const CompiledSubtree* source = nullptr;
  Eigen::VectorXd c;
  Eigen::VectorXd p;
  std::vector<SubtreeEncoding> children;
};

// Bottom-up encoding: leaves take c_leaf, interior nodes apply
// c = tanh(sum_q W_rel(q) * p_q + b) over children in stored order.
// Throws InternalError on non-finite intermediates.
SubtreeEncoding encode_subtree(const CompiledSubtree& tree, const Eigen::MatrixXd& word_table,
                               const RecursiveParams& params);

struct RecursiveGrads {
  std::vector<Eigen::MatrixXd> rel_transform;
  Eigen::VectorXd bias;
  Eigen::VectorXd c_leaf;
  // Word-vector gradients keyed by embedding row (ordered for determinism).
  std::map<int, Eigen::VectorXd> word;

  static RecursiveGrads zeros_like(const RecursiveParams& params);
  void accumulate_word(int row, const Eigen::VectorXd& g);
};

// Exact gradients through the tree given dL/dc of the root. Gradients for the
// root's own word vector are NOT produced here: the root's x enters the model
// through p at the consumer, which owns that gradient.
void backprop_subtree(const SubtreeEncoding& encoding, const Eigen::VectorXd& upstream,
                      const Eigen::MatrixXd& word_table, const RecursiveParams& params,
                      RecursiveGrads& grads);

}  // namespace idepnn

#endif
