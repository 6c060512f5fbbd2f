#include <doctest.h>

#include <cmath>

#include "idepnn/errors.hpp"
#include "idepnn/recursive.hpp"
#include "idepnn/rng.hpp"
#include "idepnn/trainer.hpp"

using namespace idepnn;

namespace {

RecursiveParams zero_params(int rels, int word_dim, int sub_dim) {
  RecursiveParams p;
  p.rel_transform.assign(rels + 1, Eigen::MatrixXd::Zero(sub_dim, word_dim + sub_dim));
  p.bias = Eigen::VectorXd::Zero(sub_dim);
  p.c_leaf = Eigen::VectorXd::Zero(sub_dim);
  return p;
}

}  // namespace

TEST_CASE("encode_subtree: leaf returns c_leaf bit-exactly") {
  RecursiveParams params = zero_params(2, 3, 2);
  params.c_leaf << 0.125, -0.5;  // exactly representable
  Eigen::MatrixXd words = Eigen::MatrixXd::Ones(4, 3);
  CompiledSubtree leaf;
  leaf.word = 1;
  const SubtreeEncoding enc = encode_subtree(leaf, words, params);
  CHECK(enc.c[0] == 0.125);
  CHECK(enc.c[1] == -0.5);
  // p = [x, c]
  REQUIRE(enc.p.size() == 5);
  CHECK(enc.p[0] == 1.0);
  CHECK(enc.p[3] == 0.125);
}

TEST_CASE("encode_subtree: all-zero parameters give zero embeddings") {
  const RecursiveParams params = zero_params(1, 2, 3);
  Eigen::MatrixXd words = Eigen::MatrixXd::Random(5, 2);
  CompiledSubtree tree;
  tree.word = 0;
  CompiledSubtree child;
  child.word = 1;
  child.children.emplace_back(0, CompiledSubtree{2, {}});
  tree.children.emplace_back(0, child);
  tree.children.emplace_back(1, CompiledSubtree{3, {}});
  const SubtreeEncoding enc = encode_subtree(tree, words, params);
  CHECK(enc.c.norm() == 0.0);  // tanh(0) = 0
}

TEST_CASE("encode_subtree: scalar oracle case") {
  // One child: x_q = 0.5, c_q = c_leaf = 0.1, W = [1 1], b = 0
  // => c_w = tanh(0.6)
  RecursiveParams params = zero_params(0, 1, 1);
  params.rel_transform[0] << 1.0, 1.0;
  params.c_leaf << 0.1;
  Eigen::MatrixXd words(2, 1);
  words << 0.0, 0.5;
  CompiledSubtree tree;
  tree.word = 0;
  tree.children.emplace_back(0, CompiledSubtree{1, {}});
  const SubtreeEncoding enc = encode_subtree(tree, words, params);
  CHECK(enc.c[0] == doctest::Approx(std::tanh(0.6)).epsilon(1e-12));
  CHECK(enc.c[0] == doctest::Approx(0.53705).epsilon(1e-4));
}

TEST_CASE("encode_subtree: outputs stay inside (-1, 1) and p has dimension d + d'") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(4));
    const int dsub = 1 + static_cast<int>(rng.below(4));
    RecursiveParams params = init_recursive_params(3, d, dsub, rng.next());
    // Push weights away from zero without saturating tanh to 1.0 in doubles.
    for (auto& w : params.rel_transform) w.array() += 0.5;
    params.c_leaf.setConstant(0.9);
    Eigen::MatrixXd words = Eigen::MatrixXd::Random(6, d);
    CompiledSubtree tree;
    tree.word = 0;
    for (int c = 0; c < 3; ++c) {
      tree.children.emplace_back(static_cast<int>(rng.below(4)),
                                 CompiledSubtree{1 + c, {}});
    }
    const SubtreeEncoding enc = encode_subtree(tree, words, params);
    CHECK(enc.p.size() == d + dsub);
    for (int i = 0; i < enc.c.size(); ++i) {
      CHECK(enc.c[i] > -1.0);
      CHECK(enc.c[i] < 1.0);
    }
  }
}

TEST_CASE("encode_subtree: unseen relation uses the fallback transform") {
  RecursiveParams params = zero_params(1, 1, 1);
  params.rel_transform[1] << 2.0, 2.0;  // fallback slot
  Eigen::MatrixXd words(2, 1);
  words << 0.0, 0.25;
  RelVocab rels;
  rels.add("nsubj");
  CompiledSubtree tree;
  tree.word = 0;
  tree.children.emplace_back(rels.lookup("never-seen"), CompiledSubtree{1, {}});
  CHECK(rels.lookup("never-seen") == rels.unk_id());
  const SubtreeEncoding enc = encode_subtree(tree, words, params);
  CHECK(enc.c[0] == doctest::Approx(std::tanh(2.0 * 0.25 + 2.0 * 0.0)));
}

TEST_CASE("backprop_subtree: zero upstream and leaf-only gradient routing") {
  Rng rng(6);
  RecursiveParams params = init_recursive_params(2, 2, 2, 3);
  Eigen::MatrixXd words = Eigen::MatrixXd::Random(4, 2);

  SUBCASE("zero upstream yields zero gradients") {
    CompiledSubtree tree;
    tree.word = 0;
    tree.children.emplace_back(0, CompiledSubtree{1, {}});
    const SubtreeEncoding enc = encode_subtree(tree, words, params);
    RecursiveGrads grads = RecursiveGrads::zeros_like(params);
    backprop_subtree(enc, Eigen::VectorXd::Zero(2), words, params, grads);
    CHECK(grads.bias.norm() == 0.0);
    CHECK(grads.c_leaf.norm() == 0.0);
    for (const auto& w : grads.rel_transform) CHECK(w.norm() == 0.0);
  }

  SUBCASE("leaf-only encoding routes everything to c_leaf") {
    CompiledSubtree leaf;
    leaf.word = 2;
    const SubtreeEncoding enc = encode_subtree(leaf, words, params);
    RecursiveGrads grads = RecursiveGrads::zeros_like(params);
    Eigen::VectorXd up(2);
    up << 0.3, -0.7;
    backprop_subtree(enc, up, words, params, grads);
    CHECK(grads.c_leaf == up);
    CHECK(grads.bias.norm() == 0.0);
    CHECK(grads.word.empty());
  }

  SUBCASE("shape mismatch is an error") {
    CompiledSubtree leaf;
    leaf.word = 0;
    const SubtreeEncoding enc = encode_subtree(leaf, words, params);
    RecursiveGrads grads = RecursiveGrads::zeros_like(params);
    CHECK_THROWS_AS(backprop_subtree(enc, Eigen::VectorXd::Zero(5), words, params, grads),
                    InternalError);
  }
}

TEST_CASE("encode_subtree: summation follows stored child order deterministically") {
  RecursiveParams params = init_recursive_params(2, 2, 2, 9);
  Eigen::MatrixXd words = Eigen::MatrixXd::Random(5, 2);
  CompiledSubtree tree;
  tree.word = 0;
  for (int c = 1; c <= 3; ++c) tree.children.emplace_back(c % 3, CompiledSubtree{c, {}});
  const SubtreeEncoding a = encode_subtree(tree, words, params);
  const SubtreeEncoding b = encode_subtree(tree, words, params);
  CHECK(a.c == b.c);  // bitwise repeatability
}

TEST_CASE("recursive gradient suite agrees with finite differences") {
  // 50 random trees (depth <= 4, fan-out <= 3, dims <= 5).
  const double worst = grad_check(GradCheckSuite::Recursive, 50, 1e-4, 46);
  CHECK(worst < 1e-4);
}
