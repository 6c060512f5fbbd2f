#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "idepnn/errors.hpp"
#include "idepnn/fixtures.hpp"
#include "idepnn/graph.hpp"
#include "idepnn/rng.hpp"
#include "test_helpers.hpp"

using namespace idepnn;

namespace {

// Independent oracle: adjacency straight from head links + root chaining,
// then exhaustive DFS over all simple paths.
struct OracleGraph {
  std::map<NodeRef, std::vector<NodeRef>> adj;

  explicit OracleGraph(const Document& doc) {
    NodeRef prev_root{-1, -1};
    for (const Sentence& s : doc.sentences) {
      NodeRef root{s.doc_index, -1};
      for (const Token& t : s.tokens) {
        const NodeRef self{s.doc_index, t.index};
        adj[self];
        if (t.head == 0) {
          root.token = t.index;
        } else {
          const NodeRef head{s.doc_index, t.head};
          adj[self].push_back(head);
          adj[head].push_back(self);
        }
      }
      if (prev_root.sentence >= 0) {
        adj[prev_root].push_back(root);
        adj[root].push_back(prev_root);
      }
      prev_root = root;
    }
  }

  void dfs(const NodeRef& at, const NodeRef& goal, std::vector<NodeRef>& stack,
           std::vector<std::vector<NodeRef>>& found) const {
    if (at == goal) {
      found.push_back(stack);
      return;
    }
    for (const NodeRef& next : adj.at(at)) {
      if (std::find(stack.begin(), stack.end(), next) != stack.end()) continue;
      stack.push_back(next);
      dfs(next, goal, stack, found);
      stack.pop_back();
    }
  }

  std::vector<std::vector<NodeRef>> all_simple_paths(const NodeRef& a, const NodeRef& b) const {
    std::vector<std::vector<NodeRef>> found;
    std::vector<NodeRef> stack{a};
    dfs(a, b, stack, found);
    return found;
  }
};

}  // namespace

TEST_CASE("build_document_graph: NEXTS edges chain adjacent roots") {
  SUBCASE("single sentence has none") {
    Document doc;
    doc.id = "d";
    doc.sentences.push_back(test::make_sentence(0, {{"a", "N", 0, "root"}}));
    CHECK(build_document_graph(doc).nexts_edge_count() == 0);
  }

  SUBCASE("three sentences have exactly two") {
    Document doc;
    doc.id = "d";
    for (int s = 0; s < 3; ++s) {
      doc.sentences.push_back(
          test::make_sentence(s, {{"a", "N", 2, "nsubj"}, {"b", "V", 0, "root"}}));
    }
    const DocumentGraph g = build_document_graph(doc);
    CHECK(g.nexts_edge_count() == 2);
    // Each NEXTS edge joins the roots of consecutive sentences.
    for (int s = 0; s + 1 < 3; ++s) {
      const int root = g.node_id(NodeRef{s, 2});
      const int next_root = g.node_id(NodeRef{s + 1, 2});
      const auto& nbrs = g.neighbors(root);
      const bool linked = std::any_of(nbrs.begin(), nbrs.end(), [&](const auto& e) {
        return e.to == next_root && e.nexts && e.label == kNextsLabel;
      });
      CHECK(linked);
    }
  }

  SUBCASE("two-sentence newswire example joins the two verb roots") {
    const Document doc = test::make_cross_sentence_doc();
    const DocumentGraph g = build_document_graph(doc);
    CHECK(g.nexts_edge_count() == 1);
    const int named = g.node_id(NodeRef{0, 2});
    const auto& nbrs = g.neighbors(named);
    CHECK(std::any_of(nbrs.begin(), nbrs.end(),
                      [&](const auto& e) { return e.nexts && e.to == g.node_id(NodeRef{1, 2}); }));
  }

  SUBCASE("invalid sentence names the offender") {
    Document doc;
    doc.id = "d";
    doc.sentences.push_back(test::make_sentence(0, {{"a", "N", 0, "root"}}));
    doc.sentences.push_back(test::make_sentence(1, {{"a", "N", 1, "dep"}}));  // no root
    CHECK_THROWS_WITH_AS(static_cast<void>(build_document_graph(doc)),
                         doctest::Contains("sentence 1"), DataError);
  }
}

TEST_CASE("entity_head picks the token governed from outside the span") {
  // "paul allen group": group governs paul and allen, runs governs group.
  const Sentence s = test::make_sentence(0, {{"paul", "PROPN", 3, "compound"},
                                             {"allen", "PROPN", 3, "compound"},
                                             {"group", "PROPN", 4, "nsubj"},
                                             {"runs", "VERB", 0, "root"}});
  SUBCASE("single-token mention") {
    CHECK(entity_head({"m", 0, 2, 2, "X"}, s) == 2);
  }
  SUBCASE("multi-token mention with internal structure") {
    CHECK(entity_head({"m", 0, 1, 3, "X"}, s) == 3);
  }
  SUBCASE("two tokens governed from outside: rightmost wins") {
    const Sentence flat = test::make_sentence(0, {{"a", "X", 3, "dep"},
                                                  {"b", "X", 3, "dep"},
                                                  {"c", "X", 0, "root"}});
    CHECK(entity_head({"m", 0, 1, 2, "X"}, flat) == 2);
  }
  SUBCASE("empty span is an error") {
    CHECK_THROWS_AS(static_cast<void>(entity_head({"m", 0, 2, 1, "X"}, s)), DataError);
  }
}

TEST_CASE("shortest_path: basic shapes") {
  Document doc;
  doc.id = "d";
  // chain: a <- b <- c  (c is root, heads: a->b, b->c)
  doc.sentences.push_back(
      test::make_sentence(0, {{"a", "N", 2, "dep"}, {"b", "N", 3, "dep"}, {"c", "N", 0, "root"}}));
  const DocumentGraph g = build_document_graph(doc);

  SUBCASE("endpoint equals start: single node, no edges") {
    const ShortestPath p = shortest_path(g, NodeRef{0, 1}, NodeRef{0, 1});
    CHECK(p.nodes.size() == 1);
    CHECK(p.edge_labels.empty());
  }

  SUBCASE("chain a-b-c") {
    const ShortestPath p = shortest_path(g, NodeRef{0, 1}, NodeRef{0, 3});
    REQUIRE(p.nodes.size() == 3);
    CHECK(p.nodes[1] == NodeRef{0, 2});
    REQUIRE(p.edge_labels.size() == 2);
    CHECK(p.edge_labels[0] == "dep");
  }

  SUBCASE("absent endpoint") {
    CHECK_THROWS_AS(static_cast<void>(shortest_path(g, NodeRef{0, 1}, NodeRef{2, 1})), DataError);
  }
}

TEST_CASE("shortest_path crosses NEXTS through the roots on the newswire example") {
  const Document doc = test::make_cross_sentence_doc();
  const DocumentGraph g = build_document_graph(doc);
  const NodeRef raburn{0, entity_head(doc.mentions[0], doc.sentences[0])};
  const NodeRef group{1, entity_head(doc.mentions[1], doc.sentences[1])};
  const ShortestPath p = shortest_path(g, raburn, group);
  // raburn -> named -> based -> group, one NEXTS crossing through the roots.
  REQUIRE(p.nodes.size() == 4);
  CHECK(p.nodes[1] == NodeRef{0, 2});
  CHECK(p.nodes[2] == NodeRef{1, 2});
  CHECK(p.nexts_crossings() == 1);
  CHECK(std::count(p.edge_labels.begin(), p.edge_labels.end(), kNextsLabel) == 1);
}

TEST_CASE("path oracle: BFS equals exhaustive enumeration on random documents") {
  Rng rng(424242);
  for (int trial = 0; trial < 200; ++trial) {
    FixtureSpec spec;
    spec.num_docs = 1;
    spec.min_sentences = 1;
    spec.max_sentences = 4;
    spec.min_tokens = 3;
    spec.max_tokens = 12;
    spec.seed = rng.next();
    const Corpus corpus = generate_corpus(spec);
    const Document& doc = corpus.docs[0];
    const DocumentGraph g = build_document_graph(doc);
    const OracleGraph oracle(doc);

    // Random node pair plus the planted mention pair when present.
    std::vector<std::pair<NodeRef, NodeRef>> pairs;
    const int ns = static_cast<int>(doc.sentences.size());
    const NodeRef a{static_cast<int>(rng.below(ns)), 0};
    const NodeRef b{static_cast<int>(rng.below(ns)), 0};
    pairs.emplace_back(NodeRef{a.sentence,
                               static_cast<int>(rng.range(1, doc.sentences[a.sentence].size()))},
                       NodeRef{b.sentence,
                               static_cast<int>(rng.range(1, doc.sentences[b.sentence].size()))});
    if (doc.mentions.size() == 2) {
      pairs.emplace_back(NodeRef{doc.mentions[0].sentence, doc.mentions[0].first},
                         NodeRef{doc.mentions[1].sentence, doc.mentions[1].first});
    }

    for (const auto& [from, to] : pairs) {
      const auto all = oracle.all_simple_paths(from, to);
      REQUIRE(all.size() == 1);  // tree guarantees uniqueness
      const ShortestPath p = shortest_path(g, from, to);
      REQUIRE(p.nodes.size() == all[0].size());
      for (std::size_t i = 0; i < p.nodes.size(); ++i) CHECK(p.nodes[i] == all[0][i]);

      // NEXTS crossings equal the sentence distance.
      CHECK(p.nexts_crossings() == std::abs(from.sentence - to.sentence));

      // Path symmetry.
      const ShortestPath back = shortest_path(g, to, from);
      REQUIRE(back.nodes.size() == p.nodes.size());
      for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        CHECK(back.nodes[i] == p.nodes[p.nodes.size() - 1 - i]);
      }
    }
  }
}

TEST_CASE("same-sentence paths never cross NEXTS and match the single-sentence graph") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Sentence s = random_tree(static_cast<int>(rng.range(2, 10)), rng.next());
    Document multi;
    multi.id = "m";
    multi.sentences.push_back(s);
    Sentence extra = random_tree(5, rng.next());
    extra.doc_index = 1;
    multi.sentences.push_back(extra);

    Document single;
    single.id = "s";
    single.sentences.push_back(s);

    const int n = s.size();
    const NodeRef from{0, static_cast<int>(rng.range(1, n))};
    const NodeRef to{0, static_cast<int>(rng.range(1, n))};
    const ShortestPath in_multi = shortest_path(build_document_graph(multi), from, to);
    const ShortestPath in_single = shortest_path(build_document_graph(single), from, to);
    CHECK(in_multi.nexts_crossings() == 0);
    REQUIRE(in_multi.nodes.size() == in_single.nodes.size());
    for (std::size_t i = 0; i < in_multi.nodes.size(); ++i) {
      CHECK(in_multi.nodes[i] == in_single.nodes[i]);
    }
  }
}

TEST_CASE("extract_subtree: leaves, off-path children, depth caps") {
  // runs(root) -> group -> {paul, allen}; runs -> fast
  Document doc;
  doc.id = "d";
  doc.sentences.push_back(test::make_sentence(0, {{"paul", "PROPN", 3, "compound"},
                                                  {"allen", "PROPN", 3, "compound"},
                                                  {"group", "PROPN", 4, "nsubj"},
                                                  {"runs", "VERB", 0, "root"},
                                                  {"fast", "ADV", 4, "advmod"}}));
  const DocumentGraph g = build_document_graph(doc);

  SUBCASE("leaf word") {
    const Subtree sub = extract_subtree(g, NodeRef{0, 1}, {}, -1);
    CHECK(sub.leaf());
    CHECK(sub.node_count() == 1);
  }

  SUBCASE("full subtree with child ordering by token index") {
    const Subtree sub = extract_subtree(g, NodeRef{0, 3}, {}, -1);
    REQUIRE(sub.children.size() == 2);
    CHECK(sub.children[0].second.root == NodeRef{0, 1});
    CHECK(sub.children[1].second.root == NodeRef{0, 2});
    CHECK(sub.children[0].first == "compound");
  }

  SUBCASE("excluded nodes are never entered") {
    const std::set<NodeRef> excluded{NodeRef{0, 3}};
    const Subtree sub = extract_subtree(g, NodeRef{0, 4}, excluded, -1);
    REQUIRE(sub.children.size() == 1);  // only "fast" remains
    CHECK(sub.children[0].second.root == NodeRef{0, 5});
  }

  SUBCASE("depth cap") {
    const Subtree depth1 = extract_subtree(g, NodeRef{0, 4}, {}, 1);
    REQUIRE(depth1.children.size() == 2);
    for (const auto& [rel, child] : depth1.children) CHECK(child.leaf());
    const Subtree depth0 = extract_subtree(g, NodeRef{0, 4}, {}, 0);
    CHECK(depth0.leaf());
  }

  SUBCASE("subtrees never cross NEXTS") {
    Document two = doc;
    two.sentences.push_back(test::make_sentence(1, {{"x", "N", 0, "root"}}));
    const DocumentGraph g2 = build_document_graph(two);
    const Subtree sub = extract_subtree(g2, NodeRef{0, 4}, {}, -1);
    CHECK(sub.node_count() == 5);  // never reaches s1
  }
}

TEST_CASE("build_adp: off-path subtrees are disjoint from the path") {
  const Document doc = test::make_cross_sentence_doc();
  const DocumentGraph g = build_document_graph(doc);
  const ShortestPath path = shortest_path(g, NodeRef{0, 3}, NodeRef{1, 1});
  const AugmentedPath adp = build_adp(g, path, -1);
  REQUIRE(adp.subtrees.size() == path.nodes.size());

  const std::set<NodeRef> on_path(path.nodes.begin(), path.nodes.end());
  for (const Subtree& sub : adp.subtrees) {
    // Strict descendants must avoid the path.
    std::vector<const Subtree*> stack;
    for (const auto& [rel, child] : sub.children) stack.push_back(&child);
    while (!stack.empty()) {
      const Subtree* s = stack.back();
      stack.pop_back();
      CHECK(on_path.count(s->root) == 0);
      for (const auto& [rel, child] : s->children) stack.push_back(&child);
    }
  }

  SUBCASE("path with no off-path dependents yields leaf subtrees") {
    Document chain;
    chain.id = "c";
    chain.sentences.push_back(
        test::make_sentence(0, {{"a", "N", 2, "dep"}, {"b", "N", 0, "root"}}));
    const DocumentGraph cg = build_document_graph(chain);
    const AugmentedPath leafy =
        build_adp(cg, shortest_path(cg, NodeRef{0, 1}, NodeRef{0, 2}), -1);
    for (const Subtree& sub : leafy.subtrees) CHECK(sub.leaf());
  }
}

TEST_CASE("path_token_sequence wraps markers around endpoints") {
  const Document doc = test::make_cross_sentence_doc();
  const DocumentGraph g = build_document_graph(doc);
  const EntityMention& e1 = doc.mentions[0];
  const EntityMention& e2 = doc.mentions[1];
  const ShortestPath path = shortest_path(
      g, NodeRef{0, entity_head(e1, doc.sentences[0])}, NodeRef{1, entity_head(e2, doc.sentences[1])});

  const auto units = path_token_sequence(doc, path, e1, e2);
  // 4 path nodes + 4 markers.
  REQUIRE(units.size() == 8);
  CHECK(units[0].kind == TokenUnit::Kind::E1Open);
  CHECK(units[1].surface == "raburn");
  CHECK(units[2].kind == TokenUnit::Kind::E1Close);
  CHECK(units[3].surface == "named");
  CHECK(units[4].surface == "based");
  CHECK(units[5].kind == TokenUnit::Kind::E2Open);
  CHECK(units[6].surface == "group");
  CHECK(units[7].kind == TokenUnit::Kind::E2Close);

  // Markers carry no POS or entity type; words keep their zone assignment.
  CHECK(units[0].pos.empty());
  CHECK(units[0].etype.empty());
  CHECK(units[1].zone == PiZone::E1);
  CHECK(units[1].etype == "Per");
  CHECK(units[3].zone == PiZone::Between);
  CHECK(units[6].zone == PiZone::E2);

  SUBCASE("two-node path has six units") {
    Document chain;
    chain.id = "c";
    chain.sentences.push_back(
        test::make_sentence(0, {{"a", "N", 2, "dep"}, {"b", "N", 0, "root"}}));
    chain.mentions.push_back({"x", 0, 1, 1, "A"});
    chain.mentions.push_back({"y", 0, 2, 2, "B"});
    const DocumentGraph cg = build_document_graph(chain);
    const auto six = path_token_sequence(chain, shortest_path(cg, NodeRef{0, 1}, NodeRef{0, 2}),
                                         chain.mentions[0], chain.mentions[1]);
    REQUIRE(six.size() == 6);
    CHECK(six[0].kind == TokenUnit::Kind::E1Open);
    CHECK(six[2].kind == TokenUnit::Kind::E1Close);
    CHECK(six[3].kind == TokenUnit::Kind::E2Open);
    CHECK(six[5].kind == TokenUnit::Kind::E2Close);
  }
}

TEST_CASE("linear_token_sequence spans sentences in document order") {
  const Document doc = test::make_cross_sentence_doc();
  const auto units = linear_token_sequence(doc, doc.mentions[0], doc.mentions[1]);
  // raburn(s0:3) .. group(s1:1): raburn, president, group + 4 markers.
  REQUIRE(units.size() == 7);
  CHECK(units[0].kind == TokenUnit::Kind::E1Open);
  CHECK(units[1].surface == "raburn");
  CHECK(units[2].kind == TokenUnit::Kind::E1Close);
  CHECK(units[3].surface == "president");
  CHECK(units[4].kind == TokenUnit::Kind::E2Open);
  CHECK(units[5].surface == "group");
  CHECK(units[6].kind == TokenUnit::Kind::E2Close);
}

TEST_CASE("write_dot emits node names and dashed NEXTS") {
  const Document doc = test::make_cross_sentence_doc();
  const DocumentGraph g = build_document_graph(doc);
  std::ostringstream out;
  write_dot(out, g, nullptr);
  const std::string dot = out.str();
  CHECK(dot.find("\"s0:3/raburn\"") != std::string::npos);
  CHECK(dot.find("style=dashed") != std::string::npos);
  CHECK(dot.find("NEXTS") != std::string::npos);
}
