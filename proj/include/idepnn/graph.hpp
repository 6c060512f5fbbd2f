#ifndef IDEPNN_GRAPH_HPP
#define IDEPNN_GRAPH_HPP

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "idepnn/corpus.hpp"

namespace idepnn {

inline const std::string kNextsLabel = "NEXTS";

struct NodeRef {
  int sentence = 0;  // doc_index
  int token = 0;     // 1-based token index

  friend bool operator==(const NodeRef& a, const NodeRef& b) {
    return a.sentence == b.sentence && a.token == b.token;
  }
  friend bool operator<(const NodeRef& a, const NodeRef& b) {
    return a.sentence != b.sentence ? a.sentence < b.sentence : a.token < b.token;
  }
};

// Whole-document dependency graph: every token is a node, dependency edges
// carry the dependent's relation label, and the roots of adjacent sentences
// are chained by NEXTS edges. The result is a single tree over the document.
class DocumentGraph {
 public:
  struct Edge {
    int to = 0;
    std::string label;
    bool nexts = false;
  };

  const Document& doc() const { return *doc_; }
  int node_count() const { return static_cast<int>(adj_.size()); }
  int nexts_edge_count() const { return nexts_edges_; }

  int node_id(const NodeRef& ref) const;
  NodeRef node_ref(int id) const;
  const Token& token(const NodeRef& ref) const;
  const Token& token(int id) const { return token(node_ref(id)); }

  const std::vector<Edge>& neighbors(int id) const { return adj_[id]; }
  // Dependency dependents of a node (never NEXTS), ordered by token index.
  const std::vector<int>& dependents(int id) const { return children_[id]; }

  friend DocumentGraph build_document_graph(const Document& doc);

 private:
  const Document* doc_ = nullptr;
  std::vector<int> sentence_offset_;
  std::vector<std::vector<Edge>> adj_;
  std::vector<std::vector<int>> children_;
  int nexts_edges_ = 0;
};

// Throws DataError naming the sentence when a sentence is not a valid tree;
// throws InternalError if the assembled graph fails the tree invariant.
DocumentGraph build_document_graph(const Document& doc);

// Head token of a mention: the unique span token governed from outside the
// span; the rightmost such token when annotation noise yields several; the
// rightmost span token when there is none.
int entity_head(const EntityMention& mention, const Sentence& sentence);

struct ShortestPath {
  std::vector<NodeRef> nodes;               // e1 head first, e2 head last
  std::vector<std::string> edge_labels;     // size = nodes.size() - 1

  int nexts_crossings() const;
};

// Unique simple path between two nodes of the document tree, by BFS over
// undirected edges. Throws DataError when an endpoint is missing and
// InternalError when the graph is not connected.
ShortestPath shortest_path(const DocumentGraph& graph, const NodeRef& a, const NodeRef& b);

struct Subtree {
  NodeRef root;
  std::vector<std::pair<std::string, Subtree>> children;  // (deprel, child)

  bool leaf() const { return children.empty(); }
  int node_count() const;
};

// Dependency subtree under `word`: dependents collected recursively, never
// crossing NEXTS edges or entering `excluded` nodes. Children keep token
// order. max_depth < 0 means unlimited; 0 returns a bare leaf.
Subtree extract_subtree(const DocumentGraph& graph, const NodeRef& word,
                        const std::set<NodeRef>& excluded, int max_depth);

struct AugmentedPath {
  ShortestPath path;
  std::vector<Subtree> subtrees;  // one per path node
};

// Attaches every path word's off-path subtree; path nodes are excluded from
// each other's subtrees.
AugmentedPath build_adp(const DocumentGraph& graph, const ShortestPath& path, int max_depth);

// Zones for the position-indicator feature.
enum class PiZone { BeforeE1 = 0, E1 = 1, Between = 2, E2 = 3, AfterE2 = 4 };
constexpr int kPiZoneCount = 5;

// One element of an encoder input sequence: either a surface token or one of
// the four entity-boundary markers. Markers carry no POS or entity type and
// always stand for a leaf subtree.
struct TokenUnit {
  enum class Kind { Word, E1Open, E1Close, E2Open, E2Close };

  Kind kind = Kind::Word;
  NodeRef node;            // valid for Kind::Word only
  std::string surface;     // marker text for marker units
  std::string pos;         // empty for markers
  std::string etype;       // empty when not inside a mention span
  PiZone zone = PiZone::Between;

  bool marker() const { return kind != Kind::Word; }
};

// Path surface sequence with <e1>...</e1> wrapped around the first node and
// <e2>...</e2> around the last. Word units carry POS, entity type (when the
// token lies inside a mention span) and their position zone.
std::vector<TokenUnit> path_token_sequence(const Document& doc, const ShortestPath& path,
                                           const EntityMention& e1, const EntityMention& e2);

// Linear surface sequence between the two entity heads (document order,
// crossing sentence boundaries), markers wrapped around the head tokens.
std::vector<TokenUnit> linear_token_sequence(const Document& doc, const EntityMention& e1,
                                             const EntityMention& e2);

// DOT rendering of the document graph; node ids are "s<sent>:<idx>/<surface>"
// and NEXTS edges are dashed. When a path is given its edges are emphasised.
void write_dot(std::ostream& out, const DocumentGraph& graph, const ShortestPath* path);

}  // namespace idepnn

#endif
