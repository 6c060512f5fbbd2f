#include "idepnn/graph.hpp"

#include <algorithm>
#include <deque>
#include <ostream>

#include "idepnn/errors.hpp"

namespace idepnn {

int DocumentGraph::node_id(const NodeRef& ref) const {
  if (ref.sentence < 0 || ref.sentence >= static_cast<int>(sentence_offset_.size())) {
    throw DataError("node s" + std::to_string(ref.sentence) + ":" + std::to_string(ref.token) +
                    " not in graph: no such sentence");
  }
  const Sentence& s = doc_->sentences[ref.sentence];
  if (ref.token < 1 || ref.token > s.size()) {
    throw DataError("node s" + std::to_string(ref.sentence) + ":" + std::to_string(ref.token) +
                    " not in graph: token index out of range");
  }
  return sentence_offset_[ref.sentence] + ref.token - 1;
}

NodeRef DocumentGraph::node_ref(int id) const {
  int sent = static_cast<int>(sentence_offset_.size()) - 1;
  while (sent > 0 && sentence_offset_[sent] > id) --sent;
  return NodeRef{sent, id - sentence_offset_[sent] + 1};
}

const Token& DocumentGraph::token(const NodeRef& ref) const {
  return doc_->sentences[ref.sentence].token(ref.token);
}

DocumentGraph build_document_graph(const Document& doc) {
  DocumentGraph g;
  g.doc_ = &doc;
  int total = 0;
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    validate_sentence(doc.sentences[i], "doc " + doc.id + " sentence " + std::to_string(i));
    g.sentence_offset_.push_back(total);
    total += doc.sentences[i].size();
  }
  g.adj_.resize(total);
  g.children_.resize(total);

  auto add_edge = [&g](int a, int b, const std::string& label, bool nexts) {
    for (const DocumentGraph::Edge& e : g.adj_[a]) {
      if (e.to == b) throw InternalError("multigraph input: duplicate edge between nodes");
    }
    g.adj_[a].push_back({b, label, nexts});
    g.adj_[b].push_back({a, label, nexts});
  };

  int prev_root = -1;
  for (const Sentence& s : doc.sentences) {
    const int base = g.sentence_offset_[s.doc_index];
    for (const Token& t : s.tokens) {
      const int id = base + t.index - 1;
      if (t.head > 0) {
        const int head_id = base + t.head - 1;
        add_edge(head_id, id, t.deprel, false);
        g.children_[head_id].push_back(id);
      }
    }
    const int root = base + s.root_index() - 1;
    if (prev_root >= 0) {
      add_edge(prev_root, root, kNextsLabel, true);
      ++g.nexts_edges_;
    }
    prev_root = root;
  }
  for (std::vector<int>& kids : g.children_) {
    std::sort(kids.begin(), kids.end());
  }

  // Whole-document tree invariant.
  long edges = 0;
  for (const auto& nbrs : g.adj_) edges += static_cast<long>(nbrs.size());
  edges /= 2;
  if (total > 0 && edges != total - 1) {
    throw InternalError("document graph is not a tree: " + std::to_string(edges) + " edges over " +
                        std::to_string(total) + " nodes");
  }
  if (g.nexts_edges_ != std::max<int>(0, static_cast<int>(doc.sentences.size()) - 1)) {
    throw InternalError("unexpected NEXTS edge count");
  }
  return g;
}

int entity_head(const EntityMention& mention, const Sentence& sentence) {
  if (mention.first > mention.last) throw DataError("mention " + mention.id + ": empty span");
  int head = -1;
  for (int i = mention.first; i <= mention.last; ++i) {
    const int governor = sentence.token(i).head;
    const bool outside = governor == 0 || governor < mention.first || governor > mention.last;
    if (outside) head = i;  // rightmost wins on ties
  }
  return head >= 0 ? head : mention.last;
}

int ShortestPath::nexts_crossings() const {
  int n = 0;
  for (const std::string& label : edge_labels) {
    if (label == kNextsLabel) ++n;
  }
  return n;
}

ShortestPath shortest_path(const DocumentGraph& graph, const NodeRef& a, const NodeRef& b) {
  const int src = graph.node_id(a);
  const int dst = graph.node_id(b);
  std::vector<int> parent(graph.node_count(), -2);
  std::deque<int> queue{src};
  parent[src] = -1;
  while (!queue.empty() && parent[dst] == -2) {
    const int v = queue.front();
    queue.pop_front();
    for (const DocumentGraph::Edge& e : graph.neighbors(v)) {
      if (parent[e.to] == -2) {
        parent[e.to] = v;
        queue.push_back(e.to);
      }
    }
  }
  if (parent[dst] == -2) throw InternalError("graph not connected: endpoints unreachable");

  std::vector<int> ids;
  for (int v = dst; v != -1; v = parent[v]) ids.push_back(v);
  std::reverse(ids.begin(), ids.end());

  ShortestPath path;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    path.nodes.push_back(graph.node_ref(ids[i]));
    if (i + 1 < ids.size()) {
      const std::string* label = nullptr;
      for (const DocumentGraph::Edge& e : graph.neighbors(ids[i])) {
        if (e.to == ids[i + 1]) {
          if (label) throw InternalError("multigraph input: ambiguous path edge");
          label = &e.label;
        }
      }
      if (!label) throw InternalError("path reconstruction lost an edge");
      path.edge_labels.push_back(*label);
    }
  }
  return path;
}

int Subtree::node_count() const {
  int n = 1;
  for (const auto& [label, child] : children) n += child.node_count();
  return n;
}

namespace {

Subtree collect_subtree(const DocumentGraph& graph, int id, const std::set<NodeRef>& excluded,
                        int depth_left) {
  Subtree sub;
  sub.root = graph.node_ref(id);
  if (depth_left == 0) return sub;
  for (int child : graph.dependents(id)) {
    const NodeRef ref = graph.node_ref(child);
    if (excluded.count(ref)) continue;
    sub.children.emplace_back(graph.token(child).deprel,
                              collect_subtree(graph, child, excluded, depth_left - 1));
  }
  return sub;
}

}  // namespace

Subtree extract_subtree(const DocumentGraph& graph, const NodeRef& word,
                        const std::set<NodeRef>& excluded, int max_depth) {
  return collect_subtree(graph, graph.node_id(word), excluded, max_depth);
}

AugmentedPath build_adp(const DocumentGraph& graph, const ShortestPath& path, int max_depth) {
  AugmentedPath adp;
  adp.path = path;
  const std::set<NodeRef> on_path(path.nodes.begin(), path.nodes.end());
  for (const NodeRef& node : path.nodes) {
    adp.subtrees.push_back(extract_subtree(graph, node, on_path, max_depth));
  }
  return adp;
}

namespace {

bool in_span(const NodeRef& node, const EntityMention& m) {
  return node.sentence == m.sentence && node.token >= m.first && node.token <= m.last;
}

TokenUnit marker_unit(TokenUnit::Kind kind, PiZone zone) {
  TokenUnit u;
  u.kind = kind;
  u.zone = zone;
  switch (kind) {
    case TokenUnit::Kind::E1Open: u.surface = "<e1>"; break;
    case TokenUnit::Kind::E1Close: u.surface = "</e1>"; break;
    case TokenUnit::Kind::E2Open: u.surface = "<e2>"; break;
    case TokenUnit::Kind::E2Close: u.surface = "</e2>"; break;
    default: break;
  }
  return u;
}

TokenUnit word_unit(const Document& doc, const NodeRef& node, const EntityMention& e1,
                    const EntityMention& e2, PiZone zone) {
  const Token& tok = doc.sentences[node.sentence].token(node.token);
  TokenUnit u;
  u.kind = TokenUnit::Kind::Word;
  u.node = node;
  u.surface = tok.surface;
  u.pos = tok.pos;
  u.zone = zone;
  if (in_span(node, e1)) {
    u.etype = e1.etype;
    u.zone = PiZone::E1;
  } else if (in_span(node, e2)) {
    u.etype = e2.etype;
    u.zone = PiZone::E2;
  }
  return u;
}

}  // namespace

std::vector<TokenUnit> path_token_sequence(const Document& doc, const ShortestPath& path,
                                           const EntityMention& e1, const EntityMention& e2) {
  std::vector<TokenUnit> units;
  const std::size_t last = path.nodes.size() - 1;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    const bool first_node = i == 0;
    const bool last_node = i == last;
    if (first_node) units.push_back(marker_unit(TokenUnit::Kind::E1Open, PiZone::E1));
    if (last_node) units.push_back(marker_unit(TokenUnit::Kind::E2Open, PiZone::E2));
    units.push_back(word_unit(doc, path.nodes[i], e1, e2, PiZone::Between));
    if (first_node) units.push_back(marker_unit(TokenUnit::Kind::E1Close, PiZone::E1));
    if (last_node) units.push_back(marker_unit(TokenUnit::Kind::E2Close, PiZone::E2));
  }
  return units;
}

std::vector<TokenUnit> linear_token_sequence(const Document& doc, const EntityMention& e1,
                                             const EntityMention& e2) {
  const NodeRef h1{e1.sentence, entity_head(e1, doc.sentences[e1.sentence])};
  const NodeRef h2{e2.sentence, entity_head(e2, doc.sentences[e2.sentence])};
  const NodeRef lo = std::min(h1, h2);
  const NodeRef hi = std::max(h1, h2);

  std::vector<TokenUnit> units;
  NodeRef cur = lo;
  bool past_first = false;
  while (true) {
    const bool is_h1 = cur == h1;
    const bool is_h2 = cur == h2;
    PiZone zone = past_first ? PiZone::Between : PiZone::BeforeE1;
    if (is_h1 || is_h2) past_first = true;
    if (is_h1) units.push_back(marker_unit(TokenUnit::Kind::E1Open, PiZone::E1));
    if (is_h2) units.push_back(marker_unit(TokenUnit::Kind::E2Open, PiZone::E2));
    units.push_back(word_unit(doc, cur, e1, e2, zone));
    if (is_h1) units.push_back(marker_unit(TokenUnit::Kind::E1Close, PiZone::E1));
    if (is_h2) units.push_back(marker_unit(TokenUnit::Kind::E2Close, PiZone::E2));
    if (cur == hi) break;
    if (cur.token < doc.sentences[cur.sentence].size()) {
      ++cur.token;
    } else {
      ++cur.sentence;
      cur.token = 1;
    }
  }
  return units;
}

void write_dot(std::ostream& out, const DocumentGraph& graph, const ShortestPath* path) {
  auto name = [&graph](int id) {
    const NodeRef ref = graph.node_ref(id);
    return "s" + std::to_string(ref.sentence) + ":" + std::to_string(ref.token) + "/" +
           graph.token(id).surface;
  };
  std::set<std::pair<int, int>> on_path;
  if (path) {
    for (std::size_t i = 0; i + 1 < path->nodes.size(); ++i) {
      const int a = graph.node_id(path->nodes[i]);
      const int b = graph.node_id(path->nodes[i + 1]);
      on_path.insert({std::min(a, b), std::max(a, b)});
    }
  }
  out << "graph \"" << graph.doc().id << "\" {\n";
  for (int id = 0; id < graph.node_count(); ++id) {
    for (const DocumentGraph::Edge& e : graph.neighbors(id)) {
      if (e.to < id) continue;  // emit each undirected edge once
      out << "  \"" << name(id) << "\" -- \"" << name(e.to) << "\" [label=\"" << e.label << '"';
      if (e.nexts) out << ", style=dashed";
      if (on_path.count({id, e.to})) out << ", penwidth=2.5, color=gray40";
      out << "];\n";
    }
  }
  out << "}\n";
}

}  // namespace idepnn
