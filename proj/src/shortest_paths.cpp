#include "pado/shortest_paths.hpp"

#include <string>

namespace pado {

const ShortestPathTree& DijkstraEngine::run(NodeId root, std::span<const std::uint8_t> edge_mask) {
  const EmbeddedPlanarGraph& g = *graph_;
  const std::size_t n = g.node_count();
  tree_.root = root;
  tree_.parent_dart.assign(n, kNoDart);
  tree_.dist.assign(n, kInfinity);
  tree_.tie.assign(n, 0);
  tree_.order.clear();
  settled_.assign(n, 0);
  heap_ = {};

  tree_.dist[root] = 0.0;
  heap_.emplace(0.0, 0, root);
  while (!heap_.empty()) {
    const auto [d, t, u] = heap_.top();
    heap_.pop();
    if (settled_[u]) continue;
    settled_[u] = 1;
    tree_.order.push_back(u);
    for (DartId dart : g.darts_of(u)) {
      const EdgeId e = edge_of(dart);
      if (!edge_mask.empty() && !edge_mask[e]) continue;
      const NodeId w = g.head(dart);
      if (settled_[w]) continue;
      const Length nd = d + g.length(e);
      const std::uint64_t nt = t + g.edge(e).tiebreak;
      Length& dw = tree_.dist[w];
      std::uint64_t& tw = tree_.tie[w];
      if (nd < dw || (nd == dw && nt < tw)) {
        dw = nd;
        tw = nt;
        tree_.parent_dart[w] = dart;
        heap_.emplace(nd, nt, w);
      } else if (nd == dw && nt == tw && u < g.tail(tree_.parent_dart[w])) {
        tree_.parent_dart[w] = dart;
      }
    }
  }
  return tree_;
}

ShortestPathTree shortest_path_tree(const EmbeddedPlanarGraph& graph, NodeId root,
                                    std::span<const std::uint8_t> edge_mask) {
  DijkstraEngine engine(graph);
  engine.run(root, edge_mask);
  return engine.tree();
}

ShortestPathTree sssp(const EmbeddedPlanarGraph& graph, NodeId root,
                      std::span<const std::uint8_t> allowed_edges) {
  if (root >= graph.node_count()) throw UnreachableNode("root out of range");
  ShortestPathTree tree = shortest_path_tree(graph, root, allowed_edges);
  if (allowed_edges.empty()) {
    for (NodeId v = 0; v < graph.node_count(); ++v) {
      if (!tree.reached(v)) throw UnreachableNode("node " + std::to_string(v) + " is unreachable");
    }
  } else {
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
      if (!allowed_edges[e]) continue;
      const auto& rec = graph.edge(e);
      if (!tree.reached(rec.u) || !tree.reached(rec.v)) {
        throw UnreachableNode("allowed subgraph is disconnected at edge " + std::to_string(e));
      }
    }
  }
  return tree;
}

ShortestPathTree bfs_tree(const EmbeddedPlanarGraph& graph, NodeId root,
                          std::span<const std::uint8_t> edge_mask) {
  const std::size_t n = graph.node_count();
  ShortestPathTree tree;
  tree.root = root;
  tree.parent_dart.assign(n, kNoDart);
  tree.dist.assign(n, kInfinity);
  tree.tie.assign(n, 0);
  tree.dist[root] = 0.0;
  tree.order.push_back(root);
  for (std::size_t head = 0; head < tree.order.size(); ++head) {
    const NodeId u = tree.order[head];
    for (DartId d : graph.darts_of(u)) {
      if (!edge_mask.empty() && !edge_mask[edge_of(d)]) continue;
      const NodeId w = graph.head(d);
      if (tree.reached(w)) continue;
      tree.dist[w] = tree.dist[u] + 1.0;
      tree.parent_dart[w] = d;
      tree.order.push_back(w);
    }
  }
  return tree;
}

Length exact_distance(const EmbeddedPlanarGraph& graph, NodeId s, NodeId t) {
  const std::size_t n = graph.node_count();
  if (s >= n || t >= n) throw UnknownNode("query node out of range");
  if (s == t) return 0.0;
  std::vector<Length> dist(n, kInfinity);
  using Entry = std::pair<Length, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[s] = 0.0;
  heap.emplace(0.0, s);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u == t) return d;
    for (DartId dart : graph.darts_of(u)) {
      const EdgeId e = edge_of(dart);
      if (graph.is_synthetic(e)) continue;
      const NodeId w = graph.head(dart);
      const Length nd = d + graph.length(e);
      if (nd < dist[w]) {
        dist[w] = nd;
        heap.emplace(nd, w);
      }
    }
  }
  throw UnreachableNode("node " + std::to_string(t) + " is unreachable from " + std::to_string(s));
}

}  // namespace pado
