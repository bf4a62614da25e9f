#pragma once

#include <cstdint>
#include <queue>
#include <span>
#include <tuple>
#include <vector>

#include "pado/graph.hpp"

namespace pado {

// Rooted tree of shortest paths. Unreached nodes have dist == kInfinity.
struct ShortestPathTree {
  NodeId root = kNoNode;
  std::vector<DartId> parent_dart;  // dart from parent to child; kNoDart at the root
  std::vector<Length> dist;
  std::vector<std::uint64_t> tie;  // sum of edge tiebreaks along the tree path
  std::vector<NodeId> order;       // settle order; parents precede children

  bool reached(NodeId v) const { return dist[v] != kInfinity; }
};

inline NodeId tree_parent(const EmbeddedPlanarGraph& g, const ShortestPathTree& t, NodeId v) {
  return t.parent_dart[v] == kNoDart ? kNoNode : g.tail(t.parent_dart[v]);
}

// Reusable Dijkstra over an embedded graph. Paths are compared by length, then
// by the sum of edge tiebreaks, then by parent node id; this makes shortest
// paths unique and closed under taking subpaths.
class DijkstraEngine {
 public:
  explicit DijkstraEngine(const EmbeddedPlanarGraph& graph) : graph_(&graph) {}

  // An empty mask allows every edge.
  const ShortestPathTree& run(NodeId root, std::span<const std::uint8_t> edge_mask = {});
  const ShortestPathTree& tree() const { return tree_; }

 private:
  using Entry = std::tuple<Length, std::uint64_t, NodeId>;

  const EmbeddedPlanarGraph* graph_;
  ShortestPathTree tree_;
  std::vector<std::uint8_t> settled_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
};

// Partial tree: nodes outside the root's component stay unreached.
ShortestPathTree shortest_path_tree(const EmbeddedPlanarGraph& graph, NodeId root,
                                    std::span<const std::uint8_t> edge_mask = {});

// Single-source shortest paths over the allowed edges (all edges when empty).
// Throws UnreachableNode if a node touched by an allowed edge is not reached.
ShortestPathTree sssp(const EmbeddedPlanarGraph& graph, NodeId root,
                      std::span<const std::uint8_t> allowed_edges = {});

// Breadth-first tree by hop count; dist holds hop counts.
ShortestPathTree bfs_tree(const EmbeddedPlanarGraph& graph, NodeId root,
                          std::span<const std::uint8_t> edge_mask = {});

// Point-to-point distance over non-synthetic edges. Throws UnreachableNode.
Length exact_distance(const EmbeddedPlanarGraph& graph, NodeId s, NodeId t);

}  // namespace pado
