#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pado/decomposition.hpp"
#include "pado/generate.hpp"
#include "pado/graph.hpp"
#include "pado/shortest_paths.hpp"

namespace pado::testing {

// Bellman-Ford over the non-synthetic edges; independent of the Dijkstra engine.
inline std::vector<Length> bellman_ford(const EmbeddedPlanarGraph& g, NodeId source) {
  std::vector<Length> dist(g.node_count(), kInfinity);
  dist[source] = 0.0;
  for (std::size_t round = 0; round + 1 < g.node_count() || round == 0; ++round) {
    bool changed = false;
    for (const EdgeRecord& e : g.edges()) {
      if (e.synthetic) continue;
      if (dist[e.u] + e.length < dist[e.v]) {
        dist[e.v] = dist[e.u] + e.length;
        changed = true;
      }
      if (dist[e.v] + e.length < dist[e.u]) {
        dist[e.u] = dist[e.v] + e.length;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

inline EmbeddedPlanarGraph grid(std::size_t rows, std::size_t cols, std::uint64_t seed = 1,
                                std::optional<LengthModel> lengths = std::nullopt) {
  GeneratorParams p;
  p.kind = GraphKind::grid;
  p.rows = rows;
  p.cols = cols;
  p.seed = seed;
  p.lengths = lengths;
  return generate(p);
}

inline EmbeddedPlanarGraph delaunay(std::size_t n, std::uint64_t seed = 1,
                                    std::optional<LengthModel> lengths = std::nullopt) {
  GeneratorParams p;
  p.kind = GraphKind::delaunay;
  p.nodes = n;
  p.seed = seed;
  p.lengths = lengths;
  return generate(p);
}

inline EmbeddedPlanarGraph stacked(std::size_t n, std::uint64_t seed = 1) {
  GeneratorParams p;
  p.kind = GraphKind::random_triangulation;
  p.nodes = n;
  p.seed = seed;
  return generate(p);
}

// Path a - b - c - ... with the given lengths, embedded on a line.
inline EmbeddedPlanarGraph path_graph(const std::vector<Length>& lengths) {
  std::vector<Point> coords;
  std::vector<EdgeRecord> edges;
  for (std::size_t i = 0; i <= lengths.size(); ++i) coords.push_back({static_cast<double>(i), 0.0});
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1), lengths[i]});
  }
  return EmbeddedPlanarGraph::from_coordinates(std::move(coords), std::move(edges));
}


// Tree path root .. v of a shortest-path tree, as a separator path.
inline SeparatorPath tree_path(const EmbeddedPlanarGraph& g, const ShortestPathTree& tree, NodeId v) {
  std::vector<NodeId> nodes;
  std::vector<Length> lengths;
  for (NodeId x = v; x != tree.root; x = g.tail(tree.parent_dart[x])) {
    nodes.push_back(x);
    lengths.push_back(g.length(edge_of(tree.parent_dart[x])));
  }
  nodes.push_back(tree.root);
  std::reverse(nodes.begin(), nodes.end());
  std::reverse(lengths.begin(), lengths.end());
  return make_separator_path(std::move(nodes), lengths);
}

// Test paths in a connected graph: the two separator paths of a balanced
// fundamental cycle and the tree path to the farthest node.
inline std::vector<SeparatorPath> sample_paths(const EmbeddedPlanarGraph& g, NodeId root = 0) {
  const ShortestPathTree tree = shortest_path_tree(g, root);
  const FundamentalCycle c = find_balanced_fundamental_cycle(triangulate(g), tree);
  std::vector<SeparatorPath> out;
  for (const std::vector<NodeId>* nodes : {&c.to_first, &c.to_second}) {
    std::vector<Length> lengths;
    for (std::size_t i = 1; i < nodes->size(); ++i) lengths.push_back(g.length(edge_of(tree.parent_dart[(*nodes)[i]])));
    out.push_back(make_separator_path(*nodes, lengths));
  }
  NodeId far = root;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (tree.dist[v] > tree.dist[far]) far = v;
  }
  out.push_back(tree_path(g, tree, far));
  return out;
}

}  // namespace pado::testing
