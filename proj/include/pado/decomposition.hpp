#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pado/graph.hpp"
#include "pado/shortest_paths.hpp"

namespace pado {

using DecompId = std::uint32_t;
inline constexpr DecompId kNoDecomp = std::numeric_limits<DecompId>::max();

// Shortest path p_0 .. p_s inside a piece. prefix_dist[i] is the length of p_0 .. p_i.
struct SeparatorPath {
  std::vector<NodeId> nodes;
  std::vector<Length> prefix_dist;

  std::size_t size() const { return nodes.size(); }
  Length length() const { return prefix_dist.empty() ? 0.0 : prefix_dist.back(); }
  // Distance along the path between positions i and j.
  Length between(std::size_t i, std::size_t j) const {
    return i <= j ? prefix_dist[j] - prefix_dist[i] : prefix_dist[i] - prefix_dist[j];
  }
};

// Builds a path from its node sequence; `edge_lengths[k]` joins nodes k and k+1.
SeparatorPath make_separator_path(std::vector<NodeId> nodes,
                                  std::span<const Length> edge_lengths);

// Fundamental cycle of a nontree edge, with the weight of the nodes strictly
// on each side. The inside is the side holding the face left of the edge's
// first dart.
struct FundamentalCycle {
  EdgeId edge = kNoEdge;
  NodeId apex = kNoNode;              // common ancestor of the edge endpoints
  std::vector<NodeId> to_first;       // apex .. tail of the edge's first dart
  std::vector<NodeId> to_second;      // apex .. head of the edge's first dart
  double inside_weight = 0.0;
  double outside_weight = 0.0;

  double heavier_side() const { return inside_weight > outside_weight ? inside_weight : outside_weight; }
};

enum class CycleChoice {
  most_balanced,   // minimize the heavier side
  shortest_balanced,  // fewest cycle nodes among cycles with both sides <= 2/3 of the weight
};

// Picks a nontree edge whose fundamental cycle is balanced (smallest edge id on
// ties). `graph` must be connected and embedded with every face a triangle;
// `tree` must span it using graph edges. Unit weights when `weights` is empty.
// shortest_balanced falls back to most_balanced when no cycle meets the bound.
// Throws NoSeparator when no nontree edge exists.
FundamentalCycle find_balanced_fundamental_cycle(const EmbeddedPlanarGraph& graph,
                                                 const ShortestPathTree& tree,
                                                 std::span<const double> weights = {},
                                                 CycleChoice choice = CycleChoice::most_balanced);

struct CycleSplit {
  std::vector<NodeId> cycle;
  std::vector<NodeId> inside;
  std::vector<NodeId> outside;
  std::vector<std::uint8_t> dart_inside;  // per dart: its face lies on the inside
};

// Nodes strictly inside / strictly outside the cycle, each sorted.
CycleSplit split_by_cycle(const EmbeddedPlanarGraph& graph, const ShortestPathTree& tree,
                          const FundamentalCycle& cycle);

struct SeparatorEdge {
  NodeId u = kNoNode;
  NodeId v = kNoNode;
  bool synthetic = false;
};

struct DecompNode {
  std::vector<NodeId> piece_nodes;  // sorted; the piece's edges are the original
                                    // edges among these nodes. Cleared by discard_pieces().
  std::uint32_t piece_size = 0;
  std::vector<SeparatorPath> paths;  // empty, or the two paths of S(x)
  std::optional<SeparatorEdge> nontree_edge;
  DecompId parent = kNoDecomp;
  std::array<DecompId, 2> children{kNoDecomp, kNoDecomp};
  std::uint32_t depth = 0;

  bool is_leaf() const { return children[0] == kNoDecomp; }
  bool has_separator() const { return !paths.empty(); }
};

struct DecompositionTree {
  std::vector<DecompNode> nodes;   // nodes[0] is the root; parents precede children
  std::vector<DecompId> leafmost;  // per graph node

  DecompId root() const { return 0; }
  std::uint32_t depth() const;
  void discard_pieces();
};

// Recursive shortest-path-separator decomposition down to pieces of at most one node.
DecompositionTree build_decomposition(const EmbeddedPlanarGraph& graph);

// Ancestors of leafmost(v), root first, ending with leafmost(v).
std::vector<DecompId> relevant_ancestors(const DecompositionTree& tree, NodeId v);

}  // namespace pado
