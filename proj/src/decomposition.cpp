#include "pado/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace pado {

namespace {

// Spanning tree of the faces formed by the duals of the nontree edges.
struct DualTree {
  FaceStructure faces;
  std::vector<std::uint32_t> parent_face;
  std::vector<EdgeId> parent_edge;
  std::vector<std::uint32_t> preorder;
  std::vector<std::uint32_t> tin;
  std::vector<std::uint32_t> size;

  bool in_subtree(std::uint32_t root, std::uint32_t f) const {
    return tin[f] >= tin[root] && tin[f] < tin[root] + size[root];
  }
};

std::vector<std::uint8_t> tree_edge_mask(const EmbeddedPlanarGraph& g, const ShortestPathTree& t) {
  std::vector<std::uint8_t> mask(g.edge_count(), 0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (t.parent_dart[v] != kNoDart) mask[edge_of(t.parent_dart[v])] = 1;
  }
  return mask;
}

DualTree build_dual_tree(const EmbeddedPlanarGraph& g, std::span<const std::uint8_t> in_tree) {
  DualTree dt;
  dt.faces = trace_faces(g);
  const std::size_t f_count = dt.faces.faces.size();
  dt.parent_face.assign(f_count, kNoNode);
  dt.parent_edge.assign(f_count, kNoEdge);
  dt.tin.assign(f_count, 0);
  dt.size.assign(f_count, 1);
  std::vector<std::uint8_t> seen(f_count, 0);
  std::vector<std::uint32_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const std::uint32_t f = stack.back();
    stack.pop_back();
    dt.tin[f] = static_cast<std::uint32_t>(dt.preorder.size());
    dt.preorder.push_back(f);
    for (DartId d : dt.faces.faces[f]) {
      const EdgeId e = edge_of(d);
      if (in_tree[e]) continue;
      const std::uint32_t other = dt.faces.face_of[reverse_dart(d)];
      if (seen[other]) continue;
      seen[other] = 1;
      dt.parent_face[other] = f;
      dt.parent_edge[other] = e;
      stack.push_back(other);
    }
  }
  if (dt.preorder.size() != f_count) {
    throw NoSeparator("nontree edges do not connect the faces; embedding is not planar");
  }
  for (auto it = dt.preorder.rbegin(); it != dt.preorder.rend(); ++it) {
    if (dt.parent_face[*it] != kNoNode) dt.size[dt.parent_face[*it]] += dt.size[*it];
  }
  return dt;
}

std::vector<std::uint32_t> hop_depths(const EmbeddedPlanarGraph& g, const ShortestPathTree& t) {
  std::vector<std::uint32_t> depth(g.node_count(), 0);
  for (NodeId v : t.order) {
    if (t.parent_dart[v] != kNoDart) depth[v] = depth[g.tail(t.parent_dart[v])] + 1;
  }
  return depth;
}

}  // namespace

SeparatorPath make_separator_path(std::vector<NodeId> nodes, std::span<const Length> edge_lengths) {
  SeparatorPath p;
  p.prefix_dist.reserve(nodes.size());
  Length acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0) acc += edge_lengths[i - 1];
    p.prefix_dist.push_back(acc);
  }
  p.nodes = std::move(nodes);
  return p;
}

FundamentalCycle find_balanced_fundamental_cycle(const EmbeddedPlanarGraph& g,
                                                 const ShortestPathTree& tree,
                                                 std::span<const double> weights,
                                                 CycleChoice choice) {
  const std::size_t n = g.node_count();
  if (tree.order.size() != n) throw NoSeparator("tree does not span the graph");
  auto weight = [&](NodeId v) { return weights.empty() ? 1.0 : weights[v]; };
  const auto in_tree = tree_edge_mask(g, tree);
  const auto depth = hop_depths(g, tree);
  const DualTree dual = build_dual_tree(g, in_tree);
  const auto& face_of = dual.faces.face_of;

  std::vector<std::uint32_t> home_face(n, 0);
  std::vector<double> sub(dual.faces.faces.size(), 0.0);
  double total = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    if (g.first_dart(v) == kNoDart) throw NoSeparator("isolated node in separator search");
    home_face[v] = face_of[g.first_dart(v)];
    sub[home_face[v]] += weight(v);
    total += weight(v);
  }
  for (auto it = dual.preorder.rbegin(); it != dual.preorder.rend(); ++it) {
    if (dual.parent_face[*it] != kNoNode) sub[dual.parent_face[*it]] += sub[*it];
  }

  FundamentalCycle best;
  double best_heavy = kInfinity;
  std::size_t best_short_len = std::numeric_limits<std::size_t>::max();
  FundamentalCycle shortest;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (in_tree[e]) continue;
    const std::uint32_t f1 = face_of[dart_of(e, false)];
    const std::uint32_t f2 = face_of[dart_of(e, true)];
    const std::uint32_t child = dual.parent_edge[f1] == e ? f1 : f2;
    double cycle_weight = 0.0;
    double correction = 0.0;
    std::size_t cycle_len = 0;
    auto visit = [&](NodeId z) {
      ++cycle_len;
      cycle_weight += weight(z);
      if (dual.in_subtree(child, home_face[z])) correction += weight(z);
    };
    NodeId a = g.edge(e).u;
    NodeId b = g.edge(e).v;
    while (a != b) {
      if (depth[a] >= depth[b]) {
        visit(a);
        a = g.tail(tree.parent_dart[a]);
      } else {
        visit(b);
        b = g.tail(tree.parent_dart[b]);
      }
    }
    visit(a);
    const double side_sub = sub[child] - correction;
    const double side_other = total - cycle_weight - side_sub;
    const double heavy = std::max(side_sub, side_other);
    const bool first_face_in_sub = dual.in_subtree(child, f1);
    auto record = [&](FundamentalCycle& c) {
      c.edge = e;
      c.inside_weight = first_face_in_sub ? side_sub : side_other;
      c.outside_weight = first_face_in_sub ? side_other : side_sub;
    };
    if (heavy < best_heavy) {
      best_heavy = heavy;
      record(best);
    }
    if (choice == CycleChoice::shortest_balanced && 3.0 * heavy <= 2.0 * total &&
        cycle_len < best_short_len) {
      best_short_len = cycle_len;
      record(shortest);
    }
  }
  if (best.edge == kNoEdge) throw NoSeparator("graph has no nontree edge");
  if (shortest.edge != kNoEdge) best = shortest;

  NodeId a = g.edge(best.edge).u;
  NodeId b = g.edge(best.edge).v;
  std::vector<NodeId> up_a;
  std::vector<NodeId> up_b;
  while (a != b) {
    if (depth[a] >= depth[b]) {
      up_a.push_back(a);
      a = g.tail(tree.parent_dart[a]);
    } else {
      up_b.push_back(b);
      b = g.tail(tree.parent_dart[b]);
    }
  }
  best.apex = a;
  best.to_first.push_back(a);
  best.to_first.insert(best.to_first.end(), up_a.rbegin(), up_a.rend());
  best.to_second.push_back(a);
  best.to_second.insert(best.to_second.end(), up_b.rbegin(), up_b.rend());
  return best;
}

CycleSplit split_by_cycle(const EmbeddedPlanarGraph& g, const ShortestPathTree& tree,
                          const FundamentalCycle& cycle) {
  const std::size_t n = g.node_count();
  const auto in_tree = tree_edge_mask(g, tree);
  const FaceStructure faces = trace_faces(g);

  std::vector<std::uint8_t> state(n, 0);  // 1 cycle, 2 inside
  CycleSplit split;
  for (NodeId v : cycle.to_first) state[v] = 1;
  for (NodeId v : cycle.to_second) state[v] = 1;

  // Flood the faces on the first dart's side without crossing the cycle.
  std::vector<std::uint8_t> face_seen(faces.faces.size(), 0);
  std::vector<std::uint32_t> stack{faces.face_of[dart_of(cycle.edge, false)]};
  face_seen[stack.front()] = 1;
  while (!stack.empty()) {
    const std::uint32_t f = stack.back();
    stack.pop_back();
    for (DartId d : faces.faces[f]) {
      const NodeId v = g.tail(d);
      if (state[v] == 0) state[v] = 2;
      const EdgeId e = edge_of(d);
      if (in_tree[e] || e == cycle.edge) continue;
      const std::uint32_t other = faces.face_of[reverse_dart(d)];
      if (!face_seen[other]) {
        face_seen[other] = 1;
        stack.push_back(other);
      }
    }
  }
  split.dart_inside.resize(g.dart_count());
  for (DartId d = 0; d < g.dart_count(); ++d) split.dart_inside[d] = face_seen[faces.face_of[d]];
  for (NodeId v = 0; v < n; ++v) {
    if (state[v] == 1) split.cycle.push_back(v);
    else if (state[v] == 2) split.inside.push_back(v);
    else split.outside.push_back(v);
  }
  return split;
}

std::uint32_t DecompositionTree::depth() const {
  std::uint32_t d = 0;
  for (const auto& x : nodes) d = std::max(d, x.depth);
  return d;
}

void DecompositionTree::discard_pieces() {
  for (auto& x : nodes) {
    std::vector<NodeId>().swap(x.piece_nodes);
  }
}

namespace {

std::vector<NodeId> to_parent(std::span<const NodeId> local, std::span<const NodeId> mapping) {
  std::vector<NodeId> out;
  out.reserve(local.size());
  for (NodeId v : local) out.push_back(mapping[v]);
  return out;
}

SeparatorPath path_in_parent(const Subgraph& sub, const ShortestPathTree& tree,
                             const std::vector<NodeId>& local_nodes,
                             std::span<const NodeId> outer_mapping) {
  std::vector<Length> lengths;
  for (std::size_t i = 1; i < local_nodes.size(); ++i) {
    lengths.push_back(sub.graph.length(edge_of(tree.parent_dart[local_nodes[i]])));
  }
  std::vector<NodeId> nodes;
  for (NodeId v : local_nodes) nodes.push_back(outer_mapping[sub.to_parent_node[v]]);
  return make_separator_path(std::move(nodes), lengths);
}

struct PieceSplit {
  std::vector<SeparatorPath> paths;
  std::optional<SeparatorEdge> nontree_edge;
  std::array<std::vector<NodeId>, 2> children;
};

// Splits a piece (given as global node ids) into separator and two children.
PieceSplit split_piece(const EmbeddedPlanarGraph& graph, const std::vector<NodeId>& piece) {
  PieceSplit out;
  const Subgraph sub = induced_subgraph(graph, piece);
  const Components comps = connected_components(sub.graph);
  std::vector<std::vector<NodeId>> members(comps.count);
  for (NodeId v = 0; v < piece.size(); ++v) members[comps.component_of[v]].push_back(v);
  std::uint32_t largest = 0;
  for (std::uint32_t c = 1; c < comps.count; ++c) {
    if (members[c].size() > members[largest].size()) largest = c;
  }
  const std::size_t total = piece.size();

  // Groups of components are assigned to the lighter child.
  auto distribute = [&](std::vector<std::uint32_t> order, std::array<std::size_t, 2> load) {
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return members[a].size() > members[b].size();
    });
    for (std::uint32_t c : order) {
      const int side = load[1] < load[0] ? 1 : 0;
      load[side] += members[c].size();
      for (NodeId v : members[c]) out.children[side].push_back(piece[v]);
    }
  };

  if (3 * members[largest].size() <= 2 * total) {
    std::vector<std::uint32_t> order(comps.count);
    std::iota(order.begin(), order.end(), 0);
    distribute(order, {0, 0});
  } else {
    const std::vector<NodeId>& core = members[largest];
    const Subgraph csub = induced_subgraph(sub.graph, core);
    std::vector<NodeId> core_to_piece(core.size());
    for (NodeId i = 0; i < core.size(); ++i) core_to_piece[i] = piece[core[i]];
    if (core.size() <= 2) {
      const ShortestPathTree tree = shortest_path_tree(csub.graph, 0);
      out.paths.push_back(make_separator_path({core_to_piece[0]}, {}));
      std::vector<NodeId> second{0};
      if (core.size() == 2) second.push_back(1);
      out.paths.push_back(path_in_parent(Subgraph{csub.graph, {0, 1}, {}}, tree, second,
                                         core_to_piece));
    } else {
      const ShortestPathTree tree = shortest_path_tree(csub.graph, 0);
      const EmbeddedPlanarGraph tri = triangulate(csub.graph);
      const FundamentalCycle cycle = find_balanced_fundamental_cycle(tri, tree);
      if (3 * cycle.heavier_side() > 2.0 * static_cast<double>(core.size())) {
        throw NoSeparator("no fundamental cycle leaves both sides within 2/3 of the piece");
      }
      const CycleSplit split = split_by_cycle(tri, tree, cycle);
      Subgraph identity{csub.graph, {}, {}};
      identity.to_parent_node.resize(core.size());
      std::iota(identity.to_parent_node.begin(), identity.to_parent_node.end(), 0);
      out.paths.push_back(path_in_parent(identity, tree, cycle.to_first, core_to_piece));
      out.paths.push_back(path_in_parent(identity, tree, cycle.to_second, core_to_piece));
      const auto& rec = tri.edge(cycle.edge);
      out.nontree_edge = SeparatorEdge{core_to_piece[rec.u], core_to_piece[rec.v], rec.synthetic};
      out.children[0] = to_parent(split.inside, core_to_piece);
      out.children[1] = to_parent(split.outside, core_to_piece);
    }
    std::vector<std::uint32_t> rest;
    for (std::uint32_t c = 0; c < comps.count; ++c) {
      if (c != largest) rest.push_back(c);
    }
    if (!rest.empty()) {
      // Everything else joins the smaller side as one block.
      std::size_t others = 0;
      for (std::uint32_t c : rest) others += members[c].size();
      const int side = out.children[1].size() < out.children[0].size() ? 1 : 0;
      for (std::uint32_t c : rest) {
        for (NodeId v : members[c]) out.children[side].push_back(piece[v]);
      }
      (void)others;
    }
  }
  for (auto& child : out.children) std::sort(child.begin(), child.end());
  return out;
}

}  // namespace

DecompositionTree build_decomposition(const EmbeddedPlanarGraph& graph) {
  DecompositionTree tree;
  tree.leafmost.assign(graph.node_count(), kNoDecomp);
  DecompNode root;
  root.piece_nodes.resize(graph.node_count());
  std::iota(root.piece_nodes.begin(), root.piece_nodes.end(), 0);
  root.piece_size = static_cast<std::uint32_t>(graph.node_count());
  tree.nodes.push_back(std::move(root));

  for (DecompId x = 0; x < tree.nodes.size(); ++x) {
    if (tree.nodes[x].piece_nodes.size() <= 1) {
      if (tree.nodes[x].piece_nodes.size() == 1) tree.leafmost[tree.nodes[x].piece_nodes[0]] = x;
      continue;
    }
    PieceSplit split = split_piece(graph, tree.nodes[x].piece_nodes);
    for (const auto& path : split.paths) {
      for (NodeId v : path.nodes) tree.leafmost[v] = x;
    }
    const std::uint32_t depth = tree.nodes[x].depth;
    for (int side = 0; side < 2; ++side) {
      DecompNode child;
      child.piece_size = static_cast<std::uint32_t>(split.children[side].size());
      child.piece_nodes = std::move(split.children[side]);
      child.parent = x;
      child.depth = depth + 1;
      tree.nodes[x].children[side] = static_cast<DecompId>(tree.nodes.size());
      tree.nodes.push_back(std::move(child));
    }
    tree.nodes[x].paths = std::move(split.paths);
    tree.nodes[x].nontree_edge = split.nontree_edge;
  }
  return tree;
}

std::vector<DecompId> relevant_ancestors(const DecompositionTree& tree, NodeId v) {
  if (v >= tree.leafmost.size()) throw UnknownNode("node " + std::to_string(v) + " out of range");
  std::vector<DecompId> chain;
  for (DecompId x = tree.leafmost[v]; x != kNoDecomp; x = tree.nodes[x].parent) chain.push_back(x);
  std::reverse(chain.begin(), chain.end());
  return chain;
}

}  // namespace pado
