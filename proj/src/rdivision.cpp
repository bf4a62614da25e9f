#include "pado/rdivision.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "pado/decomposition.hpp"
#include "pado/shortest_paths.hpp"

namespace pado {

namespace {

using EdgeSet = std::vector<EdgeId>;

// Midpoint of a double-sweep BFS path; keeps separator cycles short.
NodeId pseudo_center(const EmbeddedPlanarGraph& g) {
  const NodeId a = bfs_tree(g, 0).order.back();
  const ShortestPathTree from_a = bfs_tree(g, a);
  NodeId v = from_a.order.back();
  const auto half = static_cast<std::uint64_t>(from_a.dist[v]) / 2;
  while (static_cast<std::uint64_t>(from_a.dist[v]) > half) v = g.tail(from_a.parent_dart[v]);
  return v;
}

class RegionSplitter {
 public:
  explicit RegionSplitter(const EmbeddedPlanarGraph& g) : g_(g), mask_(g.edge_count(), 0) {}

  // Splits `edges` into two nonempty sets. `weighted` marks nodes that should be
  // balanced across the separator (all nodes count when null).
  std::pair<EdgeSet, EdgeSet> split(const EdgeSet& edges, const std::vector<std::uint8_t>* weighted) {
    const std::vector<NodeId> nodes = region_nodes(g_, edges);
    for (EdgeId e : edges) mask_[e] = 1;
    const Subgraph sub = induced_subgraph(g_, nodes, mask_);
    for (EdgeId e : edges) mask_[e] = 0;

    std::pair<EdgeSet, EdgeSet> out;
    const Components comps = connected_components(sub.graph);
    if (comps.count > 1) {
      split_components(sub, comps, out);
    } else {
      split_by_separator(sub, nodes, weighted, out);
    }
    if (out.first.empty() || out.second.empty()) split_in_bfs_order(sub, out);
    std::sort(out.first.begin(), out.first.end());
    std::sort(out.second.begin(), out.second.end());
    return out;
  }

 private:
  void split_components(const Subgraph& sub, const Components& comps,
                        std::pair<EdgeSet, EdgeSet>& out) const {
    std::vector<EdgeSet> groups(comps.count);
    for (EdgeId e = 0; e < sub.graph.edge_count(); ++e) {
      groups[comps.component_of[sub.graph.edge(e).u]].push_back(sub.to_parent_edge[e]);
    }
    std::vector<std::uint32_t> order(comps.count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return groups[a].size() > groups[b].size();
    });
    for (std::uint32_t c : order) {
      EdgeSet& target = out.second.size() < out.first.size() ? out.second : out.first;
      target.insert(target.end(), groups[c].begin(), groups[c].end());
    }
  }

  void split_by_separator(const Subgraph& sub, const std::vector<NodeId>& nodes,
                          const std::vector<std::uint8_t>* weighted,
                          std::pair<EdgeSet, EdgeSet>& out) const {
    if (sub.graph.node_count() < 3) return;
    const ShortestPathTree tree = bfs_tree(sub.graph, pseudo_center(sub.graph));
    const EmbeddedPlanarGraph tri = triangulate(sub.graph);
    std::vector<double> weights;
    if (weighted != nullptr) {
      weights.resize(nodes.size());
      for (NodeId v = 0; v < nodes.size(); ++v) weights[v] = (*weighted)[nodes[v]] ? 1.0 : 0.0;
    }
    FundamentalCycle cycle;
    try {
      cycle = find_balanced_fundamental_cycle(tri, tree, weights, CycleChoice::shortest_balanced);
    } catch (const NoSeparator&) {
      return;
    }
    const CycleSplit split = split_by_cycle(tri, tree, cycle);
    std::vector<std::uint8_t> side(nodes.size(), 0);  // 0 cycle, 1 inside, 2 outside
    for (NodeId v : split.inside) side[v] = 1;
    for (NodeId v : split.outside) side[v] = 2;
    for (EdgeId e = 0; e < sub.graph.edge_count(); ++e) {
      const auto& rec = sub.graph.edge(e);
      bool inside;
      if (side[rec.u] != 0 || side[rec.v] != 0) {
        inside = side[rec.u] == 1 || side[rec.v] == 1;
      } else {
        // Both endpoints on the cycle: chords follow their faces, cycle edges go inside.
        inside = split.dart_inside[dart_of(e, false)] || split.dart_inside[dart_of(e, true)];
      }
      (inside ? out.first : out.second).push_back(sub.to_parent_edge[e]);
    }
  }

  // Last resort: halve the edges in breadth-first order.
  void split_in_bfs_order(const Subgraph& sub, std::pair<EdgeSet, EdgeSet>& out) const {
    out.first.clear();
    out.second.clear();
    const auto& sg = sub.graph;
    std::vector<EdgeId> order;
    std::vector<std::uint8_t> taken(sg.edge_count(), 0);
    std::vector<std::uint8_t> seen(sg.node_count(), 0);
    for (NodeId start = 0; start < sg.node_count(); ++start) {
      if (seen[start]) continue;
      std::deque<NodeId> queue{start};
      seen[start] = 1;
      while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        for (DartId d : sg.darts_of(u)) {
          const EdgeId e = edge_of(d);
          if (!taken[e]) {
            taken[e] = 1;
            order.push_back(e);
          }
          if (!seen[sg.head(d)]) {
            seen[sg.head(d)] = 1;
            queue.push_back(sg.head(d));
          }
        }
      }
    }
    const std::size_t half = order.size() / 2;
    for (std::size_t k = 0; k < order.size(); ++k) {
      (k < half ? out.first : out.second).push_back(sub.to_parent_edge[order[k]]);
    }
  }

  const EmbeddedPlanarGraph& g_;
  std::vector<std::uint8_t> mask_;
};

std::vector<std::uint32_t> node_multiplicity(const EmbeddedPlanarGraph& g,
                                             const std::vector<EdgeSet>& regions) {
  std::vector<std::uint32_t> count(g.node_count(), 0);
  std::vector<std::uint32_t> last(g.node_count(), std::numeric_limits<std::uint32_t>::max());
  for (std::uint32_t k = 0; k < regions.size(); ++k) {
    for (EdgeId e : regions[k]) {
      for (NodeId v : {g.edge(e).u, g.edge(e).v}) {
        if (last[v] != k) {
          last[v] = k;
          ++count[v];
        }
      }
    }
  }
  return count;
}

}  // namespace

std::vector<NodeId> region_nodes(const EmbeddedPlanarGraph& graph, std::span<const EdgeId> edges) {
  std::vector<NodeId> nodes;
  nodes.reserve(2 * edges.size());
  for (EdgeId e : edges) {
    nodes.push_back(graph.edge(e).u);
    nodes.push_back(graph.edge(e).v);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

RDivision compute_rdivision(const EmbeddedPlanarGraph& graph, std::uint64_t r,
                            const RDivisionOptions& options) {
  if (r == 0) throw InvalidParams("r must be positive");
  const std::size_t n = graph.node_count();
  const std::size_t m = graph.edge_count();
  RDivision div;
  div.r = r;

  RegionSplitter splitter(graph);
  std::vector<EdgeSet> done;
  std::deque<EdgeSet> work;
  work.emplace_back(m);
  std::iota(work.front().begin(), work.front().end(), 0);
  while (!work.empty()) {
    EdgeSet edges = std::move(work.front());
    work.pop_front();
    if (edges.size() <= r) {
      done.push_back(std::move(edges));
      continue;
    }
    auto [a, b] = splitter.split(edges, nullptr);
    work.push_back(std::move(a));
    work.push_back(std::move(b));
  }

  const auto limit = static_cast<std::size_t>(
      std::ceil(options.boundary_factor * std::sqrt(static_cast<double>(r))));
  for (std::uint32_t round = 0; round < options.max_boundary_rounds; ++round) {
    const auto mult = node_multiplicity(graph, done);
    std::vector<std::uint8_t> shared(n, 0);
    for (NodeId v = 0; v < n; ++v) shared[v] = mult[v] > 1;
    std::vector<EdgeSet> next;
    bool changed = false;
    for (EdgeSet& edges : done) {
      std::size_t count = 0;
      for (NodeId v : region_nodes(graph, edges)) count += shared[v];
      if (count <= limit || edges.size() < 2) {
        next.push_back(std::move(edges));
        continue;
      }
      auto [a, b] = splitter.split(edges, &shared);
      next.push_back(std::move(a));
      next.push_back(std::move(b));
      changed = true;
    }
    done = std::move(next);
    if (!changed) break;
  }

  std::sort(done.begin(), done.end(), [](const EdgeSet& a, const EdgeSet& b) {
    if (a.empty() || b.empty()) return !a.empty() && b.empty();
    return a.front() < b.front();
  });
  if (done.empty()) done.emplace_back();
  div.regions = std::move(done);

  const auto mult = node_multiplicity(graph, div.regions);
  div.is_boundary.assign(n, 0);
  div.home_region.assign(n, m == 0 ? 0 : std::numeric_limits<RegionId>::max());
  for (NodeId v = 0; v < n; ++v) {
    if (mult[v] > 1) {
      div.is_boundary[v] = 1;
      div.boundary.push_back(v);
    }
  }
  div.region_boundary.resize(div.regions.size());
  std::size_t max_edges = 0;
  std::size_t max_boundary = 0;
  for (RegionId k = 0; k < div.regions.size(); ++k) {
    for (NodeId v : region_nodes(graph, div.regions[k])) {
      div.home_region[v] = std::min(div.home_region[v], k);
      if (div.is_boundary[v]) div.region_boundary[k].push_back(v);
    }
    max_edges = std::max(max_edges, div.regions[k].size());
    max_boundary = std::max(max_boundary, div.region_boundary[k].size());
  }
  const double root_r = std::sqrt(static_cast<double>(r));
  div.c_r = static_cast<double>(max_edges) / static_cast<double>(r);
  div.c_b = static_cast<double>(max_boundary) / root_r;
  div.c_B = n == 0 ? 0.0 : static_cast<double>(div.boundary.size()) * root_r / static_cast<double>(n);
  return div;
}

std::span<const NodeId> boundary_of_region(const RDivision& division, RegionId region) {
  if (region >= division.region_boundary.size()) {
    throw UnknownRegion("region " + std::to_string(region) + " does not exist");
  }
  return division.region_boundary[region];
}

}  // namespace pado
