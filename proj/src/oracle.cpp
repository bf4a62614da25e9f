#include "pado/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <string>
#include <tuple>
#include <type_traits>

namespace pado {

OracleParams make_params(double epsilon, double c_ell, std::size_t node_count) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidParams("epsilon must be positive");
  if (!(c_ell > 0.0) || !std::isfinite(c_ell)) throw InvalidParams("c_ell must be positive");
  OracleParams p;
  p.epsilon = epsilon;
  p.c_ell = c_ell;
  const double n = static_cast<double>(std::max<std::size_t>(node_count, 1));
  double ell = std::round(c_ell / epsilon * std::log(n));
  ell = std::clamp(ell, 1.0, n);
  p.ell = static_cast<std::uint32_t>(ell);
  p.r = static_cast<std::uint64_t>(p.ell) * p.ell;
  return p;
}

std::uint32_t ConnectionStore::slot_of(NodeId v) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
  if (it == nodes.end() || *it != v) return kNoIndex;
  return static_cast<std::uint32_t>(it - nodes.begin());
}

namespace {

struct Tagged {
  std::uint32_t pos;
  std::uint8_t side;
  Length value;
  NodeId b;
};

// The scan behind merge_scan; also reports which entries realize the minimum.
template <typename Entry>
Length scan(std::span<const Entry> entries, std::span<const Length> prefix, NodeId* arg_s,
            NodeId* arg_t) {
  Length m_s = kInfinity;
  Length m_t = kInfinity;
  Length d = kInfinity;
  NodeId at_s = kNoNode;
  NodeId at_t = kNoNode;
  std::uint32_t last = 0;
  for (const Entry& e : entries) {
    const Length inc = prefix[e.pos] - prefix[last];
    m_s += inc;
    m_t += inc;
    last = e.pos;
    if (e.side == 0) {
      if (e.value < m_s) {
        m_s = e.value;
        if constexpr (std::is_same_v<Entry, Tagged>) at_s = e.b;
      }
    } else if (e.value < m_t) {
      m_t = e.value;
      if constexpr (std::is_same_v<Entry, Tagged>) at_t = e.b;
    }
    if (m_s + m_t < d) {
      d = m_s + m_t;
      if (arg_s != nullptr) {
        *arg_s = at_s;
        *arg_t = at_t;
      }
    }
  }
  return d;
}

}  // namespace

Length merge_scan(std::span<const ScanEntry> entries, std::span<const Length> prefix) {
  return scan(entries, prefix, nullptr, nullptr);
}

void RegionGraph::build_adjacency() {
  nodes.clear();
  for (const Edge& e : edges) {
    nodes.push_back(e.u);
    nodes.push_back(e.v);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  offsets.assign(nodes.size() + 1, 0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ends;
  ends.reserve(edges.size());
  for (const Edge& e : edges) {
    const std::uint32_t a = local(e.u);
    const std::uint32_t b = local(e.v);
    ends.emplace_back(a, b);
    ++offsets[a + 1];
    ++offsets[b + 1];
  }
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
  adj.assign(offsets.back(), {0, 0.0});
  std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [a, b] = ends[k];
    adj[fill[a]++] = {b, edges[k].length};
    adj[fill[b]++] = {a, edges[k].length};
  }
}

std::uint32_t RegionGraph::local(NodeId v) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
  if (it == nodes.end() || *it != v) return kNoIndex;
  return static_cast<std::uint32_t>(it - nodes.begin());
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct PendingKey {
  DecompId x;
  std::uint8_t selector;
  ConnectionList list;
};

}  // namespace

DistanceOracle DistanceOracle::preprocess(const EmbeddedPlanarGraph& graph,
                                          const OracleParams& params,
                                          const PreprocessOptions& options,
                                          PreprocessReport* report) {
  validate(graph);
  if (!(params.epsilon > 0.0) || params.r == 0 || params.ell == 0) {
    throw InvalidParams("oracle parameters must be positive");
  }
  const std::size_t n = graph.node_count();
  PreprocessReport local_report;
  PreprocessReport& rep = report != nullptr ? *report : local_report;
  rep = {};

  DistanceOracle oracle;
  oracle.params_ = params;

  auto clock = std::chrono::steady_clock::now();
  const RDivision div = compute_rdivision(graph, params.r, options.rdivision);
  rep.seconds_rdivision = seconds_since(clock);
  rep.regions = div.region_count();
  rep.boundary_nodes = div.boundary.size();
  rep.c_r = div.c_r;
  rep.c_b = div.c_b;
  rep.c_B = div.c_B;
  for (const auto& region : div.regions) {
    RegionGraph rg;
    for (EdgeId e : region) rg.edges.push_back({graph.edge(e).u, graph.edge(e).v, graph.length(e)});
    oracle.regions_.push_back(std::move(rg));
  }
  oracle.home_region_ = div.home_region;

  clock = std::chrono::steady_clock::now();
  DecompositionTree tree = build_decomposition(graph);
  rep.seconds_decomposition = seconds_since(clock);
  rep.decomposition_depth = tree.depth();
  rep.decomposition_nodes = tree.nodes.size();
  rep.c_d = n > 1 ? rep.decomposition_depth / (std::log(static_cast<double>(n)) / std::log(1.5)) : 0.0;

  clock = std::chrono::steady_clock::now();
  std::vector<std::vector<PendingKey>> pending(div.boundary.size());
  auto slot = [&](NodeId v) {
    return static_cast<std::size_t>(std::lower_bound(div.boundary.begin(), div.boundary.end(), v) -
                                    div.boundary.begin());
  };
  for (DecompId x = 0; x < tree.nodes.size(); ++x) {
    const DecompNode& node = tree.nodes[x];
    if (!node.has_separator()) continue;
    std::vector<NodeId> piece_boundary;
    for (NodeId v : node.piece_nodes) {
      if (div.is_boundary[v]) piece_boundary.push_back(v);
    }
    if (piece_boundary.empty()) continue;

    // The separator lives in one component of G(x); other components see no path.
    const Subgraph whole = induced_subgraph(graph, node.piece_nodes);
    const Components comps = connected_components(whole.graph);
    const auto at = [&](NodeId v) {
      return static_cast<NodeId>(
          std::lower_bound(node.piece_nodes.begin(), node.piece_nodes.end(), v) -
          node.piece_nodes.begin());
    };
    const std::uint32_t home = comps.component_of[at(node.paths[0].nodes[0])];
    std::vector<NodeId> members;
    for (NodeId i = 0; i < node.piece_nodes.size(); ++i) {
      if (comps.component_of[i] == home) members.push_back(node.piece_nodes[i]);
    }
    const Subgraph piece = induced_subgraph(graph, members);
    auto to_local = [&](NodeId v) {
      const auto it = std::lower_bound(members.begin(), members.end(), v);
      return (it != members.end() && *it == v) ? static_cast<NodeId>(it - members.begin()) : kNoNode;
    };
    std::vector<NodeId> designated;
    std::vector<NodeId> outside;
    for (NodeId v : piece_boundary) {
      const NodeId l = to_local(v);
      if (l == kNoNode) outside.push_back(v);
      else designated.push_back(l);
    }
    ++rep.pieces_processed;
    for (std::uint8_t sel = 0; sel < 2; ++sel) {
      SeparatorPath path = node.paths[sel];
      for (NodeId& v : path.nodes) v = to_local(v);
      PathConnectionResult result;
      if (!designated.empty()) {
        result = path_connections(piece.graph, designated, path, params.epsilon, options.connections);
        rep.audit.merge(result.audit);
        rep.max_dart_insertions = std::max(rep.max_dart_insertions, result.max_dart_insertions);
        if (options.on_piece) {
          PieceContext ctx;
          ctx.x = x;
          ctx.selector = sel;
          ctx.piece = &piece.graph;
          ctx.path = &path;
          ctx.designated = designated;
          ctx.to_global = piece.to_parent_node;
          ctx.result = &result;
          options.on_piece(ctx);
        }
      }
      for (std::size_t k = 0; k < designated.size(); ++k) {
        pending[slot(members[designated[k]])].push_back({x, sel, std::move(result.lists[k])});
      }
      for (NodeId v : outside) pending[slot(v)].push_back({x, sel, {}});
    }
  }

  ConnectionStore& store = oracle.store_;
  store.nodes = div.boundary;
  for (auto& keys : pending) {
    // Decomposition ids grow from the root, so this is root-first order.
    std::stable_sort(keys.begin(), keys.end(), [](const PendingKey& a, const PendingKey& b) {
      return std::tie(a.x, a.selector) < std::tie(b.x, b.selector);
    });
    for (PendingKey& key : keys) {
      store.key_node.push_back(key.x);
      store.key_selector.push_back(key.selector);
      for (const Connection& c : key.list) {
        store.conn_pos.push_back(c.path_index);
        store.conn_dist.push_back(c.dist);
      }
      store.conn_offset.push_back(store.conn_pos.size());
      ConnectionList().swap(key.list);
    }
    store.key_offset.push_back(store.key_node.size());
  }
  rep.seconds_connections = seconds_since(clock);
  rep.connections = store.total_connections();
  rep.c_space = n > 0 ? static_cast<double>(rep.connections) / static_cast<double>(n) : 0.0;

  tree.discard_pieces();
  oracle.skeleton_.reserve(tree.nodes.size());
  for (DecompNode& node : tree.nodes) {
    oracle.skeleton_.push_back({node.parent, node.depth, std::move(node.paths)});
  }
  oracle.leafmost_ = std::move(tree.leafmost);
  oracle.finish();
  return oracle;
}

DistanceOracle DistanceOracle::assemble(OracleParams params, std::vector<RegionGraph> regions,
                                        std::vector<RegionId> home_region,
                                        std::vector<SkeletonNode> skeleton,
                                        std::vector<DecompId> leafmost, ConnectionStore store) {
  DistanceOracle oracle;
  oracle.params_ = params;
  oracle.regions_ = std::move(regions);
  oracle.home_region_ = std::move(home_region);
  oracle.skeleton_ = std::move(skeleton);
  oracle.leafmost_ = std::move(leafmost);
  oracle.store_ = std::move(store);
  oracle.finish();
  return oracle;
}

void DistanceOracle::finish() {
  const std::size_t n = home_region_.size();
  std::vector<std::uint32_t> count(n, 0);
  for (RegionGraph& region : regions_) {
    region.build_adjacency();
    for (NodeId v : region.nodes) ++count[v];
  }
  region_boundary_.assign(regions_.size(), {});
  for (RegionId k = 0; k < regions_.size(); ++k) {
    for (NodeId v : regions_[k].nodes) {
      if (count[v] > 1) region_boundary_[k].push_back(v);
    }
  }
  slot_of_.assign(n, kNoIndex);
  for (std::uint32_t k = 0; k < store_.nodes.size(); ++k) slot_of_[store_.nodes[k]] = k;
}

std::vector<Length> DistanceOracle::region_search(RegionId region, NodeId v,
                                                  std::uint64_t& scanned) const {
  const RegionGraph& g = regions_[region];
  std::vector<Length> dist(g.nodes.size(), kInfinity);
  const std::uint32_t root = g.local(v);
  if (root == kNoIndex) return dist;
  using Entry = std::pair<Length, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[root] = 0.0;
  heap.emplace(0.0, root);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    ++scanned;
    for (std::uint32_t k = g.offsets[u]; k < g.offsets[u + 1]; ++k) {
      const auto [w, len] = g.adj[k];
      if (d + len < dist[w]) {
        dist[w] = d + len;
        heap.emplace(dist[w], w);
      }
    }
  }
  return dist;
}

QueryResult DistanceOracle::query(NodeId s, NodeId t) const {
  const std::size_t n = node_count();
  if (s >= n || t >= n) {
    throw UnknownNode("node " + std::to_string(s >= n ? s : t) + " is not in the graph");
  }
  QueryResult result;
  if (s == t) {
    result.estimate = 0.0;
    result.witness.kind = Witness::Kind::same_node;
    return result;
  }
  const RegionId rs = home_region_[s];
  const RegionId rt = home_region_[t];
  const std::vector<Length> ds = region_search(rs, s, result.nodes_scanned);
  const std::vector<Length> dt = region_search(rt, t, result.nodes_scanned);
  const RegionGraph& gs = regions_[rs];
  const RegionGraph& gt = regions_[rt];

  auto offer = [&](Length value, const Witness& w) {
    if (value < result.estimate) {
      result.estimate = value;
      result.witness = w;
    }
  };
  if (const std::uint32_t lt = gs.local(t); lt != kNoIndex) {
    offer(ds[lt], {Witness::Kind::intra_region, kNoNode, kNoNode, kNoDecomp, 0});
  }
  if (const std::uint32_t ls = gt.local(s); ls != kNoIndex) {
    offer(dt[ls], {Witness::Kind::intra_region, kNoNode, kNoNode, kNoDecomp, 0});
  }

  // Boundary nodes reached on each side, with their region distances.
  auto reached = [&](RegionId region, const RegionGraph& g, const std::vector<Length>& d) {
    std::vector<std::pair<NodeId, Length>> out;
    for (NodeId b : region_boundary_[region]) {
      const Length value = d[g.local(b)];
      if (value != kInfinity) out.emplace_back(b, value);
    }
    return out;
  };
  const auto side_s = reached(rs, gs, ds);
  const auto side_t = reached(rt, gt, dt);
  {
    std::size_t j = 0;
    for (const auto& [b, value] : side_s) {
      while (j < side_t.size() && side_t[j].first < b) ++j;
      if (j < side_t.size() && side_t[j].first == b) {
        offer(value + side_t[j].second, {Witness::Kind::shared_boundary, b, b, kNoDecomp, 0});
      }
    }
  }

  struct Item {
    std::uint64_t key;
    Tagged entry;
  };
  std::vector<Item> items;
  auto gather = [&](const std::vector<std::pair<NodeId, Length>>& side, std::uint8_t tag) {
    for (const auto& [b, value] : side) {
      const std::uint32_t slot = slot_of_[b];
      if (slot == kNoIndex) continue;
      for (std::uint64_t j = store_.key_offset[slot]; j < store_.key_offset[slot + 1]; ++j) {
        const std::uint64_t key = (static_cast<std::uint64_t>(store_.key_node[j]) << 1) |
                                  store_.key_selector[j];
        for (std::uint64_t c = store_.conn_offset[j]; c < store_.conn_offset[j + 1]; ++c) {
          items.push_back({key, {store_.conn_pos[c], tag, value + store_.conn_dist[c], b}});
        }
      }
    }
  };
  gather(side_s, 0);
  gather(side_t, 1);
  result.connections_scanned = items.size();
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return std::tie(a.key, a.entry.pos, a.entry.side, a.entry.value, a.entry.b) <
           std::tie(b.key, b.entry.pos, b.entry.side, b.entry.value, b.entry.b);
  });

  std::vector<Tagged> run;
  for (std::size_t lo = 0; lo < items.size();) {
    std::size_t hi = lo;
    bool has[2] = {false, false};
    while (hi < items.size() && items[hi].key == items[lo].key) has[items[hi++].entry.side] = true;
    if (has[0] && has[1]) {
      run.clear();
      for (std::size_t k = lo; k < hi; ++k) run.push_back(items[k].entry);
      const auto x = static_cast<DecompId>(items[lo].key >> 1);
      const auto sel = static_cast<std::uint8_t>(items[lo].key & 1u);
      NodeId bs = kNoNode;
      NodeId bt = kNoNode;
      const Length d = scan<Tagged>(run, skeleton_[x].paths[sel].prefix_dist, &bs, &bt);
      offer(d, {Witness::Kind::separator, bs, bt, x, sel});
    }
    lo = hi;
  }
  return result;
}

}  // namespace pado
