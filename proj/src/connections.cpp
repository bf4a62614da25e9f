#include "pado/connections.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <string>
#include <tuple>

namespace pado {

std::vector<EdgeId> path_edge_ids(const EmbeddedPlanarGraph& piece, const SeparatorPath& path) {
  std::vector<EdgeId> ids;
  for (std::size_t j = 0; j + 1 < path.nodes.size(); ++j) {
    const NodeId a = path.nodes[j];
    const NodeId b = path.nodes[j + 1];
    EdgeId best = kNoEdge;
    for (DartId d : piece.darts_of(a)) {
      const EdgeId e = edge_of(d);
      if (piece.head(d) != b || piece.is_synthetic(e)) continue;
      if (best == kNoEdge ||
          std::tie(piece.edge(e).length, piece.edge(e).tiebreak) <
              std::tie(piece.edge(best).length, piece.edge(best).tiebreak)) {
        best = e;
      }
    }
    if (best == kNoEdge) {
      throw InvalidParams("path nodes " + std::to_string(a) + " and " + std::to_string(b) +
                          " are not adjacent");
    }
    ids.push_back(best);
  }
  return ids;
}

CutPiece cut_along_path(const EmbeddedPlanarGraph& piece, const SeparatorPath& path) {
  const std::size_t n = piece.node_count();
  CutPiece out;
  out.copy_a = path;
  out.to_original.resize(n);
  for (NodeId v = 0; v < n; ++v) out.to_original[v] = v;
  if (path.nodes.size() <= 1) {
    out.graph = piece;
    out.copy_b = path;
    return out;
  }
  const std::size_t s = path.nodes.size() - 1;
  const auto m = static_cast<EdgeId>(piece.edge_count());
  const std::vector<EdgeId> pe = path_edge_ids(piece, path);
  auto copy = [n](std::size_t j) { return static_cast<NodeId>(n + j); };
  auto dart_from = [&](EdgeId e, NodeId tail) {
    return dart_of(e, piece.edge(e).u != tail);
  };

  std::vector<EdgeRecord> edges = piece.edges();
  std::vector<std::vector<DartId>> rotation(n + s + 1);
  for (NodeId v = 0; v < n; ++v) {
    const auto darts = piece.darts_of(v);
    rotation[v].assign(darts.begin(), darts.end());
  }
  for (std::size_t j = 1; j < s; ++j) {
    const NodeId v = path.nodes[j];
    const DartId d_prev = dart_from(pe[j - 1], v);
    const DartId d_next = dart_from(pe[j], v);
    const auto& around = rotation[v];
    const std::size_t deg = around.size();
    const std::size_t start = std::find(around.begin(), around.end(), d_next) - around.begin();
    std::vector<DartId> left;
    std::vector<DartId> right{dart_of(m + static_cast<EdgeId>(j) - 1, true)};
    std::size_t k = 0;
    for (; k < deg; ++k) {
      const DartId d = around[(start + k) % deg];
      left.push_back(d);
      if (d == d_prev) break;
    }
    for (++k; k < deg; ++k) {
      const DartId d = around[(start + k) % deg];
      right.push_back(d);
      EdgeRecord& rec = edges[edge_of(d)];
      ((d & 1u) ? rec.v : rec.u) = copy(j);
    }
    right.push_back(dart_of(m + static_cast<EdgeId>(j), false));
    rotation[v] = std::move(left);
    rotation[copy(j)] = std::move(right);
  }
  rotation[copy(0)] = {dart_of(m, false)};
  rotation[copy(s)] = {dart_of(m + static_cast<EdgeId>(s) - 1, true)};
  for (std::size_t j = 0; j < s; ++j) {
    EdgeRecord rec = piece.edge(pe[j]);
    rec.u = copy(j);
    rec.v = copy(j + 1);
    edges.push_back(rec);
  }

  out.graph = EmbeddedPlanarGraph::from_rotation(n + s + 1, std::move(edges), rotation);
  std::vector<NodeId> b_nodes(s + 1);
  for (std::size_t j = 0; j <= s; ++j) {
    b_nodes[j] = copy(j);
    out.to_original.push_back(path.nodes[j]);
  }
  out.copy_b = SeparatorPath{std::move(b_nodes), path.prefix_dist};
  return out;
}

AttachmentInfo nearest_attachment(const EmbeddedPlanarGraph& piece, const SeparatorPath& path) {
  const std::size_t n = piece.node_count();
  std::vector<std::uint8_t> zero(piece.edge_count(), 0);
  for (EdgeId e : path_edge_ids(piece, path)) zero[e] = 1;
  AttachmentInfo info;
  info.d_v.assign(n, kInfinity);
  info.i_of_v.assign(n, kNoIndex);
  std::vector<std::uint8_t> done(n, 0);
  using Entry = std::tuple<Length, std::uint32_t, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  // Seeding every p_j at distance 0 with its own index is the zeroed-path search
  // from p_0, with i(v) carried along as the last path node passed.
  for (std::uint32_t j = 0; j < path.nodes.size(); ++j) {
    const NodeId p = path.nodes[j];
    info.d_v[p] = 0.0;
    info.i_of_v[p] = j;
    done[p] = 1;
  }
  for (std::uint32_t j = 0; j < path.nodes.size(); ++j) heap.emplace(0.0, j, path.nodes[j]);
  while (!heap.empty()) {
    const auto [d, idx, u] = heap.top();
    heap.pop();
    if (d > info.d_v[u] || idx != info.i_of_v[u]) continue;
    done[u] = 1;
    for (DartId dart : piece.darts_of(u)) {
      const EdgeId e = edge_of(dart);
      const NodeId w = piece.head(dart);
      if (done[w]) continue;
      const Length nd = d + (zero[e] ? 0.0 : piece.length(e));
      if (nd < info.d_v[w] || (nd == info.d_v[w] && idx < info.i_of_v[w])) {
        info.d_v[w] = nd;
        info.i_of_v[w] = idx;
        heap.emplace(nd, idx, w);
      }
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (!done[v]) throw UnreachableNode("node " + std::to_string(v) + " cannot reach the path");
  }
  return info;
}

std::size_t ParentChangeStream::change_count() const {
  std::size_t total = 0;
  for (const auto& step : steps) total += step.size();
  return total;
}

void reroot(const EmbeddedPlanarGraph& piece, std::vector<DartId>& parent, NodeId root) {
  NodeId x = root;
  DartId carry = kNoDart;
  while (true) {
    const DartId up = parent[x];
    parent[x] = carry;
    if (up == kNoDart) break;
    carry = reverse_dart(up);
    x = piece.tail(up);
  }
}

SeparatorPath reversed_path(const SeparatorPath& path) {
  SeparatorPath r;
  r.nodes.assign(path.nodes.rbegin(), path.nodes.rend());
  const Length total = path.length();
  for (auto it = path.prefix_dist.rbegin(); it != path.prefix_dist.rend(); ++it) {
    r.prefix_dist.push_back(total - *it);
  }
  return r;
}

namespace {

Length root_path_length(const EmbeddedPlanarGraph& g, const std::vector<DartId>& parent, NodeId v) {
  Length len = 0.0;
  for (DartId d = parent[v]; d != kNoDart; d = parent[g.tail(d)]) len += g.length(edge_of(d));
  return len;
}

}  // namespace

ParentChangeStream parent_change_stream(const EmbeddedPlanarGraph& piece, const SeparatorPath& path,
                                        std::span<const NodeId> designated, bool record_changes) {
  ParentChangeStream stream;
  const std::size_t count = path.nodes.size();
  stream.steps.resize(count);
  if (!designated.empty()) stream.dist_to.assign(count, std::vector<Length>(designated.size()));
  DijkstraEngine engine(piece);
  std::vector<DartId> current;
  for (std::size_t i = 0; i < count; ++i) {
    const ShortestPathTree& tree = engine.run(path.nodes[i]);
    if (tree.order.size() != piece.node_count()) {
      throw UnreachableNode("piece is not connected to path node " + std::to_string(path.nodes[i]));
    }
    for (std::size_t k = 0; k < designated.size(); ++k) {
      stream.dist_to[i][k] = tree.dist[designated[k]];
    }
    if (i == 0) {
      stream.initial = tree;
      current = tree.parent_dart;
      continue;
    }
    if (!record_changes) continue;
    reroot(piece, current, path.nodes[i]);
    // Settle order of T_i: every new parent is final before its child changes.
    for (NodeId v : tree.order) {
      if (current[v] == tree.parent_dart[v]) continue;
      const Length before = root_path_length(piece, current, v);
      stream.steps[i].push_back({v, tree.parent_dart[v], tree.dist[v] - before});
      current[v] = tree.parent_dart[v];
    }
  }
  return stream;
}

std::uint32_t max_insertions_per_dart(const EmbeddedPlanarGraph& piece,
                                      const ParentChangeStream& stream) {
  std::vector<std::uint32_t> inserted(piece.dart_count(), 0);
  std::uint32_t worst = 0;
  for (const auto& step : stream.steps) {
    for (const ParentChange& c : step) {
      worst = std::max(worst, ++inserted[c.new_parent]);
    }
  }
  return worst;
}

void PhaseAudit::merge(const PhaseAudit& other) {
  max_per_node = std::max(max_per_node, other.max_per_node);
  connections += other.connections;
  min_potential_slack = std::min(min_potential_slack, other.min_potential_slack);
  max_mu_gap = std::max(max_mu_gap, other.max_mu_gap);
  non_initial += other.non_initial;
}

namespace {

// Current tree with child lists, for subtree updates in incremental mode.
class LiveTree {
 public:
  LiveTree(const EmbeddedPlanarGraph& g, const std::vector<DartId>& parent)
      : g_(g), parent_(parent), children_(g.node_count()) {
    for (NodeId v = 0; v < parent_.size(); ++v) {
      if (parent_[v] != kNoDart) children_[g_.tail(parent_[v])].push_back(v);
    }
  }

  DartId parent(NodeId v) const { return parent_[v]; }

  void set_parent(NodeId v, DartId d) {
    if (parent_[v] != kNoDart) {
      auto& sib = children_[g_.tail(parent_[v])];
      *std::find(sib.begin(), sib.end(), v) = sib.back();
      sib.pop_back();
    }
    parent_[v] = d;
    if (d != kNoDart) children_[g_.tail(d)].push_back(v);
  }

  void reroot(NodeId root) {
    std::vector<std::pair<NodeId, DartId>> updates;
    NodeId x = root;
    DartId carry = kNoDart;
    while (true) {
      const DartId up = parent_[x];
      updates.emplace_back(x, carry);
      if (up == kNoDart) break;
      carry = reverse_dart(up);
      x = g_.tail(up);
    }
    for (const auto& [v, d] : updates) set_parent(v, kNoDart);
    for (const auto& [v, d] : updates) set_parent(v, d);
  }

  template <typename F>
  void for_subtree(NodeId v, F&& f) {
    stack_.assign(1, v);
    while (!stack_.empty()) {
      const NodeId x = stack_.back();
      stack_.pop_back();
      f(x);
      stack_.insert(stack_.end(), children_[x].begin(), children_[x].end());
    }
  }

 private:
  const EmbeddedPlanarGraph& g_;
  std::vector<DartId> parent_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<NodeId> stack_;
};

struct PhaseInput {
  std::vector<std::uint32_t> i_of;  // per designated slot
  std::vector<Length> d;
};

PhaseResult run_phase(const EmbeddedPlanarGraph& piece, std::span<const NodeId> designated,
                      const SeparatorPath& path, double epsilon, const PhaseInput& in,
                      const ParentChangeStream& stream, const PhaseOptions& options) {
  const std::size_t slots = designated.size();
  const std::size_t count = path.nodes.size();
  if (stream.dist_to.size() != count) throw InvalidParams("stream lacks designated distances");
  const auto& prefix = path.prefix_dist;

  PhaseResult result;
  result.lists.resize(slots);
  std::vector<double> mu(slots, kInfinity);
  std::vector<std::uint32_t> last(slots, kNoIndex);
  std::vector<Length> last_dist(slots, 0.0);

  auto recomputed_mu = [&](std::size_t k, std::size_t i) {
    return epsilon * in.d[k] -
           (prefix[i] - prefix[last[k]] + last_dist[k] - stream.dist_to[i][k]);
  };

  const bool incremental = options.mu_mode == MuMode::incremental;
  std::vector<std::uint32_t> slot_of;
  std::optional<LiveTree> live;
  if (incremental) {
    if (stream.steps.size() != count) throw InvalidParams("incremental mode needs the full stream");
    slot_of.assign(piece.node_count(), kNoIndex);
    for (std::uint32_t k = 0; k < slots; ++k) slot_of[designated[k]] = k;
    live.emplace(piece, stream.initial.parent_dart);
  }
  auto add_to_subtree = [&](NodeId v, double amount) {
    live->for_subtree(v, [&](NodeId x) {
      const std::uint32_t k = slot_of[x];
      if (k != kNoIndex && mu[k] != kInfinity) mu[k] += amount;
    });
  };

  for (std::size_t i = 0; i < count; ++i) {
    if (incremental && i > 0) {
      const NodeId prev = path.nodes[i - 1];
      const NodeId here = path.nodes[i];
      const DartId up = live->parent(here);
      const bool single_edge = up != kNoDart && piece.tail(up) == prev;
      if (single_edge) {
        // The step along P adds len to dist(p_i, last); re-rooting shortens the
        // root path of p_i's old subtree by len and lengthens the rest by len.
        add_to_subtree(here, -2.0 * (prefix[i] - prefix[i - 1]));
      }
      live->reroot(here);
      for (const ParentChange& c : stream.steps[i]) {
        add_to_subtree(c.node, c.delta);
        live->set_parent(c.node, c.new_parent);
      }
      if (!single_edge) {
        for (std::size_t k = 0; k < slots; ++k) {
          if (mu[k] != kInfinity) mu[k] = recomputed_mu(k, i);
        }
      }
    }
    for (std::size_t k = 0; k < slots; ++k) {
      if (i < in.i_of[k]) continue;
      const Length dist = stream.dist_to[i][k];
      if (in.d[k] == 0.0) {
        if (i == in.i_of[k]) result.lists[k].push_back({static_cast<std::uint32_t>(i), dist});
        continue;
      }
      double current = kInfinity;
      if (last[k] != kNoIndex) {
        const double exact = recomputed_mu(k, i);
        if (incremental) {
          current = mu[k];
          if (options.shadow_audit) {
            result.audit.max_mu_gap = std::max(result.audit.max_mu_gap, std::abs(current - exact));
          }
        } else {
          current = exact;
        }
      }
      if (i != in.i_of[k] && current > 0.0) continue;
      if (last[k] != kNoIndex) {
        const double required = epsilon * in.d[k];
        const double decrease = prefix[i] - prefix[last[k]] + last_dist[k] - dist;
        result.audit.min_potential_slack =
            std::min(result.audit.min_potential_slack, (decrease - required) / required);
        ++result.audit.non_initial;
      }
      result.lists[k].push_back({static_cast<std::uint32_t>(i), dist});
      mu[k] = epsilon * in.d[k];
      last[k] = static_cast<std::uint32_t>(i);
      last_dist[k] = dist;
    }
  }
  for (const auto& list : result.lists) {
    result.audit.connections += list.size();
    result.audit.max_per_node =
        std::max(result.audit.max_per_node, static_cast<std::uint32_t>(list.size()));
  }
  return result;
}

PhaseInput phase_input(std::span<const NodeId> designated, const AttachmentInfo& att) {
  PhaseInput in;
  for (NodeId v : designated) {
    in.i_of.push_back(att.i_of_v[v]);
    in.d.push_back(att.d_v[v]);
  }
  return in;
}

// A table-only stream for the reversed path, reusing the forward distances.
ParentChangeStream reversed_table(const ParentChangeStream& forward) {
  ParentChangeStream r;
  r.dist_to.assign(forward.dist_to.rbegin(), forward.dist_to.rend());
  return r;
}

}  // namespace

PhaseResult forward_phase(const EmbeddedPlanarGraph& piece, std::span<const NodeId> designated,
                          const SeparatorPath& path, double epsilon,
                          const AttachmentInfo& attachments, const ParentChangeStream& stream,
                          const PhaseOptions& options) {
  if (!(epsilon > 0.0)) throw InvalidParams("epsilon must be positive");
  return run_phase(piece, designated, path, epsilon, phase_input(designated, attachments), stream,
                   options);
}

PhaseResult backward_phase(const EmbeddedPlanarGraph& piece, std::span<const NodeId> designated,
                           const SeparatorPath& path, double epsilon,
                           const AttachmentInfo& attachments,
                           const ParentChangeStream& reversed_stream,
                           const PhaseOptions& options) {
  if (!(epsilon > 0.0)) throw InvalidParams("epsilon must be positive");
  const auto s = static_cast<std::uint32_t>(path.nodes.size() - 1);
  PhaseInput in = phase_input(designated, attachments);
  for (auto& i : in.i_of) i = s - i;
  PhaseResult result =
      run_phase(piece, designated, reversed_path(path), epsilon, in, reversed_stream, options);
  for (auto& list : result.lists) {
    for (auto& c : list) c.path_index = s - c.path_index;
    std::reverse(list.begin(), list.end());
  }
  return result;
}

ConnectionList merge_connection_lists(std::span<const Connection> a, std::span<const Connection> b) {
  ConnectionList out;
  out.reserve(a.size() + b.size());
  std::size_t x = 0;
  std::size_t y = 0;
  while (x < a.size() || y < b.size()) {
    Connection next;
    if (y == b.size() || (x < a.size() && a[x].path_index < b[y].path_index)) {
      next = a[x++];
    } else if (x == a.size() || b[y].path_index < a[x].path_index) {
      next = b[y++];
    } else {
      next = {a[x].path_index, std::min(a[x].dist, b[y].dist)};
      ++x;
      ++y;
    }
    if (!out.empty() && out.back().path_index == next.path_index) {
      out.back().dist = std::min(out.back().dist, next.dist);
    } else {
      out.push_back(next);
    }
  }
  return out;
}

namespace {

PathConnectionResult direct_connections(const EmbeddedPlanarGraph& piece,
                                        std::span<const NodeId> designated,
                                        const SeparatorPath& path, double epsilon,
                                        const PhaseOptions& options) {
  PathConnectionResult out;
  const AttachmentInfo att = nearest_attachment(piece, path);
  const ParentChangeStream fs = parent_change_stream(piece, path, designated, true);
  out.max_dart_insertions = max_insertions_per_dart(piece, fs);
  ParentChangeStream rs = options.mu_mode == MuMode::incremental
                              ? parent_change_stream(piece, reversed_path(path), designated, true)
                              : reversed_table(fs);
  PhaseResult fw = forward_phase(piece, designated, path, epsilon, att, fs, options);
  PhaseResult bw = backward_phase(piece, designated, path, epsilon, att, rs, options);
  out.audit = fw.audit;
  out.audit.merge(bw.audit);
  out.lists.resize(designated.size());
  for (std::size_t k = 0; k < designated.size(); ++k) {
    out.lists[k] = merge_connection_lists(fw.lists[k], bw.lists[k]);
  }
  return out;
}

}  // namespace

PathConnectionResult path_connections(const EmbeddedPlanarGraph& piece,
                                      std::span<const NodeId> designated,
                                      const SeparatorPath& path, double epsilon,
                                      const PathConnectionOptions& options) {
  if (!(epsilon > 0.0)) throw InvalidParams("epsilon must be positive");
  if (path.nodes.empty()) throw InvalidParams("empty separator path");
  if (designated.empty()) return {};
  if (options.mode == CutMode::direct || path.nodes.size() == 1) {
    return direct_connections(piece, designated, path, epsilon, options.phase);
  }

  PathConnectionResult out;
  out.lists.resize(designated.size());
  std::vector<std::uint32_t> on_path(piece.node_count(), kNoIndex);
  for (std::uint32_t j = 0; j < path.nodes.size(); ++j) on_path[path.nodes[j]] = j;
  std::vector<NodeId> rest;
  std::vector<std::size_t> rest_slot;
  for (std::size_t k = 0; k < designated.size(); ++k) {
    const std::uint32_t j = on_path[designated[k]];
    if (j != kNoIndex) {
      out.lists[k] = {{j, 0.0}};
    } else {
      rest.push_back(designated[k]);
      rest_slot.push_back(k);
    }
  }
  if (rest.empty()) return out;

  const CutPiece cut = cut_along_path(piece, path);
  const Components comps = connected_components(cut.graph);
  for (const SeparatorPath* copy : {&cut.copy_a, &cut.copy_b}) {
    // A copy whose side of P carries no edges is a detached chain; it then
    // reaches no designated node and contributes nothing.
    const std::uint32_t home = comps.component_of[copy->nodes.front()];
    std::vector<NodeId> nodes;
    for (NodeId v = 0; v < cut.graph.node_count(); ++v) {
      if (comps.component_of[v] == home) nodes.push_back(v);
    }
    std::vector<NodeId> local(cut.graph.node_count(), kNoNode);
    for (NodeId i = 0; i < nodes.size(); ++i) local[nodes[i]] = i;
    std::vector<NodeId> local_rest;
    std::vector<std::size_t> local_slot;
    for (std::size_t r = 0; r < rest.size(); ++r) {
      if (local[rest[r]] == kNoNode) continue;
      local_rest.push_back(local[rest[r]]);
      local_slot.push_back(rest_slot[r]);
    }
    if (local_rest.empty()) continue;
    SeparatorPath local_path = *copy;
    for (NodeId& v : local_path.nodes) v = local[v];
    const Subgraph sub = induced_subgraph(cut.graph, nodes);
    PathConnectionResult part =
        direct_connections(sub.graph, local_rest, local_path, epsilon, options.phase);
    out.audit.merge(part.audit);
    out.max_dart_insertions = std::max(out.max_dart_insertions, part.max_dart_insertions);
    for (std::size_t r = 0; r < local_rest.size(); ++r) {
      auto& target = out.lists[local_slot[r]];
      target = merge_connection_lists(target, part.lists[r]);
    }
  }
  return out;
}

bool verify_cover(const EmbeddedPlanarGraph& piece, NodeId v, const SeparatorPath& path,
                  std::span<const Connection> connections, double epsilon) {
  const ShortestPathTree tree = shortest_path_tree(piece, v);
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    const Length exact = tree.dist[path.nodes[i]];
    if (exact == kInfinity) continue;
    const double bound = (1.0 + epsilon) * exact * (1.0 + 1e-9);
    bool covered = false;
    for (const Connection& c : connections) {
      if (c.path_index >= path.nodes.size()) continue;
      if (path.between(i, c.path_index) + c.dist <= bound) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

}  // namespace pado
