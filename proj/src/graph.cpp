#include "pado/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pado {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void fill_default_tiebreaks(std::vector<EdgeRecord>& edges) {
  for (EdgeId e = 0; e < edges.size(); ++e) {
    if (edges[e].tiebreak == 0) edges[e].tiebreak = default_tiebreak(e);
  }
}

}  // namespace

std::uint64_t default_tiebreak(EdgeId e) {
  return (splitmix64(0x5eedULL ^ (static_cast<std::uint64_t>(e) << 1)) >> 24) | 1u;
}

EmbeddedPlanarGraph EmbeddedPlanarGraph::from_rotation(
    std::size_t node_count, std::vector<EdgeRecord> edges,
    const std::vector<std::vector<DartId>>& rotation, std::vector<Point> coords) {
  if (!coords.empty() && coords.size() != node_count) {
    throw NotPlanarEmbedding("coordinate count does not match node count");
  }
  if (rotation.size() != node_count) {
    throw NotPlanarEmbedding("rotation has " + std::to_string(rotation.size()) +
                             " lists for " + std::to_string(node_count) + " nodes");
  }
  EmbeddedPlanarGraph g;
  fill_default_tiebreaks(edges);
  for (const auto& e : edges) {
    if (e.u >= node_count || e.v >= node_count) {
      throw NotPlanarEmbedding("edge endpoint out of range");
    }
  }
  g.edges_ = std::move(edges);
  const std::size_t darts = g.dart_count();
  g.next_ccw_.assign(darts, kNoDart);
  g.prev_ccw_.assign(darts, kNoDart);
  g.first_dart_.assign(node_count, kNoDart);
  std::vector<std::uint8_t> seen(darts, 0);
  for (NodeId v = 0; v < node_count; ++v) {
    const auto& list = rotation[v];
    for (std::size_t i = 0; i < list.size(); ++i) {
      const DartId d = list[i];
      if (d >= darts || seen[d]) {
        throw NotPlanarEmbedding("rotation of node " + std::to_string(v) +
                                 " repeats or names an unknown dart");
      }
      if (g.tail(d) != v) {
        throw NotPlanarEmbedding("rotation of node " + std::to_string(v) +
                                 " lists a dart of another node");
      }
      seen[d] = 1;
      const DartId next = list[(i + 1) % list.size()];
      g.next_ccw_[d] = next;
      g.prev_ccw_[next] = d;
    }
    if (!list.empty()) g.first_dart_[v] = list.front();
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw NotPlanarEmbedding("rotation misses some darts");
  }
  g.rebuild_adjacency();
  g.coords_ = std::move(coords);
  return g;
}

EmbeddedPlanarGraph EmbeddedPlanarGraph::from_coordinates(std::vector<Point> coords,
                                                          std::vector<EdgeRecord> edges) {
  const std::size_t n = coords.size();
  std::vector<std::vector<DartId>> rotation(n);
  for (EdgeId e = 0; e < edges.size(); ++e) {
    if (edges[e].u >= n || edges[e].v >= n) {
      throw NotPlanarEmbedding("edge endpoint out of range");
    }
    rotation[edges[e].u].push_back(dart_of(e, false));
    rotation[edges[e].v].push_back(dart_of(e, true));
  }
  for (NodeId v = 0; v < n; ++v) {
    auto angle = [&](DartId d) {
      const auto& e = edges[edge_of(d)];
      const NodeId w = (d & 1u) ? e.u : e.v;
      return std::atan2(coords[w].y - coords[v].y, coords[w].x - coords[v].x);
    };
    std::vector<std::pair<double, DartId>> keyed;
    keyed.reserve(rotation[v].size());
    for (DartId d : rotation[v]) keyed.emplace_back(angle(d), d);
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < keyed.size(); ++i) rotation[v][i] = keyed[i].second;
  }
  return from_rotation(n, std::move(edges), rotation, std::move(coords));
}

Length EmbeddedPlanarGraph::total_original_length() const {
  Length total = 0.0;
  for (const auto& e : edges_) {
    if (!e.synthetic) total += e.length;
  }
  return total;
}

EdgeId EmbeddedPlanarGraph::insert_edge(DartId after_at_u, DartId after_at_v, Length length,
                                        bool synthetic) {
  const EdgeId e = static_cast<EdgeId>(edges_.size());
  EdgeRecord rec;
  rec.u = tail(after_at_u);
  rec.v = tail(after_at_v);
  rec.length = length;
  rec.synthetic = synthetic;
  rec.tiebreak = default_tiebreak(e);
  edges_.push_back(rec);
  next_ccw_.resize(dart_count(), kNoDart);
  prev_ccw_.resize(dart_count(), kNoDart);
  auto splice = [&](DartId after, DartId d) {
    const DartId next = next_ccw_[after];
    next_ccw_[after] = d;
    prev_ccw_[d] = after;
    next_ccw_[d] = next;
    prev_ccw_[next] = d;
  };
  splice(after_at_u, dart_of(e, false));
  splice(after_at_v, dart_of(e, true));
  return e;
}

void EmbeddedPlanarGraph::rebuild_adjacency() {
  const std::size_t n = node_count();
  adj_offsets_.assign(n + 1, 0);
  adj_darts_.clear();
  adj_darts_.reserve(dart_count());
  for (NodeId v = 0; v < n; ++v) {
    adj_offsets_[v] = static_cast<std::uint32_t>(adj_darts_.size());
    const DartId first = first_dart_[v];
    if (first == kNoDart) continue;
    DartId d = first;
    do {
      adj_darts_.push_back(d);
      d = next_ccw_[d];
    } while (d != first && adj_darts_.size() <= dart_count());
  }
  adj_offsets_[n] = static_cast<std::uint32_t>(adj_darts_.size());
}

FaceStructure trace_faces(const EmbeddedPlanarGraph& graph) {
  FaceStructure fs;
  const std::size_t darts = graph.dart_count();
  fs.face_of.assign(darts, kNoDart);
  for (DartId start = 0; start < darts; ++start) {
    if (fs.face_of[start] != kNoDart) continue;
    const auto face = static_cast<std::uint32_t>(fs.faces.size());
    std::vector<DartId> walk;
    DartId d = start;
    while (fs.face_of[d] == kNoDart) {
      fs.face_of[d] = face;
      walk.push_back(d);
      d = graph.face_next(d);
    }
    fs.faces.push_back(std::move(walk));
  }
  return fs;
}

Components connected_components(const EmbeddedPlanarGraph& graph,
                                std::span<const std::uint8_t> edge_mask) {
  Components c;
  const std::size_t n = graph.node_count();
  c.component_of.assign(n, kNoNode);
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (c.component_of[s] != kNoNode) continue;
    c.component_of[s] = c.count;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (DartId d : graph.darts_of(v)) {
        if (!edge_mask.empty() && !edge_mask[edge_of(d)]) continue;
        const NodeId w = graph.head(d);
        if (c.component_of[w] == kNoNode) {
          c.component_of[w] = c.count;
          stack.push_back(w);
        }
      }
    }
    ++c.count;
  }
  return c;
}

GraphDiagnostics validate(const EmbeddedPlanarGraph& graph) {
  GraphDiagnostics diag;
  diag.node_count = graph.node_count();
  diag.edge_count = graph.edge_count();
  if (graph.node_count() == 0) throw NotPlanarEmbedding("graph has no nodes");
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const auto& rec = graph.edge(e);
    if (!std::isfinite(rec.length) || rec.length < 0.0) {
      throw NegativeLength("edge " + std::to_string(e) + " has length " +
                           std::to_string(rec.length));
    }
    if (rec.u == rec.v) throw NotPlanarEmbedding("edge " + std::to_string(e) + " is a self-loop");
    if (rec.synthetic) ++diag.synthetic_edges;
  }
  // Rotation must be one cycle per node holding exactly that node's darts.
  std::size_t visited = 0;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    for (DartId d : graph.darts_of(v)) {
      if (graph.tail(d) != v || graph.prev_ccw(graph.next_ccw(d)) != d) {
        throw NotPlanarEmbedding("rotation around node " + std::to_string(v) + " is broken");
      }
    }
    visited += graph.degree(v);
  }
  if (visited != graph.dart_count()) throw NotPlanarEmbedding("rotation is not a permutation");

  const Components comps = connected_components(graph);
  if (comps.count > 1) {
    throw Disconnected("graph has " + std::to_string(comps.count) + " components");
  }
  const FaceStructure fs = trace_faces(graph);
  diag.face_count = graph.edge_count() == 0 ? 1 : fs.faces.size();
  for (const auto& f : fs.faces) diag.max_face_degree = std::max(diag.max_face_degree, f.size());
  const auto euler = static_cast<long long>(diag.node_count) -
                     static_cast<long long>(diag.edge_count) +
                     static_cast<long long>(diag.face_count);
  if (euler != 2) {
    throw NotPlanarEmbedding("Euler characteristic is " + std::to_string(euler) + ", expected 2");
  }
  diag.triangulated = std::all_of(fs.faces.begin(), fs.faces.end(),
                                  [](const auto& f) { return f.size() == 3; });
  return diag;
}

bool is_planar_embedding(const EmbeddedPlanarGraph& graph) {
  const Components comps = connected_components(graph);
  std::vector<long long> chi(comps.count, 0);
  std::vector<std::size_t> edges(comps.count, 0);
  for (NodeId v = 0; v < graph.node_count(); ++v) ++chi[comps.component_of[v]];
  for (const auto& e : graph.edges()) {
    --chi[comps.component_of[e.u]];
    ++edges[comps.component_of[e.u]];
  }
  const FaceStructure fs = trace_faces(graph);
  for (const auto& f : fs.faces) ++chi[comps.component_of[graph.tail(f.front())]];
  for (std::uint32_t c = 0; c < comps.count; ++c) {
    // An isolated node has no dart and hence no traced face.
    if (edges[c] == 0) continue;
    if (chi[c] != 2) return false;
  }
  return true;
}

EmbeddedPlanarGraph triangulate(const EmbeddedPlanarGraph& graph) {
  validate(graph);
  EmbeddedPlanarGraph result = graph;
  if (graph.node_count() < 3) return result;
  const Length big = 1.0 + graph.total_original_length();
  const FaceStructure fs = trace_faces(graph);
  std::vector<std::uint32_t> occurrences(graph.node_count(), 0);
  for (const auto& face : fs.faces) {
    const std::size_t k = face.size();
    if (k <= 3) continue;
    for (DartId d : face) ++occurrences[graph.tail(d)];
    std::size_t start = k;
    for (std::size_t i = 0; i < k; ++i) {
      if (occurrences[graph.tail(face[i])] == 1) {
        start = i;
        break;
      }
    }
    for (DartId d : face) occurrences[graph.tail(d)] = 0;
    if (start == k) {
      throw NotPlanarEmbedding("face without a simple corner cannot be triangulated");
    }
    std::vector<DartId> walk(k);
    for (std::size_t i = 0; i < k; ++i) walk[i] = face[(start + i) % k];
    // Fan from the corner at walk[0]'s tail; each chord closes one triangle.
    for (std::size_t j = 2; j + 1 < k; ++j) {
      result.insert_edge(reverse_dart(walk[k - 1]), reverse_dart(walk[j - 1]), big, true);
    }
  }
  result.rebuild_adjacency();
  return result;
}

Subgraph induced_subgraph(const EmbeddedPlanarGraph& graph, std::span<const NodeId> nodes,
                          std::span<const std::uint8_t> keep_edge) {
  thread_local std::vector<NodeId> local_of;
  if (local_of.size() < graph.node_count()) local_of.resize(graph.node_count(), kNoNode);
  for (NodeId i = 0; i < nodes.size(); ++i) local_of[nodes[i]] = i;

  auto kept = [&](EdgeId e) {
    return keep_edge.empty() ? !graph.is_synthetic(e) : keep_edge[e] != 0;
  };
  Subgraph sub;
  sub.to_parent_node.assign(nodes.begin(), nodes.end());
  for (NodeId v : nodes) {
    for (DartId d : graph.darts_of(v)) {
      if (d & 1u) continue;
      const EdgeId e = edge_of(d);
      if (local_of[graph.head(d)] != kNoNode && kept(e)) sub.to_parent_edge.push_back(e);
    }
  }
  std::sort(sub.to_parent_edge.begin(), sub.to_parent_edge.end());

  thread_local std::vector<EdgeId> local_edge;
  if (local_edge.size() < graph.edge_count()) local_edge.resize(graph.edge_count(), kNoEdge);
  std::vector<EdgeRecord> edges;
  edges.reserve(sub.to_parent_edge.size());
  for (EdgeId le = 0; le < sub.to_parent_edge.size(); ++le) {
    const EdgeId e = sub.to_parent_edge[le];
    local_edge[e] = le;
    EdgeRecord rec = graph.edge(e);
    rec.u = local_of[rec.u];
    rec.v = local_of[rec.v];
    edges.push_back(rec);
  }
  std::vector<std::vector<DartId>> rotation(nodes.size());
  for (NodeId i = 0; i < nodes.size(); ++i) {
    for (DartId d : graph.darts_of(nodes[i])) {
      const EdgeId le = local_edge[edge_of(d)];
      if (le != kNoEdge) rotation[i].push_back(dart_of(le, d & 1u));
    }
  }
  std::vector<Point> coords;
  if (graph.has_coordinates()) {
    coords.reserve(nodes.size());
    for (NodeId v : nodes) coords.push_back(graph.coordinates()[v]);
  }
  for (EdgeId e : sub.to_parent_edge) local_edge[e] = kNoEdge;
  for (NodeId v : nodes) local_of[v] = kNoNode;

  sub.graph = EmbeddedPlanarGraph::from_rotation(nodes.size(), std::move(edges), rotation,
                                                 std::move(coords));
  return sub;
}

}  // namespace pado
