#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "pado/errors.hpp"

namespace pado {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;
using DartId = std::uint32_t;
using Length = double;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();
inline constexpr DartId kNoDart = std::numeric_limits<DartId>::max();
inline constexpr Length kInfinity = std::numeric_limits<Length>::infinity();

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct EdgeRecord {
  NodeId u = 0;
  NodeId v = 0;
  Length length = 0.0;
  bool synthetic = false;
  // Secondary Dijkstra key. Zero means "assign the default for this edge index".
  std::uint64_t tiebreak = 0;
};

// Edge e owns darts 2e (u -> v) and 2e+1 (v -> u).
constexpr DartId dart_of(EdgeId e, bool reversed) { return 2 * e + (reversed ? 1u : 0u); }
constexpr EdgeId edge_of(DartId d) { return d >> 1; }
constexpr DartId reverse_dart(DartId d) { return d ^ 1u; }

// Deterministic 40-bit perturbation for edge index e (never zero).
std::uint64_t default_tiebreak(EdgeId e);

// Undirected graph with a combinatorial embedding (rotation system).
// Faces are the orbits of face_next(d) = next_ccw(reverse(d)).
class EmbeddedPlanarGraph {
 public:
  EmbeddedPlanarGraph() = default;

  // rotation[v] lists the darts leaving v in counterclockwise order.
  // Throws NotPlanarEmbedding when the lists are not a partition of the darts by tail.
  // Coordinates, when given, are carried along for I/O only.
  static EmbeddedPlanarGraph from_rotation(std::size_t node_count, std::vector<EdgeRecord> edges,
                                           const std::vector<std::vector<DartId>>& rotation,
                                           std::vector<Point> coords = {});

  // Rotation derived by sorting the darts around each node by angle.
  static EmbeddedPlanarGraph from_coordinates(std::vector<Point> coords,
                                              std::vector<EdgeRecord> edges);

  std::size_t node_count() const { return first_dart_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t dart_count() const { return 2 * edges_.size(); }

  const EdgeRecord& edge(EdgeId e) const { return edges_[e]; }
  const std::vector<EdgeRecord>& edges() const { return edges_; }
  Length length(EdgeId e) const { return edges_[e].length; }
  bool is_synthetic(EdgeId e) const { return edges_[e].synthetic; }

  NodeId tail(DartId d) const { return (d & 1u) ? edges_[d >> 1].v : edges_[d >> 1].u; }
  NodeId head(DartId d) const { return (d & 1u) ? edges_[d >> 1].u : edges_[d >> 1].v; }

  DartId next_ccw(DartId d) const { return next_ccw_[d]; }
  DartId prev_ccw(DartId d) const { return prev_ccw_[d]; }
  DartId face_next(DartId d) const { return next_ccw_[reverse_dart(d)]; }
  DartId first_dart(NodeId v) const { return first_dart_[v]; }

  // Darts leaving v in counterclockwise order, starting at first_dart(v).
  std::span<const DartId> darts_of(NodeId v) const {
    return {adj_darts_.data() + adj_offsets_[v], adj_darts_.data() + adj_offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return adj_offsets_[v + 1] - adj_offsets_[v]; }

  bool has_coordinates() const { return !coords_.empty(); }
  const std::vector<Point>& coordinates() const { return coords_; }

  Length total_original_length() const;

 private:
  friend EmbeddedPlanarGraph triangulate(const EmbeddedPlanarGraph& graph);

  EdgeId insert_edge(DartId after_at_u, DartId after_at_v, Length length, bool synthetic);
  void rebuild_adjacency();

  std::vector<EdgeRecord> edges_;
  std::vector<DartId> next_ccw_;
  std::vector<DartId> prev_ccw_;
  std::vector<DartId> first_dart_;
  std::vector<std::uint32_t> adj_offsets_;
  std::vector<DartId> adj_darts_;
  std::vector<Point> coords_;
};

struct GraphDiagnostics {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t face_count = 0;
  std::size_t max_face_degree = 0;
  std::size_t synthetic_edges = 0;
  bool triangulated = false;
};

// Checks lengths, the rotation system, connectivity and Euler's relation.
// Throws NegativeLength, NotPlanarEmbedding or Disconnected.
GraphDiagnostics validate(const EmbeddedPlanarGraph& graph);

// Face orbits; face_of[d] gives the face index of dart d.
struct FaceStructure {
  std::vector<std::uint32_t> face_of;
  std::vector<std::vector<DartId>> faces;
};
FaceStructure trace_faces(const EmbeddedPlanarGraph& graph);

// Genus-0 check per connected component (isolated nodes count as spheres).
bool is_planar_embedding(const EmbeddedPlanarGraph& graph);

// Adds synthetic edges of length 1 + (sum of original lengths) until every face
// walk has three darts. Original edges keep their ids; no self-loops are added.
// Graphs with fewer than three nodes are returned unchanged.
EmbeddedPlanarGraph triangulate(const EmbeddedPlanarGraph& graph);

// Subgraph on a node subset with the kept edges; rotation restricted from the parent.
struct Subgraph {
  EmbeddedPlanarGraph graph;
  std::vector<NodeId> to_parent_node;
  std::vector<EdgeId> to_parent_edge;
};

// Keeps edges with both endpoints in `nodes` for which keep_edge[e] != 0 (all
// non-synthetic edges when keep_edge is empty). Local ids follow the order of
// `nodes`; local edge ids follow parent edge order. Tiebreaks are inherited.
Subgraph induced_subgraph(const EmbeddedPlanarGraph& graph, std::span<const NodeId> nodes,
                          std::span<const std::uint8_t> keep_edge = {});

// Connected components over the edges allowed by the mask (all edges when empty).
struct Components {
  std::vector<std::uint32_t> component_of;
  std::uint32_t count = 0;
};
Components connected_components(const EmbeddedPlanarGraph& graph,
                                std::span<const std::uint8_t> edge_mask = {});

}  // namespace pado
