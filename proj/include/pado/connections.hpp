#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "pado/decomposition.hpp"
#include "pado/graph.hpp"
#include "pado/shortest_paths.hpp"

namespace pado {

inline constexpr std::uint32_t kNoIndex = std::numeric_limits<std::uint32_t>::max();

struct Connection {
  std::uint32_t path_index = 0;
  Length dist = 0.0;

  friend bool operator==(const Connection&, const Connection&) = default;
};

using ConnectionList = std::vector<Connection>;

// Edge ids joining consecutive path nodes (the lightest edge among parallels,
// synthetic edges excluded). Throws InvalidParams if two consecutive nodes are
// not adjacent.
std::vector<EdgeId> path_edge_ids(const EmbeddedPlanarGraph& piece, const SeparatorPath& path);

// The piece cut open along P. Nodes of the piece keep their ids, P's nodes act
// as copy A; copy B gets ids n .. n+s. At an interior path node the darts on the
// left of the walk p_0 -> p_s stay on copy A and those on the right move to copy
// B. The endpoints keep all their edges on copy A, so the copy-B endpoints are
// pendant. Path edges are duplicated with identical lengths and tiebreaks.
struct CutPiece {
  EmbeddedPlanarGraph graph;
  SeparatorPath copy_a;
  SeparatorPath copy_b;
  std::vector<NodeId> to_original;  // per cut-graph node
};
CutPiece cut_along_path(const EmbeddedPlanarGraph& piece, const SeparatorPath& path);

// Per node: i(v), the smallest index attaining d_v = min_i dist(p_i, v).
struct AttachmentInfo {
  std::vector<std::uint32_t> i_of_v;
  std::vector<Length> d_v;
};
// One shortest-path computation from p_0 with the path edges at length zero.
// Throws UnreachableNode when some node of the piece is not reached.
AttachmentInfo nearest_attachment(const EmbeddedPlanarGraph& piece, const SeparatorPath& path);

// Edge uv inserted as v's new parent edge, with the change of v's root-path length.
struct ParentChange {
  NodeId node = kNoNode;        // v
  DartId new_parent = kNoDart;  // dart u -> v
  Length delta = 0.0;
};

// T_0 plus, for i = 1..s, the swaps turning T'_i (T_{i-1} re-rooted at p_i)
// into T_i. steps[0] is always empty. Changes inside a step are ordered so that
// each one keeps the current parent array a tree.
struct ParentChangeStream {
  ShortestPathTree initial;
  std::vector<std::vector<ParentChange>> steps;
  // dist_to[i][k] = dist(p_i, designated[k]); filled when designated nodes are given.
  std::vector<std::vector<Length>> dist_to;

  std::size_t change_count() const;
};
// With record_changes false only `initial` and `dist_to` are filled.
ParentChangeStream parent_change_stream(const EmbeddedPlanarGraph& piece, const SeparatorPath& path,
                                        std::span<const NodeId> designated = {},
                                        bool record_changes = true);

// p_s .. p_0 with prefix distances measured from p_s.
SeparatorPath reversed_path(const SeparatorPath& path);

// Turns a parent array into the same tree rooted at `root` by reversing the
// darts on root's old root path.
void reroot(const EmbeddedPlanarGraph& piece, std::vector<DartId>& parent, NodeId root);

// Replays the stream: after step i the parent array (parent dart per node) is
// that of T_i. `visit(i, parents)` runs after each step, starting with T_0.
template <typename Visit>
void replay_stream(const EmbeddedPlanarGraph& piece, const SeparatorPath& path,
                   const ParentChangeStream& stream, Visit&& visit) {
  std::vector<DartId> parent = stream.initial.parent_dart;
  visit(std::size_t{0}, static_cast<const std::vector<DartId>&>(parent));
  for (std::size_t i = 1; i < stream.steps.size(); ++i) {
    reroot(piece, parent, path.nodes[i]);
    for (const ParentChange& c : stream.steps[i]) parent[c.node] = c.new_parent;
    visit(i, static_cast<const std::vector<DartId>&>(parent));
  }
}

enum class MuMode {
  recompute,    // evaluate the mu invariant from per-index distances at every step
  incremental,  // apply root shifts and Delta updates to the subtrees of the current tree
};

struct PhaseOptions {
  MuMode mu_mode = MuMode::recompute;
  // In incremental mode, also evaluate the invariant from scratch and record the gap.
  bool shadow_audit = false;
};

struct PhaseAudit {
  std::uint32_t max_per_node = 0;  // most connections given to one node in one phase
  std::uint64_t connections = 0;
  // Smallest (potential decrease - eps*d_v) / (eps*d_v) over non-initial connections.
  double min_potential_slack = kInfinity;
  double max_mu_gap = 0.0;  // |incremental mu - recomputed mu|, shadow audit only
  std::uint64_t non_initial = 0;

  void merge(const PhaseAudit& other);
};

struct PhaseResult {
  std::vector<ConnectionList> lists;  // per designated node, sorted by index
  PhaseAudit audit;
};

// Forward phase: connections with indices >= i(v). `designated` must not be
// empty; the stream must carry distances for the same designated list.
PhaseResult forward_phase(const EmbeddedPlanarGraph& piece, std::span<const NodeId> designated,
                          const SeparatorPath& path, double epsilon,
                          const AttachmentInfo& attachments, const ParentChangeStream& stream,
                          const PhaseOptions& options = {});

// Mirror image of forward_phase on p_s .. p_0: indices <= i(v). The stream
// belongs to reversed_path(path).
PhaseResult backward_phase(const EmbeddedPlanarGraph& piece, std::span<const NodeId> designated,
                           const SeparatorPath& path, double epsilon,
                           const AttachmentInfo& attachments,
                           const ParentChangeStream& reversed_stream,
                           const PhaseOptions& options = {});

enum class CutMode { direct, cut };

struct PathConnectionOptions {
  CutMode mode = CutMode::cut;
  PhaseOptions phase;
};

struct PathConnectionResult {
  std::vector<ConnectionList> lists;  // per designated node
  PhaseAudit audit;
  std::uint32_t max_dart_insertions = 0;  // over all streams computed
};

// Connections for every designated node with respect to P; each list sorted by
// index with one entry per index (the smaller distance wins). The piece must be
// connected.
PathConnectionResult path_connections(const EmbeddedPlanarGraph& piece,
                                      std::span<const NodeId> designated,
                                      const SeparatorPath& path, double epsilon,
                                      const PathConnectionOptions& options = {});

// True iff for every p_i with finite dist(p_i, v) some connection (j, c) has
// |prefix_j - prefix_i| + c <= (1 + eps) * dist(p_i, v) (relative slack 1e-9).
bool verify_cover(const EmbeddedPlanarGraph& piece, NodeId v, const SeparatorPath& path,
                  std::span<const Connection> connections, double epsilon);

// Sorted union keeping the smaller distance per index.
ConnectionList merge_connection_lists(std::span<const Connection> a, std::span<const Connection> b);

// Largest number of times one oriented edge (parent -> child) entered a tree
// across the stream.
std::uint32_t max_insertions_per_dart(const EmbeddedPlanarGraph& piece,
                                      const ParentChangeStream& stream);

}  // namespace pado
