#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pado/connections.hpp"
#include "pado/decomposition.hpp"
#include "pado/graph.hpp"
#include "pado/rdivision.hpp"

namespace pado {

struct OracleParams {
  double epsilon = 0.5;
  double c_ell = 1.0;
  std::uint32_t ell = 1;
  std::uint64_t r = 1;
};

// ell = max(1, round(c_ell / epsilon * ln n)) clamped to [1, n]; r = ell^2.
// Throws InvalidParams unless epsilon and c_ell are positive and finite.
OracleParams make_params(double epsilon, double c_ell, std::size_t node_count);

// Separator paths of one decomposition node, without the piece.
struct SkeletonNode {
  DecompId parent = kNoDecomp;
  std::uint32_t depth = 0;
  std::vector<SeparatorPath> paths;  // empty or two
};

// Connections of boundary nodes, flattened. Boundary node slot k owns keys
// [key_offset[k], key_offset[k+1]); key j owns connections
// [conn_offset[j], conn_offset[j+1]).
struct ConnectionStore {
  std::vector<NodeId> nodes;  // boundary nodes, sorted
  std::vector<std::uint64_t> key_offset{0};
  std::vector<DecompId> key_node;
  std::vector<std::uint8_t> key_selector;  // 0 or 1: first or second path of S(x)
  std::vector<std::uint64_t> conn_offset{0};
  std::vector<std::uint32_t> conn_pos;
  std::vector<Length> conn_dist;

  std::size_t total_connections() const { return conn_pos.size(); }
  // Slot of a boundary node, or kNoIndex.
  std::uint32_t slot_of(NodeId v) const;
};

struct Witness {
  enum class Kind : std::uint8_t { none, same_node, intra_region, shared_boundary, separator };
  Kind kind = Kind::none;
  NodeId b = kNoNode;   // s-side boundary node
  NodeId b2 = kNoNode;  // t-side boundary node
  DecompId x = kNoDecomp;
  std::uint8_t selector = 0;
};

struct QueryResult {
  Length estimate = kInfinity;
  Witness witness;
  std::uint64_t nodes_scanned = 0;        // settled in the two region searches
  std::uint64_t connections_scanned = 0;  // tagged entries built for merge scans
};

// Tagged entry of a merge scan; `side` 0 is s, 1 is t.
struct ScanEntry {
  std::uint32_t pos = 0;
  std::uint8_t side = 0;
  Length value = 0.0;
};

// Single forward pass over entries sorted by position. Returns the minimum of
// s-value + |prefix[p] - prefix[p']| + t-value over all s/t pairs, or infinity.
Length merge_scan(std::span<const ScanEntry> entries, std::span<const Length> prefix);

// Edge list of one region plus a local adjacency for searches.
struct RegionGraph {
  struct Edge {
    NodeId u;
    NodeId v;
    Length length;
  };
  std::vector<Edge> edges;
  std::vector<NodeId> nodes;  // sorted global ids
  std::vector<std::uint32_t> offsets;
  std::vector<std::pair<std::uint32_t, Length>> adj;  // local neighbor, length

  void build_adjacency();
  std::uint32_t local(NodeId v) const;  // kNoIndex when absent
};

// Called once per (decomposition node, path) whose piece holds boundary nodes.
struct PieceContext {
  DecompId x = kNoDecomp;
  std::uint8_t selector = 0;
  const EmbeddedPlanarGraph* piece = nullptr;  // connected part of G(x) holding S(x)
  const SeparatorPath* path = nullptr;         // in piece-local ids
  std::span<const NodeId> designated;          // piece-local ids
  std::span<const NodeId> to_global;           // piece-local -> graph node
  const PathConnectionResult* result = nullptr;
};

struct PreprocessOptions {
  PathConnectionOptions connections;
  RDivisionOptions rdivision;
  std::function<void(const PieceContext&)> on_piece;
};

struct PreprocessReport {
  double seconds_rdivision = 0.0;
  double seconds_decomposition = 0.0;
  double seconds_connections = 0.0;
  std::size_t regions = 0;
  std::size_t boundary_nodes = 0;
  double c_r = 0.0;
  double c_b = 0.0;
  double c_B = 0.0;
  std::uint32_t decomposition_depth = 0;
  double c_d = 0.0;  // depth / log_{3/2} n
  std::size_t decomposition_nodes = 0;
  std::size_t pieces_processed = 0;
  std::uint64_t connections = 0;
  double c_space = 0.0;  // connections / n
  PhaseAudit audit;
  std::uint32_t max_dart_insertions = 0;
};

class DistanceOracle {
 public:
  DistanceOracle() = default;

  // Validates the graph, then builds the r-division, the decomposition and the
  // boundary-node connections. Throws the graph validation errors.
  static DistanceOracle preprocess(const EmbeddedPlanarGraph& graph, const OracleParams& params,
                                   const PreprocessOptions& options = {},
                                   PreprocessReport* report = nullptr);

  // Throws UnknownNode.
  QueryResult query(NodeId s, NodeId t) const;

  const OracleParams& params() const { return params_; }
  std::size_t node_count() const { return home_region_.size(); }
  const std::vector<RegionGraph>& regions() const { return regions_; }
  const std::vector<std::vector<NodeId>>& region_boundary() const { return region_boundary_; }
  const std::vector<RegionId>& home_region() const { return home_region_; }
  const std::vector<SkeletonNode>& skeleton() const { return skeleton_; }
  const std::vector<DecompId>& leafmost() const { return leafmost_; }
  const ConnectionStore& store() const { return store_; }

  // Assembles an oracle from stored parts (used by the file reader).
  static DistanceOracle assemble(OracleParams params, std::vector<RegionGraph> regions,
                                 std::vector<RegionId> home_region,
                                 std::vector<SkeletonNode> skeleton,
                                 std::vector<DecompId> leafmost, ConnectionStore store);

 private:
  void finish();
  // Region search from v; returns distances over the region's local ids.
  std::vector<Length> region_search(RegionId region, NodeId v, std::uint64_t& scanned) const;

  OracleParams params_;
  std::vector<RegionGraph> regions_;
  std::vector<std::vector<NodeId>> region_boundary_;
  std::vector<RegionId> home_region_;
  std::vector<SkeletonNode> skeleton_;
  std::vector<DecompId> leafmost_;
  ConnectionStore store_;
  std::vector<std::uint32_t> slot_of_;  // per node
};

}  // namespace pado
