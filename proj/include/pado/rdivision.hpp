#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pado/graph.hpp"

namespace pado {

using RegionId = std::uint32_t;

struct RDivisionOptions {
  // Regions with more than ceil(boundary_factor * sqrt(r)) boundary nodes are split again.
  double boundary_factor = 4.0;
  std::uint32_t max_boundary_rounds = 64;
};

struct RDivision {
  std::uint64_t r = 1;
  std::vector<std::vector<EdgeId>> regions;      // sorted edge ids; exact partition of the edges
  std::vector<NodeId> boundary;                  // B0, sorted
  std::vector<std::uint8_t> is_boundary;         // per node
  std::vector<RegionId> home_region;             // per node: lowest region containing it
  std::vector<std::vector<NodeId>> region_boundary;  // per region, sorted

  // Measured constants.
  double c_r = 0.0;  // max region edges / r
  double c_b = 0.0;  // max region boundary / sqrt(r)
  double c_B = 0.0;  // |B0| / (n / sqrt(r))

  std::size_t region_count() const { return regions.size(); }
};

// Partitions the edges of `graph` (synthetic ones included, if any) into regions
// of at most r edges each, then splits regions with too many boundary nodes.
// A graph without edges yields one empty region.
RDivision compute_rdivision(const EmbeddedPlanarGraph& graph, std::uint64_t r,
                            const RDivisionOptions& options = {});

// Nodes of the region that also lie in another region. Throws UnknownRegion.
std::span<const NodeId> boundary_of_region(const RDivision& division, RegionId region);

// Sorted nodes touched by the region's edges.
std::vector<NodeId> region_nodes(const EmbeddedPlanarGraph& graph, std::span<const EdgeId> edges);

}  // namespace pado
