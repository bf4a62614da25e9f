#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "pado/errors.hpp"
#include "pado/rdivision.hpp"
#include "checks.hpp"
#include "test_support.hpp"

namespace pado {
namespace {

void expect_consistent(const EmbeddedPlanarGraph& g, const RDivision& div) {
  const testing::Problems problems = testing::check_rdivision(g, div);
  EXPECT_TRUE(problems.empty()) << problems.front();
}

TEST(RDivision, LargeRGivesSingleRegion) {
  const EmbeddedPlanarGraph g = testing::grid(6, 6);
  for (std::uint64_t r : {g.edge_count(), g.edge_count() + 1, std::uint64_t{1} << 40}) {
    const RDivision div = compute_rdivision(g, r);
    ASSERT_EQ(div.region_count(), 1u);
    EXPECT_TRUE(div.boundary.empty());
    expect_consistent(g, div);
  }
}

TEST(RDivision, RejectsZeroR) {
  EXPECT_THROW(compute_rdivision(testing::grid(3, 3), 0), InvalidParams);
}

TEST(RDivision, EdgelessGraph) {
  const EmbeddedPlanarGraph g = EmbeddedPlanarGraph::from_coordinates({{0, 0}}, {});
  const RDivision div = compute_rdivision(g, 4);
  EXPECT_EQ(div.region_count(), 1u);
  EXPECT_TRUE(div.regions[0].empty());
}

TEST(RDivision, Grid20R16) {
  const EmbeddedPlanarGraph g = testing::grid(20, 20);
  const RDivision div = compute_rdivision(g, 16);
  expect_consistent(g, div);
  EXPECT_LE(div.c_r, 1.0);  // phase 1 stops at r edges per region
  EXPECT_LE(div.c_b, 4.0 + 1.0 / 4.0);
  EXPECT_GT(div.region_count(), 1u);
}

TEST(RDivision, RegionSizeNeverExceedsR) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    for (const EmbeddedPlanarGraph& g :
         {testing::delaunay(800, seed), testing::stacked(800, seed), testing::grid(25, 31, seed)}) {
      for (std::uint64_t r : {4u, 25u, 100u, 400u}) {
        const RDivision div = compute_rdivision(g, r);
        expect_consistent(g, div);
        EXPECT_LE(div.c_r, 1.0);
        // Phase 2 keeps splitting until no region exceeds ceil(4 sqrt r) boundary nodes.
        const double limit = std::ceil(4.0 * std::sqrt(static_cast<double>(r)));
        for (const auto& b : div.region_boundary) EXPECT_LE(b.size(), limit);
      }
    }
  }
}

TEST(RDivision, BoundaryTotalScalesLikeNOverSqrtR) {
  // c_B should not drift with r on a fixed family.
  const EmbeddedPlanarGraph g = testing::grid(60, 60);
  double lo = 1e9;
  double hi = 0.0;
  for (std::uint64_t r : {16u, 64u, 256u}) {
    const RDivision div = compute_rdivision(g, r);
    lo = std::min(lo, div.c_B);
    hi = std::max(hi, div.c_B);
  }
  EXPECT_LT(hi, 2.0 * lo);
}

TEST(RDivision, Deterministic) {
  const EmbeddedPlanarGraph g = testing::delaunay(500, 9);
  const RDivision a = compute_rdivision(g, 36);
  const RDivision b = compute_rdivision(g, 36);
  EXPECT_EQ(a.regions, b.regions);
  EXPECT_EQ(a.home_region, b.home_region);
}

TEST(RDivision, UnknownRegion) {
  const RDivision div = compute_rdivision(testing::grid(4, 4), 4);
  EXPECT_THROW(boundary_of_region(div, static_cast<RegionId>(div.region_count())), UnknownRegion);
}

}  // namespace
}  // namespace pado
