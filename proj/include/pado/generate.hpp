#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "pado/graph.hpp"

namespace pado {

enum class GraphKind { grid, delaunay, random_triangulation };
enum class LengthModel { unit, euclidean, uniform };

struct GeneratorParams {
  GraphKind kind = GraphKind::grid;
  std::size_t rows = 0;   // grid
  std::size_t cols = 0;   // grid
  std::size_t nodes = 0;  // delaunay, random_triangulation
  // Defaults: unit for grids, euclidean for delaunay, uniform for random triangulations.
  std::optional<LengthModel> lengths;
  double min_length = 1.0;  // uniform model
  double max_length = 10.0;
  std::uint64_t seed = 1;
};

// Deterministic per seed. Throws InvalidParams.
EmbeddedPlanarGraph generate(const GeneratorParams& params);

GraphKind parse_graph_kind(std::string_view name);
LengthModel parse_length_model(std::string_view name);

}  // namespace pado
