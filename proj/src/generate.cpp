#include "pado/generate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>

#include <boost/polygon/voronoi.hpp>

namespace pado {

namespace {

// Portable uniform double in [0, 1).
double unit_real(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void assign_lengths(std::vector<EdgeRecord>& edges, const std::vector<Point>& coords,
                    LengthModel model, const GeneratorParams& p, std::mt19937_64& rng) {
  for (auto& e : edges) {
    switch (model) {
      case LengthModel::unit:
        e.length = 1.0;
        break;
      case LengthModel::euclidean: {
        if (coords.empty()) throw InvalidParams("euclidean lengths need coordinates");
        e.length = std::hypot(coords[e.u].x - coords[e.v].x, coords[e.u].y - coords[e.v].y);
        break;
      }
      case LengthModel::uniform:
        e.length = p.min_length + (p.max_length - p.min_length) * unit_real(rng);
        break;
    }
  }
}

EmbeddedPlanarGraph make_grid(const GeneratorParams& p, std::mt19937_64& rng) {
  if (p.rows == 0 || p.cols == 0) throw InvalidParams("grid needs positive rows and cols");
  const std::size_t rows = p.rows;
  const std::size_t cols = p.cols;
  std::vector<Point> coords(rows * cols);
  std::vector<EdgeRecord> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = static_cast<NodeId>(r * cols + c);
      coords[v] = {static_cast<double>(c), static_cast<double>(r)};
      if (c + 1 < cols) edges.push_back({v, v + 1, 1.0});
      if (r + 1 < rows) edges.push_back({v, static_cast<NodeId>(v + cols), 1.0});
    }
  }
  assign_lengths(edges, coords, p.lengths.value_or(LengthModel::unit), p, rng);
  return EmbeddedPlanarGraph::from_coordinates(std::move(coords), std::move(edges));
}

EmbeddedPlanarGraph make_delaunay(const GeneratorParams& p, std::mt19937_64& rng) {
  if (p.nodes == 0) throw InvalidParams("delaunay needs a positive node count");
  using VPoint = boost::polygon::point_data<int>;
  constexpr int kRange = 1 << 20;
  std::vector<VPoint> sites;
  std::set<std::pair<int, int>> used;
  while (sites.size() < p.nodes) {
    const int x = static_cast<int>(rng() % kRange);
    const int y = static_cast<int>(rng() % kRange);
    if (used.emplace(x, y).second) sites.emplace_back(x, y);
  }
  std::vector<Point> coords;
  coords.reserve(sites.size());
  for (const auto& s : sites) {
    coords.push_back({static_cast<double>(s.x()), static_cast<double>(s.y())});
  }

  boost::polygon::voronoi_diagram<double> vd;
  boost::polygon::construct_voronoi(sites.begin(), sites.end(), &vd);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (const auto& edge : vd.edges()) {
    if (!edge.is_primary()) continue;
    const auto a = static_cast<NodeId>(edge.cell()->source_index());
    const auto b = static_cast<NodeId>(edge.twin()->cell()->source_index());
    if (a < b) pairs.emplace_back(a, b);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<EdgeRecord> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) edges.push_back({a, b, 0.0});
  assign_lengths(edges, coords, p.lengths.value_or(LengthModel::euclidean), p, rng);
  return EmbeddedPlanarGraph::from_coordinates(std::move(coords), std::move(edges));
}

// Stacked triangulation: each new node lands in a uniformly chosen inner face and
// is joined to its three corners. The rotation is maintained combinatorially.
EmbeddedPlanarGraph make_random_triangulation(const GeneratorParams& p, std::mt19937_64& rng) {
  if (p.nodes < 3) throw InvalidParams("random triangulation needs at least 3 nodes");
  const std::size_t n = p.nodes;
  std::vector<EdgeRecord> edges;
  std::vector<std::vector<DartId>> rotation(n);
  std::unordered_map<std::uint64_t, DartId> dart_between;
  auto key = [n](NodeId a, NodeId b) { return static_cast<std::uint64_t>(a) * n + b; };
  auto add_edge = [&](NodeId a, NodeId b) {
    const auto e = static_cast<EdgeId>(edges.size());
    edges.push_back({a, b, 1.0});
    dart_between[key(a, b)] = dart_of(e, false);
    dart_between[key(b, a)] = dart_of(e, true);
    return e;
  };
  auto insert_after = [&](NodeId at, DartId after, DartId d) {
    auto& list = rotation[at];
    const auto it = std::find(list.begin(), list.end(), after);
    list.insert(it + 1, d);
  };

  // Counterclockwise outer triangle 0, 1, 2.
  add_edge(0, 1);
  add_edge(1, 2);
  add_edge(2, 0);
  rotation[0] = {dart_between[key(0, 1)], dart_between[key(0, 2)]};
  rotation[1] = {dart_between[key(1, 2)], dart_between[key(1, 0)]};
  rotation[2] = {dart_between[key(2, 0)], dart_between[key(2, 1)]};
  std::vector<std::array<NodeId, 3>> faces{{0, 1, 2}};

  for (NodeId x = 3; x < n; ++x) {
    const std::size_t f = rng() % faces.size();
    const auto [a, b, c] = faces[f];
    add_edge(x, a);
    add_edge(x, b);
    add_edge(x, c);
    insert_after(a, dart_between[key(a, b)], dart_between[key(a, x)]);
    insert_after(b, dart_between[key(b, c)], dart_between[key(b, x)]);
    insert_after(c, dart_between[key(c, a)], dart_between[key(c, x)]);
    rotation[x] = {dart_between[key(x, a)], dart_between[key(x, b)], dart_between[key(x, c)]};
    faces[f] = {a, b, x};
    faces.push_back({b, c, x});
    faces.push_back({c, a, x});
  }
  assign_lengths(edges, {}, p.lengths.value_or(LengthModel::uniform), p, rng);
  return EmbeddedPlanarGraph::from_rotation(n, std::move(edges), rotation);
}

}  // namespace

EmbeddedPlanarGraph generate(const GeneratorParams& params) {
  if (params.min_length < 0.0 || params.max_length < params.min_length ||
      !std::isfinite(params.max_length)) {
    throw InvalidParams("uniform length range must satisfy 0 <= min <= max < inf");
  }
  std::mt19937_64 rng(params.seed);
  switch (params.kind) {
    case GraphKind::grid:
      return make_grid(params, rng);
    case GraphKind::delaunay:
      return make_delaunay(params, rng);
    case GraphKind::random_triangulation:
      return make_random_triangulation(params, rng);
  }
  throw InvalidParams("unknown graph kind");
}

GraphKind parse_graph_kind(std::string_view name) {
  if (name == "grid") return GraphKind::grid;
  if (name == "delaunay") return GraphKind::delaunay;
  if (name == "random-triangulation") return GraphKind::random_triangulation;
  throw InvalidParams("unknown graph kind '" + std::string(name) + "'");
}

LengthModel parse_length_model(std::string_view name) {
  if (name == "unit") return LengthModel::unit;
  if (name == "euclidean") return LengthModel::euclidean;
  if (name == "uniform") return LengthModel::uniform;
  throw InvalidParams("unknown length model '" + std::string(name) + "'");
}

}  // namespace pado
