#include "pado/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace pado {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty line split into tokens, comments stripped. False at EOF.
  bool next(std::vector<std::string_view>& tokens) {
    while (std::getline(in_, buffer_)) {
      ++line_;
      const auto hash = buffer_.find('#');
      if (hash != std::string::npos) buffer_.resize(hash);
      tokens.clear();
      std::string_view rest(buffer_);
      while (!rest.empty()) {
        const auto start = rest.find_first_not_of(" \t\r");
        if (start == std::string_view::npos) break;
        rest.remove_prefix(start);
        const auto end = rest.find_first_of(" \t\r");
        tokens.push_back(rest.substr(0, end));
        if (end == std::string_view::npos) break;
        rest.remove_prefix(end);
      }
      if (!tokens.empty()) return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::string buffer_;
  std::size_t line_ = 0;
};

template <typename T>
T parse_number(std::string_view token, std::size_t line, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, std::string("bad ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

EmbeddedPlanarGraph parse_graph(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string_view> tok;
  if (!reader.next(tok)) throw ParseError(reader.line(), "missing header");
  if (tok.size() != 5 || tok[0] != "pado-graph") {
    throw ParseError(reader.line(), "expected 'pado-graph 1 <n> <m> <mode>'");
  }
  if (tok[1] != "1") throw ParseError(reader.line(), "unsupported format version");
  const auto n = parse_number<std::size_t>(tok[2], reader.line(), "node count");
  const auto m = parse_number<std::size_t>(tok[3], reader.line(), "edge count");
  const std::string mode(tok[4]);
  if (mode != "xy" && mode != "rot") throw ParseError(reader.line(), "mode must be xy or rot");
  const bool xy = mode == "xy";

  std::vector<Point> coords(xy ? n : 0);
  std::vector<std::vector<EdgeId>> rotation_edges(xy ? 0 : n);
  std::vector<std::uint8_t> seen(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!reader.next(tok)) throw ParseError(reader.line(), "expected node line");
    const auto id = parse_number<NodeId>(tok[0], reader.line(), "node id");
    if (id >= n || seen[id]) throw ParseError(reader.line(), "node id out of range or repeated");
    seen[id] = 1;
    if (xy) {
      if (tok.size() != 3) throw ParseError(reader.line(), "xy node line needs '<id> <x> <y>'");
      coords[id] = {parse_number<double>(tok[1], reader.line(), "coordinate"),
                    parse_number<double>(tok[2], reader.line(), "coordinate")};
    } else {
      for (std::size_t k = 1; k < tok.size(); ++k) {
        rotation_edges[id].push_back(parse_number<EdgeId>(tok[k], reader.line(), "edge index"));
      }
    }
  }
  std::vector<EdgeRecord> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!reader.next(tok)) throw ParseError(reader.line(), "expected edge line");
    if (tok.size() != 3) throw ParseError(reader.line(), "edge line needs '<u> <v> <length>'");
    EdgeRecord e;
    e.u = parse_number<NodeId>(tok[0], reader.line(), "endpoint");
    e.v = parse_number<NodeId>(tok[1], reader.line(), "endpoint");
    e.length = parse_number<double>(tok[2], reader.line(), "length");
    if (e.u >= n || e.v >= n) throw ParseError(reader.line(), "endpoint out of range");
    edges.push_back(e);
  }
  if (reader.next(tok)) throw ParseError(reader.line(), "trailing content after edge list");

  try {
    if (xy) return EmbeddedPlanarGraph::from_coordinates(std::move(coords), std::move(edges));
    std::vector<std::vector<DartId>> rotation(n);
    for (NodeId v = 0; v < n; ++v) {
      for (EdgeId e : rotation_edges[v]) {
        if (e >= edges.size()) throw NotPlanarEmbedding("rotation names unknown edge");
        rotation[v].push_back(dart_of(e, edges[e].u != v));
      }
    }
    return EmbeddedPlanarGraph::from_rotation(n, std::move(edges), rotation);
  } catch (const NotPlanarEmbedding& err) {
    throw ParseError(reader.line(), err.what());
  }
}

EmbeddedPlanarGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return parse_graph(in);
}

void serialize_graph(const EmbeddedPlanarGraph& graph, std::ostream& out) {
  const bool xy = graph.has_coordinates();
  out << "pado-graph 1 " << graph.node_count() << ' ' << graph.edge_count() << ' '
      << (xy ? "xy" : "rot") << '\n';
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    out << v;
    if (xy) {
      out << ' ' << format_double(graph.coordinates()[v].x) << ' '
          << format_double(graph.coordinates()[v].y);
    } else {
      for (DartId d : graph.darts_of(v)) out << ' ' << edge_of(d);
    }
    out << '\n';
  }
  for (const auto& e : graph.edges()) {
    out << e.u << ' ' << e.v << ' ' << format_double(e.length) << '\n';
  }
}

void write_graph_file(const EmbeddedPlanarGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParams("cannot write '" + path + "'");
  serialize_graph(graph, out);
}

}  // namespace pado
