#pragma once

#include <iosfwd>
#include <string>

#include "pado/graph.hpp"

namespace pado {

// Text format:
//   pado-graph 1 <n> <m> <mode>        mode is "xy" or "rot"
//   n node lines: "<id> <x> <y>" (xy) or "<id> <e0> <e1> ..." (rot: incident
//                 edge indices in counterclockwise order)
//   m edge lines: "<u> <v> <length>"
// '#' starts a comment. Throws ParseError carrying the line number.
EmbeddedPlanarGraph parse_graph(std::istream& in);
EmbeddedPlanarGraph read_graph_file(const std::string& path);

// Writes xy mode when the graph carries coordinates, rot mode otherwise.
// Numbers use the shortest round-trip decimal form.
void serialize_graph(const EmbeddedPlanarGraph& graph, std::ostream& out);
void write_graph_file(const EmbeddedPlanarGraph& graph, const std::string& path);

std::string format_double(double value);

}  // namespace pado
