#pragma once

// Annotated-graph instances: one JSON document supplies both the energy
// weights and the measure weights, with cells identified with vertices and
// interfaces with edges.
//
//   {
//     "dimension": 2,                      (optional, default 2)
//     "vertices": [
//       {"id": "u", "boundary": true, "volume_weight": 1,
//        "boundary_mass": 1, "rho_weight": 1}, ...],
//     "edges": [
//       {"source": "u", "target": "m", "conductance": 1,
//        "perimeter_weight": 1}, ...]
//   }
//
// "id" may be a string or an integer. boundary_mass and rho_weight are
// required on boundary vertices and forbidden on interior ones. Unknown
// fields are rejected.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "steklov/complex.hpp"

namespace steklov {

struct GraphVertex {
  std::string id;
  bool boundary = false;
  std::optional<double> volume_weight;
  std::optional<double> boundary_mass;
  std::optional<double> rho_weight;
};

struct GraphEdge {
  std::string source;
  std::string target;
  std::optional<double> conductance;
  std::optional<double> perimeter_weight;
};

struct GraphInput {
  Dimension dimension;
  std::vector<GraphVertex> vertices;
  std::vector<GraphEdge> edges;
};

struct GraphInstance {
  SteklovNetwork network;
  BoundaryComplex complex;
  Dimension dimension;
};

// Throws InputError on malformed JSON, unknown fields or wrong types.
GraphInput parse_graph_json(const std::string& text);
std::string graph_to_json(const GraphInput& graph);

// Throws InputError naming the first missing or inconsistent field.
GraphInstance graph_to_pair(const GraphInput& graph);

// Reverse direction, used to emit generated instances as files.
GraphInput pair_to_graph(const SteklovNetwork& net, const BoundaryComplex& complex,
                         Dimension dim);

// Path u - ... - v with `edges` edges spanning length `length` in 1D
// semantics: conductance edges/length, unit boundary masses at the ends,
// volume length/edges per vertex, unit perimeters and unit rho at the ends.
// path_graph(2, 2.0) is the three-vertex instance used throughout the tests.
GraphInput path_graph(std::size_t edges, double length);

}  // namespace steklov
