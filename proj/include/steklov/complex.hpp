#pragma once

// Discrete carriers of a weighted manifold with boundary.
//
// SteklovNetwork holds the energy side: a graph whose quadratic form
// sum_e c_e (f_a - f_b)^2 is the Dirichlet energy, plus lumped boundary
// masses for the boundary L2 pairing.
//
// BoundaryComplex holds the measure side: cells with weighted volume,
// interfaces between cells with weighted (n-1)-area, and exterior
// boundary faces with rho-weighted area.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace steklov {

struct Dimension {
  int n = 2;
};

struct NetworkEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double conductance = 0.0;
};

struct SteklovNetwork {
  std::vector<bool> is_boundary;
  // Per vertex; zero (and ignored) on interior vertices.
  std::vector<double> boundary_mass;
  std::vector<NetworkEdge> edges;
  // Optional display labels, one per vertex when present.
  std::vector<std::string> labels;

  std::size_t vertex_count() const { return is_boundary.size(); }
  // Ascending vertex ids of boundary vertices.
  std::vector<std::size_t> boundary_vertices() const;
  std::vector<std::size_t> interior_vertices() const;
  std::string label(std::size_t v) const;
};

struct Interface {
  std::size_t a = 0;
  std::size_t b = 0;
  double perimeter = 0.0;
};

struct BoundaryFace {
  std::size_t cell = 0;
  double rho = 0.0;
};

struct BoundaryComplex {
  std::vector<double> volume;
  std::vector<Interface> interfaces;
  std::vector<BoundaryFace> faces;
  std::vector<std::string> labels;

  std::size_t cell_count() const { return volume.size(); }
  std::string label(std::size_t c) const;
};

struct Violation {
  std::string kind;
  std::string where;
};

using Diagnostics = std::vector<Violation>;

Diagnostics validate_network(const SteklovNetwork& net);
Diagnostics validate_complex(const BoundaryComplex& complex);

// Metric g -> lambda^2 g in dimension n. Throws std::invalid_argument for
// lambda <= 0.
std::pair<SteklovNetwork, BoundaryComplex> scale_metric(
    const SteklovNetwork& net, const BoundaryComplex& complex, double lambda,
    Dimension dim);

// Merges cells carrying the same block label. Labels need not be contiguous;
// output cells are ordered by ascending label. Volumes, interface perimeters
// and exterior rho weights are summed; interfaces inside one block vanish.
// Each block keeps at most one aggregated boundary face.
BoundaryComplex coarsen(const BoundaryComplex& complex,
                        const std::vector<std::size_t>& block_of_cell);

// Total weights summed in index order.
double total_volume(const BoundaryComplex& complex);
double total_rho(const BoundaryComplex& complex);

}  // namespace steklov
