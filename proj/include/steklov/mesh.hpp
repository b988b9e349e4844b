#pragma once

// Piecewise-linear finite elements on 2D triangle meshes with piecewise
// constant gamma (per triangle) and rho (per boundary edge).
//
// Mesh text format, line oriented:
//
//   SMESH 1
//   <vertex count> <triangle count> <rho line count>
//   x y                      (one per vertex)
//   i j k gamma              (one per triangle, counterclockwise)
//   i j rho                  (one per explicit boundary density)
//   PERIODIC i j             (any number, to end of file)
//
// Blank lines and lines starting with '#' are skipped. PERIODIC i j
// identifies vertex j with vertex i before any topology is derived.
// Boundary edges (edges in exactly one triangle after identification)
// without an explicit rho line get rho = 1. Numbers are written with 17
// significant digits so save/load round-trips bit-identically.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "steklov/complex.hpp"

namespace steklov {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct RhoEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double rho = 1.0;
};

struct TriangleMesh {
  std::vector<Point2> points;
  std::vector<std::array<std::size_t, 3>> triangles;
  std::vector<double> gamma;
  std::vector<RhoEntry> rho;
  std::vector<std::pair<std::size_t, std::size_t>> periodic;
};

bool operator==(const TriangleMesh& a, const TriangleMesh& b);

// Topology after periodic identification. Nodes are the merged vertices
// (one per identification class, numbered by ascending smallest member);
// they become network vertices.
struct MeshTopology {
  std::vector<std::size_t> node_of_point;
  // Smallest point id in each class, used for coordinates on export.
  std::vector<std::size_t> point_of_node;

  struct Edge {
    std::size_t a = 0;  // node ids, a < b
    std::size_t b = 0;
    std::array<long, 2> triangles{-1, -1};
    // Raw point ids of the endpoints as seen by triangles[0].
    std::size_t pa = 0;
    std::size_t pb = 0;
    double rho = 1.0;  // boundary edges only
    bool boundary() const { return triangles[1] < 0; }
  };
  std::vector<Edge> edges;  // sorted by (a, b)
  // Edge index opposite corner k of triangle t.
  std::vector<std::array<std::size_t, 3>> triangle_edges;
  std::vector<bool> node_on_boundary;

  std::size_t node_count() const { return point_of_node.size(); }
};

// Checks index ranges, positive areas, positive gamma/rho, manifold edges,
// edge connectivity and rho lines naming boundary edges. Throws
// StructuralError (InputError for out-of-range indices).
MeshTopology build_topology(const TriangleMesh& mesh);

// Throws InputError with the offending line number.
TriangleMesh load_mesh(const std::string& text);
std::string save_mesh(const TriangleMesh& mesh);

struct P1Assembly {
  SteklovNetwork network;
  // Negative accumulated conductances (obtuse-angle cancellation).
  std::vector<std::string> diagnostics;
  // Number of edges whose conductance cancelled to within 1e-10 of the
  // largest conductance; these carry no energy and are omitted.
  std::size_t dropped_edges = 0;
};

// Cotangent stiffness times gamma; boundary mass lumped as rho * length / 2
// onto each endpoint of every boundary edge.
P1Assembly assemble_p1(const TriangleMesh& mesh, const MeshTopology& topo);
P1Assembly assemble_p1(const TriangleMesh& mesh);

// Cells are triangles (area * gamma); interfaces are interior edges
// (length * mean of adjacent gammas); boundary faces are boundary edges
// (length * rho).
BoundaryComplex mesh_to_complex(const TriangleMesh& mesh, const MeshTopology& topo);
BoundaryComplex mesh_to_complex(const TriangleMesh& mesh);

// Vertex field (per node) to cell field: mean of the three corner values.
std::vector<double> triangle_average(const TriangleMesh& mesh, const MeshTopology& topo,
                                     const Eigen::VectorXd& node_field);

// CSV: vertex_id,x,y,value (one row per node).
std::string eigenfunction_csv(const TriangleMesh& mesh, const MeshTopology& topo,
                              const Eigen::VectorXd& node_field);

double triangle_area(const TriangleMesh& mesh, std::size_t t);

// Block label per triangle from a nx-by-ny grid over the bounding box of the
// raw coordinates, binned by centroid.
std::vector<std::size_t> grid_blocks(const TriangleMesh& mesh, std::size_t nx,
                                     std::size_t ny);

}  // namespace steklov
