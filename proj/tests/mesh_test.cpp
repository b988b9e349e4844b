#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "steklov/delaunay.hpp"
#include "steklov/errors.hpp"
#include "steklov/mesh.hpp"
#include "steklov/mesh_gen.hpp"
#include "steklov/solver.hpp"
#include "test_support.hpp"

using namespace steklov;

namespace {

constexpr double kPi = std::numbers::pi;

TriangleMesh one_triangle(Point2 a, Point2 b, Point2 c) {
  TriangleMesh m;
  m.points = {a, b, c};
  m.triangles = {{0, 1, 2}};
  m.gamma = {1.0};
  return m;
}

double conductance(const SteklovNetwork& net, std::size_t a, std::size_t b) {
  for (const auto& e : net.edges)
    if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return e.conductance;
  return 0.0;
}

// Element stiffness from barycentric gradients, independent of the
// cotangent formula.
double gradient_energy(const TriangleMesh& mesh, const MeshTopology& topo,
                       const Eigen::VectorXd& f) {
  double e = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point2 p0 = mesh.points[tri[0]], p1 = mesh.points[tri[1]], p2 = mesh.points[tri[2]];
    Eigen::Matrix2d j;
    j << p1.x - p0.x, p2.x - p0.x, p1.y - p0.y, p2.y - p0.y;
    const double area = 0.5 * std::abs(j.determinant());
    const Eigen::Vector2d df(f(static_cast<long>(topo.node_of_point[tri[1]])) -
                                 f(static_cast<long>(topo.node_of_point[tri[0]])),
                             f(static_cast<long>(topo.node_of_point[tri[2]])) -
                                 f(static_cast<long>(topo.node_of_point[tri[0]])));
    const Eigen::Vector2d grad = j.transpose().inverse() * df;
    e += mesh.gamma[t] * area * grad.squaredNorm();
  }
  return e;
}

double network_energy(const SteklovNetwork& net, const Eigen::VectorXd& f) {
  double e = 0.0;
  for (const auto& ed : net.edges) {
    const double d = f(static_cast<long>(ed.a)) - f(static_cast<long>(ed.b));
    e += ed.conductance * d * d;
  }
  return e;
}

}  // namespace

TEST(P1, EquilateralTriangle) {
  const auto m = one_triangle({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2});
  const auto p1 = assemble_p1(m);
  ASSERT_EQ(p1.network.edges.size(), 3u);
  for (const auto& e : p1.network.edges) EXPECT_NEAR(e.conductance, 0.5 / std::sqrt(3.0), 1e-15);
  for (double mass : p1.network.boundary_mass) EXPECT_NEAR(mass, 1.0, 1e-15);
  EXPECT_TRUE(p1.diagnostics.empty());
}

TEST(P1, RightTriangleDropsHypotenuse) {
  const auto m = one_triangle({0, 0}, {1, 0}, {0, 1});
  const auto p1 = assemble_p1(m);
  EXPECT_EQ(p1.dropped_edges, 1u);
  EXPECT_NEAR(conductance(p1.network, 0, 1), 0.5, 1e-15);
  EXPECT_NEAR(conductance(p1.network, 0, 2), 0.5, 1e-15);
  EXPECT_EQ(conductance(p1.network, 1, 2), 0.0);
  EXPECT_NEAR(p1.network.boundary_mass[1], 0.5 * (1.0 + std::sqrt(2.0)), 1e-15);
}

TEST(P1, ObtuseNeighbourIsReported) {
  // Two triangles sharing an edge, both with wide angles opposite it.
  TriangleMesh m;
  m.points = {{0, 0}, {2, 0}, {1, 0.2}, {1, -0.2}};
  m.triangles = {{0, 1, 2}, {0, 3, 1}};
  m.gamma = {1.0, 1.0};
  const auto p1 = assemble_p1(m);
  EXPECT_LT(conductance(p1.network, 0, 1), 0.0);
  EXPECT_FALSE(p1.diagnostics.empty());
}

TEST(P1, EnergyMatchesGradientForm) {
  testkit::Rng rng(3);
  for (const TriangleMesh& mesh : {make_disk(0.25), make_annulus(0.4, 1.0, 0.2),
                                   make_cylinder(2.0, 0.5, 0.2), make_rectangle(1.5, 1.0, 0.3)}) {
    const auto topo = build_topology(mesh);
    const auto p1 = assemble_p1(mesh, topo);
    Eigen::VectorXd f(static_cast<long>(topo.node_count()));
    for (long i = 0; i < f.size(); ++i) f(i) = testkit::uniform(rng, -1.0, 1.0);
    const double ref = gradient_energy(mesh, topo, f);
    EXPECT_NEAR(network_energy(p1.network, f), ref, 1e-11 * ref);
  }
}

TEST(P1, GeneratedMeshesHaveNoNegativeConductance) {
  for (const TriangleMesh& mesh :
       {make_disk(0.1), make_annulus(0.5, 1.0, 0.1), make_rectangle(2.0, 1.0, 0.1),
        make_cylinder(2 * kPi, 0.2, 0.1), make_dumbbell(1.0, 0.25, 0.5, 0.1)}) {
    const auto p1 = assemble_p1(mesh);
    EXPECT_TRUE(p1.diagnostics.empty()) << p1.diagnostics.front();
    EXPECT_TRUE(validate_network(p1.network).empty());
    EXPECT_TRUE(validate_complex(mesh_to_complex(mesh)).empty());
  }
}

TEST(Generators, MeasuresApproximateGeometry) {
  const auto disk = mesh_to_complex(make_disk(0.05));
  EXPECT_NEAR(total_volume(disk), kPi, 2e-3);
  EXPECT_NEAR(total_rho(disk), 2 * kPi, 2e-3);
  const auto ann = mesh_to_complex(make_annulus(0.5, 1.0, 0.05));
  EXPECT_NEAR(total_volume(ann), 0.75 * kPi, 5e-3);
  EXPECT_NEAR(total_rho(ann), 3 * kPi, 5e-3);
  const auto rect = mesh_to_complex(make_rectangle(2.0, 1.0, 0.1));
  EXPECT_NEAR(total_volume(rect), 2.0, 1e-12);
  EXPECT_NEAR(total_rho(rect), 6.0, 1e-12);
  const auto cyl = mesh_to_complex(make_cylinder(2 * kPi, 0.3, 0.1));
  EXPECT_NEAR(total_volume(cyl), 0.6 * kPi, 1e-12);
  EXPECT_NEAR(total_rho(cyl), 4 * kPi, 1e-12);
  const auto dumb = mesh_to_complex(make_dumbbell(1.0, 0.2, 0.5, 0.05));
  EXPECT_NEAR(total_volume(dumb), 2 * kPi + 0.2 * 0.5, 0.03);
}

TEST(Generators, RejectDegenerateParameters) {
  EXPECT_THROW(make_disk(0.0), std::invalid_argument);
  EXPECT_THROW(make_annulus(1.0, 1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(make_rectangle(-1.0, 1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(make_cylinder(1.0, 0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(make_dumbbell(1.0, 2.0, 0.5, 0.1), std::invalid_argument);
}

TEST(Generators, RectangleIsStructured) {
  const auto m = make_rectangle(1.0, 1.0, 0.5);
  EXPECT_EQ(m.points.size(), 9u);
  EXPECT_EQ(m.triangles.size(), 8u);
}

TEST(Generators, CylinderBoundaryIsTwoCircles) {
  const auto mesh = make_cylinder(2 * kPi, 0.2, 0.1);
  const auto topo = build_topology(mesh);
  for (std::size_t n = 0; n < topo.node_count(); ++n) {
    const double y = mesh.points[topo.point_of_node[n]].y;
    EXPECT_EQ(topo.node_on_boundary[n], y == 0.0 || y == 0.2) << n;
  }
}

TEST(Spectrum, UnitDiskAndCylinder) {
  const auto disk = steklov_spectrum(assemble_p1(make_disk(0.05)).network, 6);
  EXPECT_NEAR(disk.eigenvalues[1], 1.0, 1e-3);
  EXPECT_NEAR(disk.eigenvalues[2], 1.0, 1e-3);
  EXPECT_NEAR(disk.eigenvalues[3], 2.0, 5e-3);
  EXPECT_NEAR(disk.eigenvalues[5], 3.0, 2e-2);
  const double a = 0.3;
  const auto cyl = steklov_spectrum(assemble_p1(make_cylinder(2 * kPi, a, 0.05)).network, 2);
  EXPECT_NEAR(cyl.eigenvalues[1] / std::tanh(a / 2), 1.0, 5e-3);
}

TEST(MeshIo, RoundTripIsBitwise) {
  for (const TriangleMesh& m : {make_disk(0.3), make_cylinder(1.0, 0.4, 0.2)}) {
    const TriangleMesh back = load_mesh(save_mesh(m));
    EXPECT_TRUE(back == m);
    EXPECT_EQ(save_mesh(back), save_mesh(m));
  }
}

TEST(MeshIo, ReadsCommentsAndRho) {
  const std::string text =
      "SMESH 1\n# a unit square\n4 2 1\n0 0\n1 0\n1 1\n0 1\n\n0 1 2 2.0\n0 2 3 1.0\n0 1 3.5\n";
  const TriangleMesh m = load_mesh(text);
  ASSERT_EQ(m.rho.size(), 1u);
  const auto p1 = assemble_p1(m);
  EXPECT_NEAR(p1.network.boundary_mass[0], 0.5 * 3.5 + 0.5, 1e-15);
  const auto cx = mesh_to_complex(m);
  EXPECT_NEAR(cx.volume[0], 1.0, 1e-15);
  ASSERT_EQ(cx.interfaces.size(), 1u);
  EXPECT_NEAR(cx.interfaces[0].perimeter, std::sqrt(2.0) * 1.5, 1e-15);
}

TEST(MeshIo, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) -> std::string {
    try {
      load_mesh(text);
    } catch (const InputError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(message("SMESH 2\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("SMESH 1\n3 1 0\n0 0\n1 0\n0 x\n0 1 2 1\n").find("line 5"), std::string::npos);
  EXPECT_NE(message("SMESH 1\n3 1 0\n0 0\n1 0\n0 1\n0 1 5 1\n").find("line 6"), std::string::npos);
  EXPECT_NE(message("SMESH 1\n3 1 0\n0 0\n1 0\n0 1\n0 1 2 1\nbogus\n").find("line 7"),
            std::string::npos);
  EXPECT_NE(message("SMESH 1\n3 2 0\n0 0\n1 0\n0 1\n0 1 2 1\n").find("end of file"),
            std::string::npos);
}

TEST(Topology, RejectsStructuralDefects) {
  // Three triangles on one edge.
  TriangleMesh fan;
  fan.points = {{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {0.6, 2}};
  fan.triangles = {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}};
  fan.gamma = {1, 1, 1};
  EXPECT_THROW(build_topology(fan), StructuralError);

  auto tri = one_triangle({0, 0}, {1, 0}, {2, 0});
  EXPECT_THROW(build_topology(tri), StructuralError);  // zero area

  tri = one_triangle({0, 0}, {1, 0}, {0, 1});
  tri.points.push_back({5, 5});
  EXPECT_THROW(build_topology(tri), StructuralError);  // unused vertex

  tri = one_triangle({0, 0}, {1, 0}, {0, 1});
  tri.gamma = {0.0};
  EXPECT_THROW(build_topology(tri), StructuralError);

  TriangleMesh two;
  two.points = {{0, 0}, {1, 0}, {0, 1}, {5, 0}, {6, 0}, {5, 1}};
  two.triangles = {{0, 1, 2}, {3, 4, 5}};
  two.gamma = {1, 1};
  EXPECT_THROW(build_topology(two), StructuralError);  // disconnected

  TriangleMesh sq = load_mesh("SMESH 1\n4 2 0\n0 0\n1 0\n1 1\n0 1\n0 1 2 1\n0 2 3 1\n");
  sq.rho.push_back({0, 2, 1.0});  // the diagonal is interior
  EXPECT_THROW(build_topology(sq), StructuralError);
}

TEST(Topology, TriangleAverageAndCsv) {
  const auto m = make_rectangle(1.0, 1.0, 0.5);
  const auto topo = build_topology(m);
  Eigen::VectorXd f(static_cast<long>(topo.node_count()));
  for (std::size_t n = 0; n < topo.node_count(); ++n)
    f(static_cast<long>(n)) = m.points[topo.point_of_node[n]].x;
  const auto avg = triangle_average(m, topo, f);
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    double cx = 0;
    for (auto p : m.triangles[t]) cx += m.points[p].x / 3;
    EXPECT_NEAR(avg[t], cx, 1e-15);
  }
  const std::string csv = eigenfunction_csv(m, topo, f);
  EXPECT_EQ(csv.rfind("vertex_id,x,y,value\n", 0), 0u);
  const auto blocks = grid_blocks(m, 2, 2);
  EXPECT_EQ(std::set<std::size_t>(blocks.begin(), blocks.end()).size(), 4u);
}

TEST(Delaunay, EmptyCircumcircles) {
  testkit::Rng rng(17);
  std::vector<Point2> pts;
  for (int i = 0; i < 200; ++i)
    pts.push_back({testkit::uniform(rng, 0, 1), testkit::uniform(rng, 0, 1)});
  const auto tris = delaunay_triangulate(pts);
  for (const auto& t : tris) {
    const Point2 a = pts[t[0]], b = pts[t[1]], c = pts[t[2]];
    const double orient = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    EXPECT_GT(orient, 0.0);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      if (q == t[0] || q == t[1] || q == t[2]) continue;
      const Point2 d = pts[q];
      const double ax = a.x - d.x, ay = a.y - d.y, bx = b.x - d.x, by = b.y - d.y,
                   cx = c.x - d.x, cy = c.y - d.y;
      const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                         (bx * bx + by * by) * (ax * cy - cx * ay) +
                         (cx * cx + cy * cy) * (ax * by - bx * ay);
      EXPECT_LT(det, 1e-9);
    }
  }
  // Euler: every point used and the hull closes the count.
  std::set<std::size_t> used;
  for (const auto& t : tris) used.insert(t.begin(), t.end());
  EXPECT_EQ(used.size(), pts.size());
}

TEST(Delaunay, RejectsDuplicates) {
  EXPECT_THROW(delaunay_triangulate({{0, 0}, {1, 0}, {0, 1}, {1, 0}}), StructuralError);
}
