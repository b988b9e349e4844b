#include "steklov/mesh_gen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "steklov/delaunay.hpp"

namespace steklov {
namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::size_t segments(double length, double h) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / h - 1e-9)));
}

// Triangulates the points, keeps triangles whose centroid is inside, drops
// unreferenced points and renumbers.
TriangleMesh carve(const std::vector<Point2>& pts,
                   const std::function<bool(double, double)>& inside) {
  const auto tris = delaunay_triangulate(pts);
  std::vector<long> remap(pts.size(), -1);
  TriangleMesh mesh;
  for (const auto& t : tris) {
    const double cx = (pts[t[0]].x + pts[t[1]].x + pts[t[2]].x) / 3.0;
    const double cy = (pts[t[0]].y + pts[t[1]].y + pts[t[2]].y) / 3.0;
    if (!inside(cx, cy)) continue;
    std::array<std::size_t, 3> out{};
    for (int k = 0; k < 3; ++k) out[k] = t[k];
    mesh.triangles.push_back(out);
  }
  // Number points by first appearance in ascending point order.
  for (const auto& t : mesh.triangles)
    for (std::size_t p : t) remap[p] = 0;
  std::size_t next = 0;
  for (std::size_t p = 0; p < pts.size(); ++p)
    if (remap[p] >= 0) {
      remap[p] = static_cast<long>(next++);
      mesh.points.push_back(pts[p]);
    }
  for (auto& t : mesh.triangles)
    for (auto& p : t) p = static_cast<std::size_t>(remap[p]);
  mesh.gamma.assign(mesh.triangles.size(), 1.0);
  return mesh;
}

double segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace

TriangleMesh make_disk(double h) {
  require(h > 0.0, "make_disk: h must be positive");
  const std::size_t rings = segments(1.0, h);
  std::vector<Point2> pts{{0.0, 0.0}};
  for (std::size_t j = 1; j <= rings; ++j) {
    const double r = static_cast<double>(j) / static_cast<double>(rings);
    const std::size_t count = 6 * j;
    for (std::size_t i = 0; i < count; ++i) {
      const double theta = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(count);
      pts.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
  }
  return carve(pts, [](double, double) { return true; });
}

TriangleMesh make_annulus(double r_in, double r_out, double h) {
  require(h > 0.0, "make_annulus: h must be positive");
  require(r_in > 0.0 && r_in < r_out, "make_annulus: need 0 < r_in < r_out");
  const std::size_t layers = segments(r_out - r_in, h);
  std::vector<Point2> pts;
  for (std::size_t j = 0; j <= layers; ++j) {
    const double r = r_in + (r_out - r_in) * static_cast<double>(j) / static_cast<double>(layers);
    const std::size_t count = std::max<std::size_t>(6, segments(2.0 * kPi * r, h));
    const double offset = (j % 2 == 1) ? kPi / static_cast<double>(count) : 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double theta =
          offset + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(count);
      pts.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
  }
  return carve(pts, [r_in](double x, double y) { return std::hypot(x, y) > r_in; });
}

TriangleMesh make_rectangle(double width, double height, double h) {
  require(h > 0.0 && width > 0.0 && height > 0.0, "make_rectangle: positive sizes required");
  const std::size_t nx = segments(width, h), ny = segments(height, h);
  TriangleMesh mesh;
  for (std::size_t j = 0; j <= ny; ++j)
    for (std::size_t i = 0; i <= nx; ++i)
      mesh.points.push_back({width * static_cast<double>(i) / static_cast<double>(nx),
                             height * static_cast<double>(j) / static_cast<double>(ny)});
  auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  mesh.gamma.assign(mesh.triangles.size(), 1.0);
  return mesh;
}

TriangleMesh make_cylinder(double circumference, double a, double h) {
  require(h > 0.0 && circumference > 0.0 && a > 0.0, "make_cylinder: positive sizes required");
  // Column count is a multiple of 6 so angular halves, thirds and sixths
  // fall on grid lines.
  const std::size_t nx = 6 * ((segments(circumference, h) + 5) / 6);
  const std::size_t ny = std::max<std::size_t>(2, segments(a, h));
  TriangleMesh mesh;
  for (std::size_t j = 0; j <= ny; ++j)
    for (std::size_t i = 0; i <= nx; ++i)
      mesh.points.push_back(
          {circumference * static_cast<double>(i) / static_cast<double>(nx),
           a * static_cast<double>(j) / static_cast<double>(ny)});
  auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  mesh.gamma.assign(mesh.triangles.size(), 1.0);
  for (std::size_t j = 0; j <= ny; ++j) mesh.periodic.emplace_back(id(0, j), id(nx, j));
  return mesh;
}

TriangleMesh make_dumbbell(double r, double w, double neck_length, double h) {
  require(h > 0.0 && r > 0.0 && w > 0.0 && neck_length > 0.0,
          "make_dumbbell: positive sizes required");
  require(w < 2.0 * r, "make_dumbbell: neck width must be below the disk diameter");
  const double d = 0.5 * neck_length + r;
  const double phi = std::asin(0.5 * w / r);
  const double xc = d - r * std::cos(phi);
  const double half = 0.5 * w;

  std::vector<Point2> boundary;
  // Right disk: from the lower corner counterclockwise round to the upper corner.
  auto arc = [&](double cx, double from, double to) {
    const std::size_t n = segments(r * (to - from), h);
    for (std::size_t i = 1; i < n; ++i) {
      const double t = from + (to - from) * static_cast<double>(i) / static_cast<double>(n);
      boundary.push_back({cx + r * std::cos(t), r * std::sin(t)});
    }
  };
  auto line = [&](double y, double from, double to) {
    const std::size_t n = segments(std::abs(to - from), h);
    for (std::size_t i = 1; i < n; ++i)
      boundary.push_back({from + (to - from) * static_cast<double>(i) / static_cast<double>(n), y});
  };
  const Point2 lower_right{xc, -half}, upper_right{xc, half};
  const Point2 upper_left{-xc, half}, lower_left{-xc, -half};
  boundary.push_back(lower_right);
  arc(d, kPi + phi, 3.0 * kPi - phi);
  boundary.push_back(upper_right);
  line(half, xc, -xc);
  boundary.push_back(upper_left);
  arc(-d, phi, 2.0 * kPi - phi);
  boundary.push_back(lower_left);
  line(-half, -xc, xc);

  auto inside = [=](double x, double y) {
    if (std::hypot(x - d, y) < r || std::hypot(x + d, y) < r) return true;
    return std::abs(x) <= d && std::abs(y) < half;
  };

  std::vector<Point2> pts = boundary;
  const double row = h * std::sqrt(3.0) / 2.0;
  const long rows = static_cast<long>(std::ceil(r / row));
  const long cols = static_cast<long>(std::ceil((d + r) / h)) + 1;
  const double clearance = 0.6 * h;
  for (long k = -rows; k <= rows; ++k) {
    const double y = static_cast<double>(k) * row;
    const double shift = (k % 2 != 0) ? 0.5 * h : 0.0;
    for (long i = -cols; i <= cols; ++i) {
      const double x = static_cast<double>(i) * h + shift;
      if (!inside(x, y)) continue;
      const Point2 p{x, y};
      bool clear = true;
      for (std::size_t b = 0; b < boundary.size() && clear; ++b)
        if (segment_distance(p, boundary[b], boundary[(b + 1) % boundary.size()]) < clearance)
          clear = false;
      if (clear) pts.push_back(p);
    }
  }
  return carve(pts, inside);
}

}  // namespace steklov
