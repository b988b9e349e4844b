#include "steklov/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include "steklov/errors.hpp"

namespace steklov {
namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  // Next non-blank, non-comment line split into tokens; false at EOF.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++number_;
      std::istringstream ls(line);
      tokens.clear();
      for (std::string tok; ls >> tok;) tokens.push_back(tok);
      if (tokens.empty() || tokens[0][0] == '#') continue;
      return true;
    }
    return false;
  }
  int line() const { return number_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("mesh line " + std::to_string(number_) + ": " + msg);
  }

  double number(const std::string& tok) const {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
      fail("expected a number, got \"" + tok + "\"");
    return v;
  }

  std::size_t index(const std::string& tok) const {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      fail("expected a nonnegative integer, got \"" + tok + "\"");
    return v;
  }

 private:
  std::istringstream in_;
  int number_ = 0;
};

}  // namespace

bool operator==(const TriangleMesh& a, const TriangleMesh& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i)
    if (a.points[i].x != b.points[i].x || a.points[i].y != b.points[i].y) return false;
  if (a.rho.size() != b.rho.size()) return false;
  for (std::size_t i = 0; i < a.rho.size(); ++i)
    if (a.rho[i].i != b.rho[i].i || a.rho[i].j != b.rho[i].j || a.rho[i].rho != b.rho[i].rho)
      return false;
  return a.triangles == b.triangles && a.gamma == b.gamma && a.periodic == b.periodic;
}

double triangle_area(const TriangleMesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles[t];
  return 0.5 * cross(mesh.points[tri[0]], mesh.points[tri[1]], mesh.points[tri[2]]);
}

MeshTopology build_topology(const TriangleMesh& mesh) {
  const std::size_t np = mesh.points.size();
  const std::size_t nt = mesh.triangles.size();
  if (nt == 0) throw StructuralError("mesh has no triangles");
  if (mesh.gamma.size() != nt)
    throw StructuralError("mesh needs one gamma value per triangle");

  std::vector<std::size_t> parent(np);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (const auto& [i, j] : mesh.periodic) {
    if (i >= np || j >= np) throw InputError("PERIODIC references a missing vertex");
    std::size_t a = find_root(parent, i), b = find_root(parent, j);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }

  std::vector<bool> used(np, false);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t v : mesh.triangles[t]) {
      if (v >= np)
        throw InputError("triangle " + std::to_string(t) + " references missing vertex " +
                         std::to_string(v));
      used[v] = true;
    }
    if (!(mesh.gamma[t] > 0.0))
      throw StructuralError("triangle " + std::to_string(t) + " has nonpositive gamma");
    if (!(triangle_area(mesh, t) > 0.0))
      throw StructuralError("triangle " + std::to_string(t) +
                            " has nonpositive area (clockwise or degenerate)");
  }

  MeshTopology topo;
  topo.node_of_point.assign(np, 0);
  std::vector<long> node_of_root(np, -1);
  for (std::size_t p = 0; p < np; ++p) {
    const std::size_t r = find_root(parent, p);
    if (node_of_root[r] < 0) {
      node_of_root[r] = static_cast<long>(topo.point_of_node.size());
      topo.point_of_node.push_back(p);
    }
    topo.node_of_point[p] = static_cast<std::size_t>(node_of_root[r]);
  }
  std::vector<bool> node_used(topo.node_count(), false);
  for (std::size_t p = 0; p < np; ++p)
    if (used[p]) node_used[topo.node_of_point[p]] = true;
  for (std::size_t n = 0; n < topo.node_count(); ++n)
    if (!node_used[n])
      throw StructuralError("vertex " + std::to_string(topo.point_of_node[n]) +
                            " belongs to no triangle");

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index;
  struct Pending {
    std::size_t t, corner, pa, pb;
  };
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Pending>> incident;
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    for (std::size_t k = 0; k < 3; ++k) {
      std::size_t pa = tri[(k + 1) % 3], pb = tri[(k + 2) % 3];
      std::size_t a = topo.node_of_point[pa], b = topo.node_of_point[pb];
      if (a == b)
        throw StructuralError("triangle " + std::to_string(t) +
                              " collapses under periodic identification");
      if (a > b) {
        std::swap(a, b);
        std::swap(pa, pb);
      }
      auto& list = incident[{a, b}];
      list.push_back({t, k, pa, pb});
      if (list.size() > 2)
        throw StructuralError("non-manifold edge (" + std::to_string(pa) + ", " +
                              std::to_string(pb) + ") shared by three or more triangles");
    }
  }
  topo.triangle_edges.assign(nt, {0, 0, 0});
  topo.node_on_boundary.assign(topo.node_count(), false);
  for (const auto& [key, list] : incident) {
    MeshTopology::Edge e;
    e.a = key.first;
    e.b = key.second;
    e.pa = list[0].pa;
    e.pb = list[0].pb;
    const std::size_t idx = topo.edges.size();
    for (std::size_t s = 0; s < list.size(); ++s) {
      e.triangles[s] = static_cast<long>(list[s].t);
      topo.triangle_edges[list[s].t][list[s].corner] = idx;
    }
    if (e.boundary()) {
      topo.node_on_boundary[e.a] = true;
      topo.node_on_boundary[e.b] = true;
    }
    edge_index[key] = idx;
    topo.edges.push_back(e);
  }

  for (const auto& entry : mesh.rho) {
    if (entry.i >= np || entry.j >= np)
      throw InputError("rho line references a missing vertex");
    auto key = std::minmax(topo.node_of_point[entry.i], topo.node_of_point[entry.j]);
    auto it = edge_index.find(key);
    if (it == edge_index.end() || !topo.edges[it->second].boundary())
      throw StructuralError("rho given for (" + std::to_string(entry.i) + ", " +
                            std::to_string(entry.j) + "), which is not a boundary edge");
    if (!(entry.rho > 0.0)) throw StructuralError("rho must be positive");
    topo.edges[it->second].rho = entry.rho;
  }

  // Edge connectivity over triangles.
  std::vector<bool> seen(nt, false);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!q.empty()) {
    const std::size_t t = q.front();
    q.pop();
    for (std::size_t ei : topo.triangle_edges[t]) {
      for (long other : topo.edges[ei].triangles) {
        if (other >= 0 && !seen[static_cast<std::size_t>(other)]) {
          seen[static_cast<std::size_t>(other)] = true;
          ++reached;
          q.push(static_cast<std::size_t>(other));
        }
      }
    }
  }
  if (reached != nt) throw StructuralError("mesh is not edge-connected");
  return topo;
}

TriangleMesh load_mesh(const std::string& text) {
  LineReader reader(text);
  std::vector<std::string> tok;
  if (!reader.next(tok) || tok.size() != 2 || tok[0] != "SMESH" || tok[1] != "1")
    reader.fail("expected header \"SMESH 1\"");
  if (!reader.next(tok) || tok.size() != 3)
    reader.fail("expected counts \"<vertices> <triangles> <rho lines>\"");
  const std::size_t nv = reader.index(tok[0]);
  const std::size_t nt = reader.index(tok[1]);
  const std::size_t nr = reader.index(tok[2]);

  TriangleMesh mesh;
  mesh.points.reserve(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    if (!reader.next(tok)) reader.fail("unexpected end of file in vertex block");
    if (tok.size() != 2) reader.fail("vertex line needs \"x y\"");
    mesh.points.push_back({reader.number(tok[0]), reader.number(tok[1])});
  }
  for (std::size_t i = 0; i < nt; ++i) {
    if (!reader.next(tok)) reader.fail("unexpected end of file in triangle block");
    if (tok.size() != 4) reader.fail("triangle line needs \"i j k gamma\"");
    std::array<std::size_t, 3> tri{};
    for (std::size_t k = 0; k < 3; ++k) {
      tri[k] = reader.index(tok[k]);
      if (tri[k] >= nv) reader.fail("vertex index " + tok[k] + " out of range");
    }
    mesh.triangles.push_back(tri);
    mesh.gamma.push_back(reader.number(tok[3]));
  }
  for (std::size_t i = 0; i < nr; ++i) {
    if (!reader.next(tok)) reader.fail("unexpected end of file in rho block");
    if (tok.size() != 3) reader.fail("rho line needs \"i j rho\"");
    RhoEntry r{reader.index(tok[0]), reader.index(tok[1]), reader.number(tok[2])};
    if (r.i >= nv || r.j >= nv) reader.fail("vertex index out of range");
    mesh.rho.push_back(r);
  }
  while (reader.next(tok)) {
    if (tok.size() != 3 || tok[0] != "PERIODIC") reader.fail("expected \"PERIODIC i j\"");
    const std::size_t i = reader.index(tok[1]), j = reader.index(tok[2]);
    if (i >= nv || j >= nv) reader.fail("vertex index out of range");
    mesh.periodic.emplace_back(i, j);
  }
  build_topology(mesh);
  return mesh;
}

std::string save_mesh(const TriangleMesh& mesh) {
  std::string out = "SMESH 1\n";
  out += std::to_string(mesh.points.size()) + " " + std::to_string(mesh.triangles.size()) +
         " " + std::to_string(mesh.rho.size()) + "\n";
  for (const auto& p : mesh.points) out += fmt17(p.x) + " " + fmt17(p.y) + "\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    out += std::to_string(tri[0]) + " " + std::to_string(tri[1]) + " " +
           std::to_string(tri[2]) + " " + fmt17(mesh.gamma[t]) + "\n";
  }
  for (const auto& r : mesh.rho)
    out += std::to_string(r.i) + " " + std::to_string(r.j) + " " + fmt17(r.rho) + "\n";
  for (const auto& [i, j] : mesh.periodic)
    out += "PERIODIC " + std::to_string(i) + " " + std::to_string(j) + "\n";
  return out;
}

P1Assembly assemble_p1(const TriangleMesh& mesh, const MeshTopology& topo) {
  std::vector<double> conductance(topo.edges.size(), 0.0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (std::size_t k = 0; k < 3; ++k) {
      const Point2& o = mesh.points[tri[k]];
      const Point2& a = mesh.points[tri[(k + 1) % 3]];
      const Point2& b = mesh.points[tri[(k + 2) % 3]];
      const double dot = (a.x - o.x) * (b.x - o.x) + (a.y - o.y) * (b.y - o.y);
      const double cot = dot / std::abs(cross(o, a, b));
      conductance[topo.triangle_edges[t][k]] += 0.5 * mesh.gamma[t] * cot;
    }
  }
  double peak = 0.0;
  for (double c : conductance) peak = std::max(peak, std::abs(c));

  P1Assembly out;
  auto& net = out.network;
  net.is_boundary = topo.node_on_boundary;
  net.boundary_mass.assign(topo.node_count(), 0.0);
  for (std::size_t i = 0; i < topo.edges.size(); ++i) {
    const auto& e = topo.edges[i];
    if (e.boundary()) {
      const double half = 0.5 * e.rho * distance(mesh.points[e.pa], mesh.points[e.pb]);
      net.boundary_mass[e.a] += half;
      net.boundary_mass[e.b] += half;
    }
    const double c = conductance[i];
    if (std::abs(c) <= 1e-10 * peak) {
      ++out.dropped_edges;
      continue;
    }
    if (c < 0.0)
      out.diagnostics.push_back("negative conductance " + fmt17(c) + " on edge (" +
                                std::to_string(e.pa) + ", " + std::to_string(e.pb) + ")");
    net.edges.push_back({e.a, e.b, c});
  }
  return out;
}

P1Assembly assemble_p1(const TriangleMesh& mesh) {
  return assemble_p1(mesh, build_topology(mesh));
}

BoundaryComplex mesh_to_complex(const TriangleMesh& mesh, const MeshTopology& topo) {
  BoundaryComplex c;
  c.volume.reserve(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    c.volume.push_back(triangle_area(mesh, t) * mesh.gamma[t]);
  for (const auto& e : topo.edges) {
    const double len = distance(mesh.points[e.pa], mesh.points[e.pb]);
    const auto t0 = static_cast<std::size_t>(e.triangles[0]);
    if (e.boundary()) {
      c.faces.push_back({t0, len * e.rho});
    } else {
      const auto t1 = static_cast<std::size_t>(e.triangles[1]);
      c.interfaces.push_back(
          {std::min(t0, t1), std::max(t0, t1), len * 0.5 * (mesh.gamma[t0] + mesh.gamma[t1])});
    }
  }
  return c;
}

BoundaryComplex mesh_to_complex(const TriangleMesh& mesh) {
  return mesh_to_complex(mesh, build_topology(mesh));
}

std::vector<double> triangle_average(const TriangleMesh& mesh, const MeshTopology& topo,
                                     const Eigen::VectorXd& node_field) {
  if (node_field.size() != static_cast<long>(topo.node_count()))
    throw std::invalid_argument("triangle_average: one value per node required");
  std::vector<double> out;
  out.reserve(mesh.triangles.size());
  for (const auto& tri : mesh.triangles) {
    double s = 0.0;
    for (std::size_t p : tri) s += node_field(static_cast<long>(topo.node_of_point[p]));
    out.push_back(s / 3.0);
  }
  return out;
}

std::string eigenfunction_csv(const TriangleMesh& mesh, const MeshTopology& topo,
                              const Eigen::VectorXd& node_field) {
  std::string out = "vertex_id,x,y,value\n";
  for (std::size_t n = 0; n < topo.node_count(); ++n) {
    const Point2& p = mesh.points[topo.point_of_node[n]];
    out += std::to_string(n) + "," + fmt17(p.x) + "," + fmt17(p.y) + "," +
           fmt17(node_field(static_cast<long>(n))) + "\n";
  }
  return out;
}

std::vector<std::size_t> grid_blocks(const TriangleMesh& mesh, std::size_t nx,
                                     std::size_t ny) {
  if (nx == 0 || ny == 0) throw std::invalid_argument("grid_blocks: empty grid");
  double x0 = mesh.points[0].x, x1 = x0, y0 = mesh.points[0].y, y1 = y0;
  for (const auto& p : mesh.points) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  auto bin = [](double v, double lo, double hi, std::size_t n) -> std::size_t {
    if (!(hi > lo)) return 0;
    const double f = std::floor((v - lo) / (hi - lo) * static_cast<double>(n));
    return static_cast<std::size_t>(std::clamp(f, 0.0, static_cast<double>(n - 1)));
  };
  std::vector<std::size_t> out;
  out.reserve(mesh.triangles.size());
  for (const auto& tri : mesh.triangles) {
    double cx = 0.0, cy = 0.0;
    for (std::size_t p : tri) {
      cx += mesh.points[p].x;
      cy += mesh.points[p].y;
    }
    cx /= 3.0;
    cy /= 3.0;
    out.push_back(bin(cy, y0, y1, ny) * nx + bin(cx, x0, x1, nx));
  }
  return out;
}

}  // namespace steklov
