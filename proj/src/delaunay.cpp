#include "steklov/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "steklov/errors.hpp"

namespace steklov {
namespace {

constexpr double kFlipTol = 1e-12;

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> n;  // n[k]: neighbour across the edge opposite v[k]
};

class Triangulation {
 public:
  explicit Triangulation(const std::vector<Point2>& input) : pts_(input) {
    double x0 = input[0].x, x1 = x0, y0 = input[0].y, y1 = y0;
    for (const auto& p : input) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    extent_ = std::max({x1 - x0, y1 - y0, 1e-300});
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    const double big = 1e3 * extent_;
    real_count_ = static_cast<int>(input.size());
    pts_.push_back({cx, cy + 2.0 * big});
    pts_.push_back({cx - std::sqrt(3.0) * big, cy - big});
    pts_.push_back({cx + std::sqrt(3.0) * big, cy - big});
    tris_.push_back({{real_count_, real_count_ + 1, real_count_ + 2}, {-1, -1, -1}});
  }

  void insert(int p) {
    const int t = locate(p);
    const Tri& tri = tris_[t];
    const double eps = 1e-13 * extent_ * extent_;
    int on_edge = -1;
    for (int k = 0; k < 3; ++k) {
      const int a = tri.v[(k + 1) % 3], b = tri.v[(k + 2) % 3];
      const double o = orient(a, b, p);
      if (std::abs(o) <= eps * (dist2(a, b) / (extent_ * extent_) + 1e-30)) on_edge = k;
    }
    for (int k = 0; k < 3; ++k) {
      const Point2& q = pts_[tri.v[k]];
      if (q.x == pts_[p].x && q.y == pts_[p].y)
        throw StructuralError("delaunay: duplicate point " + std::to_string(p));
    }
    if (on_edge >= 0 && tri.n[on_edge] >= 0)
      split_edge(t, on_edge, p);
    else
      split_triangle(t, p);
  }

  std::vector<std::array<std::size_t, 3>> real_triangles() const {
    std::vector<std::array<std::size_t, 3>> out;
    for (const auto& t : tris_) {
      if (t.v[0] >= real_count_ || t.v[1] >= real_count_ || t.v[2] >= real_count_) continue;
      out.push_back({static_cast<std::size_t>(t.v[0]), static_cast<std::size_t>(t.v[1]),
                     static_cast<std::size_t>(t.v[2])});
    }
    return out;
  }

 private:
  double orient(int a, int b, int c) const {
    const Point2 &pa = pts_[a], &pb = pts_[b], &pc = pts_[c];
    return (pb.x - pa.x) * (pc.y - pa.y) - (pb.y - pa.y) * (pc.x - pa.x);
  }
  double dist2(int a, int b) const {
    const double dx = pts_[a].x - pts_[b].x, dy = pts_[a].y - pts_[b].y;
    return dx * dx + dy * dy;
  }
  // Cotangent of the angle at o in triangle (o, a, b).
  double cot(int o, int a, int b) const {
    const Point2 &po = pts_[o], &pa = pts_[a], &pb = pts_[b];
    const double ux = pa.x - po.x, uy = pa.y - po.y, vx = pb.x - po.x, vy = pb.y - po.y;
    return (ux * vx + uy * vy) / std::abs(ux * vy - uy * vx);
  }

  int locate(int p) {
    int t = last_;
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
      const Tri& tri = tris_[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int a = tri.v[(k + 1) % 3], b = tri.v[(k + 2) % 3];
        if (orient(a, b, p) < 0.0 && tri.n[k] >= 0) {
          next = tri.n[k];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // Walk did not settle; scan.
    int best = 0;
    double best_score = -1e300;
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      const Tri& tri = tris_[i];
      double worst = 1e300;
      for (int k = 0; k < 3; ++k)
        worst = std::min(worst, orient(tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], p));
      if (worst > best_score) {
        best_score = worst;
        best = i;
      }
    }
    return best;
  }

  void relink(int t, int old_nb, int new_nb) {
    if (t < 0) return;
    for (int k = 0; k < 3; ++k)
      if (tris_[t].n[k] == old_nb) {
        tris_[t].n[k] = new_nb;
        return;
      }
  }

  void split_triangle(int t, int p) {
    const Tri old = tris_[t];
    const int a = old.v[0], b = old.v[1], c = old.v[2];
    const int t1 = t;
    const int t2 = static_cast<int>(tris_.size());
    const int t3 = t2 + 1;
    // t1 = (p, a, b), t2 = (p, b, c), t3 = (p, c, a)
    tris_[t1] = {{p, a, b}, {old.n[2], t2, t3}};
    tris_.push_back({{p, b, c}, {old.n[0], t3, t1}});
    tris_.push_back({{p, c, a}, {old.n[1], t1, t2}});
    relink(old.n[0], t, t2);
    relink(old.n[1], t, t3);
    last_ = t1;
    legalize(t1, p);
    legalize(t2, p);
    legalize(t3, p);
  }

  void split_edge(int t, int k, int p) {
    const Tri old_t = tris_[t];
    const int a = old_t.v[(k + 1) % 3], b = old_t.v[(k + 2) % 3], c = old_t.v[k];
    const int u = old_t.n[k];
    const Tri old_u = tris_[u];
    int ku = 0;
    while (old_u.n[ku] != t) ++ku;
    const int d = old_u.v[ku];
    const int n_bc = old_t.n[(k + 1) % 3];  // across (b, c), opposite a
    const int n_ca = old_t.n[(k + 2) % 3];  // across (c, a), opposite b
    // old_u is (b, a, d) up to rotation
    int n_ad = -1, n_db = -1;
    for (int j = 0; j < 3; ++j) {
      if (old_u.v[j] == b) n_ad = old_u.n[j];
      if (old_u.v[j] == a) n_db = old_u.n[j];
    }
    const int t1 = t, t2 = u;
    const int t3 = static_cast<int>(tris_.size());
    const int t4 = t3 + 1;
    // t1 = (p, c, a), t2 = (p, b, c), t3 = (p, a, d), t4 = (p, d, b)
    tris_[t1] = {{p, c, a}, {n_ca, t3, t2}};
    tris_[t2] = {{p, b, c}, {n_bc, t1, t4}};
    tris_.push_back({{p, a, d}, {n_ad, t4, t1}});
    tris_.push_back({{p, d, b}, {n_db, t2, t3}});
    relink(n_bc, t, t2);
    relink(n_ad, u, t3);
    relink(n_db, u, t4);
    last_ = t1;
    legalize(t1, p);
    legalize(t2, p);
    legalize(t3, p);
    legalize(t4, p);
  }

  // Triangle t has apex p at v[0]; checks the edge opposite p recursively.
  void legalize(int t0, int p) {
    std::vector<int> stack{t0};
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      Tri& tri = tris_[t];
      int kp = 0;
      while (kp < 3 && tri.v[kp] != p) ++kp;
      if (kp == 3) continue;
      const int u = tri.n[kp];
      if (u < 0) continue;
      const int a = tri.v[(kp + 1) % 3], b = tri.v[(kp + 2) % 3];
      const Tri& ut = tris_[u];
      int ku = 0;
      while (ut.n[ku] != t) ++ku;
      const int d = ut.v[ku];
      if (cot(p, a, b) + cot(d, b, a) >= -kFlipTol) continue;
      if (!(orient(p, a, d) > 0.0 && orient(p, d, b) > 0.0)) continue;

      const int n_pa_opp = tri.n[(kp + 2) % 3];  // across (p, a), opposite b
      const int n_bp_opp = tri.n[(kp + 1) % 3];  // across (b, p), opposite a
      int n_ad = -1, n_db = -1;
      for (int j = 0; j < 3; ++j) {
        if (ut.v[j] == b) n_ad = ut.n[j];
        if (ut.v[j] == a) n_db = ut.n[j];
      }
      // t -> (p, a, d), u -> (p, d, b)
      tris_[t] = {{p, a, d}, {n_ad, u, n_pa_opp}};
      tris_[u] = {{p, d, b}, {n_db, n_bp_opp, t}};
      relink(n_ad, u, t);
      relink(n_bp_opp, t, u);
      stack.push_back(t);
      stack.push_back(u);
    }
  }

  std::vector<Point2> pts_;
  std::vector<Tri> tris_;
  int real_count_ = 0;
  int last_ = 0;
  double extent_ = 1.0;
};

}  // namespace

std::vector<std::array<std::size_t, 3>> delaunay_triangulate(
    const std::vector<Point2>& points) {
  if (points.size() < 3) throw StructuralError("delaunay: need at least three points");
  // Lexicographic insertion order keeps the walk short and is deterministic.
  std::vector<int> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (points[i].x != points[j].x) return points[i].x < points[j].x;
    return points[i].y < points[j].y;
  });
  Triangulation tri(points);
  for (int p : order) tri.insert(p);
  return tri.real_triangles();
}

}  // namespace steklov
