#pragma once

// Random instances and brute-force oracles shared by the unit and
// acceptance tests.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "steklov/cheeger.hpp"
#include "steklov/complex.hpp"

namespace steklov::testkit {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Spanning tree plus extra edges, no duplicates.
inline std::vector<std::pair<std::size_t, std::size_t>> random_connected_edges(
    Rng& rng, std::size_t n, std::size_t extra) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  auto add = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    auto key = std::minmax(a, b);
    if (seen.insert(key).second) out.emplace_back(a, b);
  };
  for (std::size_t v = 1; v < n; ++v) add(pick(rng, v), v);
  for (std::size_t i = 0; i < extra && n > 2; ++i) add(pick(rng, n), pick(rng, n));
  return out;
}

inline SteklovNetwork random_network(Rng& rng, std::size_t n) {
  SteklovNetwork net;
  net.is_boundary.assign(n, false);
  net.boundary_mass.assign(n, 0.0);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t nb = 2 + pick(rng, n - 1);  // 2..n boundary vertices
  for (std::size_t i = 0; i < nb; ++i) {
    net.is_boundary[order[i]] = true;
    net.boundary_mass[order[i]] = uniform(rng, 0.2, 2.0);
  }
  for (auto [a, b] : random_connected_edges(rng, n, n))
    net.edges.push_back({a, b, uniform(rng, 0.1, 2.0)});
  return net;
}

inline BoundaryComplex random_complex(Rng& rng, std::size_t n) {
  BoundaryComplex cx;
  for (std::size_t c = 0; c < n; ++c) cx.volume.push_back(uniform(rng, 0.1, 2.0));
  for (auto [a, b] : random_connected_edges(rng, n, n / 2 + 1))
    cx.interfaces.push_back({a, b, uniform(rng, 0.1, 2.0)});
  const std::size_t faces = 1 + pick(rng, n + 2);
  for (std::size_t i = 0; i < faces; ++i) cx.faces.push_back({pick(rng, n), uniform(rng, 0.1, 2.0)});
  return cx;
}

// A network and complex over the same vertex set, as a graph instance.
inline std::pair<SteklovNetwork, BoundaryComplex> random_pair(Rng& rng, std::size_t n) {
  SteklovNetwork net = random_network(rng, n);
  BoundaryComplex cx;
  for (std::size_t v = 0; v < n; ++v) cx.volume.push_back(uniform(rng, 0.1, 2.0));
  for (const auto& e : net.edges) cx.interfaces.push_back({e.a, e.b, uniform(rng, 0.1, 2.0)});
  for (std::size_t v = 0; v < n; ++v)
    if (net.is_boundary[v]) cx.faces.push_back({v, uniform(rng, 0.1, 2.0)});
  return {net, cx};
}

struct NaiveBest {
  double ratio = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> subset;
};

struct NaiveConstants {
  NaiveBest h;
  NaiveBest hprime;
};

// Every nonempty subset, each measured from scratch: interfaces summed in
// index order, cells in ascending order with each cell's exterior summed
// over its faces in face order first.
inline NaiveConstants naive_constants(const BoundaryComplex& cx, Constraint variant) {
  const std::size_t n = cx.cell_count();
  std::vector<double> cell_ext(n, 0.0);
  for (const auto& f : cx.faces) cell_ext[f.cell] += f.rho;
  double total_vol = 0.0, total_ext = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    total_vol += cx.volume[c];
    total_ext += cell_ext[c];
  }
  auto better = [](double r, const std::vector<std::size_t>& s, const NaiveBest& b) {
    if (r != b.ratio) return r < b.ratio;
    if (s.size() != b.subset.size()) return s.size() < b.subset.size();
    return s < b.subset;
  };
  NaiveConstants out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    auto in = [&](std::size_t c) { return ((mask >> c) & 1u) != 0; };
    double cut = 0.0, vol = 0.0, ext = 0.0;
    std::vector<std::size_t> s;
    for (const auto& f : cx.interfaces)
      if (in(f.a) != in(f.b)) cut += f.perimeter;
    for (std::size_t c = 0; c < n; ++c)
      if (in(c)) {
        vol += cx.volume[c];
        ext += cell_ext[c];
        s.push_back(c);
      }
    const bool ok = variant == Constraint::kVolumeHalf
                        ? vol > 0.0 && vol <= 0.5 * total_vol * (1.0 + kAdmissibleSlack)
                        : ext <= 0.5 * total_ext * (1.0 + kAdmissibleSlack);
    if (!ok) continue;
    if (vol > 0.0 && better(cut / vol, s, out.h)) out.h = {cut / vol, s};
    if (ext > 0.0 && better(cut / ext, s, out.hprime)) out.hprime = {cut / ext, s};
  }
  return out;
}

// Dense Schur complement built from scratch for the solver tests.
inline Eigen::MatrixXd dense_laplacian(const SteklovNetwork& net) {
  const long n = static_cast<long>(net.vertex_count());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : net.edges) {
    const long a = static_cast<long>(e.a), b = static_cast<long>(e.b);
    l(a, a) += e.conductance;
    l(b, b) += e.conductance;
    l(a, b) -= e.conductance;
    l(b, a) -= e.conductance;
  }
  return l;
}

}  // namespace steklov::testkit
