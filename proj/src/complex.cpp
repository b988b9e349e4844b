#include "steklov/complex.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace steklov {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::string pair_name(std::size_t a, std::size_t b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

std::vector<std::size_t> SteklovNetwork::boundary_vertices() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < is_boundary.size(); ++v)
    if (is_boundary[v]) out.push_back(v);
  return out;
}

std::vector<std::size_t> SteklovNetwork::interior_vertices() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < is_boundary.size(); ++v)
    if (!is_boundary[v]) out.push_back(v);
  return out;
}

std::string SteklovNetwork::label(std::size_t v) const {
  return v < labels.size() ? labels[v] : std::to_string(v);
}

std::string BoundaryComplex::label(std::size_t c) const {
  return c < labels.size() ? labels[c] : std::to_string(c);
}

Diagnostics validate_network(const SteklovNetwork& net) {
  Diagnostics out;
  const std::size_t n = net.vertex_count();
  if (net.boundary_mass.size() != n) {
    out.push_back({"size mismatch", "boundary_mass has " +
                                        std::to_string(net.boundary_mass.size()) +
                                        " entries for " + std::to_string(n) +
                                        " vertices"});
    return out;
  }
  if (net.boundary_vertices().empty())
    out.push_back({"no boundary vertex", "network"});
  for (std::size_t v = 0; v < n; ++v) {
    if (net.is_boundary[v] && !(net.boundary_mass[v] > 0.0))
      out.push_back({"nonpositive boundary mass", "vertex " + net.label(v)});
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  DisjointSets sets(n);
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto& edge = net.edges[e];
    const std::string where = "edge " + std::to_string(e) + " " +
                              pair_name(edge.a, edge.b);
    if (edge.a >= n || edge.b >= n) {
      out.push_back({"dangling edge", where});
      continue;
    }
    if (edge.a == edge.b) out.push_back({"self-loop", where});
    if (!(edge.conductance > 0.0))
      out.push_back({"nonpositive conductance", where});
    auto key = std::minmax(edge.a, edge.b);
    if (!seen.insert(key).second) out.push_back({"duplicate edge", where});
    sets.unite(edge.a, edge.b);
  }
  for (std::size_t v = 1; v < n; ++v) {
    if (sets.find(v) != sets.find(0)) {
      out.push_back({"disconnected", "vertex " + net.label(v) +
                                         " unreachable from vertex " +
                                         net.label(0)});
      break;
    }
  }
  return out;
}

Diagnostics validate_complex(const BoundaryComplex& complex) {
  Diagnostics out;
  const std::size_t n = complex.cell_count();
  double vol = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    if (!(complex.volume[c] >= 0.0))
      out.push_back({"negative volume", "cell " + complex.label(c)});
    vol += complex.volume[c];
  }
  if (!(vol > 0.0)) out.push_back({"zero total volume", "complex"});

  std::set<std::pair<std::size_t, std::size_t>> seen;
  DisjointSets sets(n);
  for (std::size_t i = 0; i < complex.interfaces.size(); ++i) {
    const auto& f = complex.interfaces[i];
    const std::string where =
        "interface " + std::to_string(i) + " " + pair_name(f.a, f.b);
    if (f.a >= n || f.b >= n) {
      out.push_back({"dangling interface", where});
      continue;
    }
    if (f.a == f.b) out.push_back({"self-interface", where});
    if (!(f.perimeter >= 0.0)) out.push_back({"negative perimeter", where});
    if (!seen.insert(std::minmax(f.a, f.b)).second)
      out.push_back({"duplicate interface", where});
    sets.unite(f.a, f.b);
  }
  double rho = 0.0;
  for (std::size_t i = 0; i < complex.faces.size(); ++i) {
    const auto& face = complex.faces[i];
    const std::string where = "boundary face " + std::to_string(i);
    if (face.cell >= n) {
      out.push_back({"dangling boundary face", where});
      continue;
    }
    if (!(face.rho >= 0.0)) out.push_back({"negative rho weight", where});
    rho += face.rho;
  }
  if (!(rho > 0.0)) out.push_back({"no exterior boundary", "complex"});
  for (std::size_t c = 1; c < n; ++c) {
    if (sets.find(c) != sets.find(0)) {
      out.push_back({"disconnected", "cell " + complex.label(c) +
                                         " unreachable from cell " +
                                         complex.label(0)});
      break;
    }
  }
  return out;
}

std::pair<SteklovNetwork, BoundaryComplex> scale_metric(
    const SteklovNetwork& net, const BoundaryComplex& complex, double lambda,
    Dimension dim) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("scale_metric: lambda must be positive");
  if (dim.n < 1) throw std::invalid_argument("scale_metric: dimension n < 1");
  const double energy = std::pow(lambda, dim.n - 2);
  const double area = std::pow(lambda, dim.n - 1);
  const double vol = std::pow(lambda, dim.n);

  SteklovNetwork out_net = net;
  for (auto& e : out_net.edges) e.conductance *= energy;
  for (std::size_t v = 0; v < out_net.vertex_count(); ++v)
    if (out_net.is_boundary[v]) out_net.boundary_mass[v] *= area;

  BoundaryComplex out_complex = complex;
  for (auto& w : out_complex.volume) w *= vol;
  for (auto& f : out_complex.interfaces) f.perimeter *= area;
  for (auto& f : out_complex.faces) f.rho *= area;
  return {std::move(out_net), std::move(out_complex)};
}

BoundaryComplex coarsen(const BoundaryComplex& complex,
                        const std::vector<std::size_t>& block_of_cell) {
  if (block_of_cell.size() != complex.cell_count())
    throw std::invalid_argument("coarsen: one block label per cell required");
  std::map<std::size_t, std::size_t> index;
  for (std::size_t label : block_of_cell) index.emplace(label, 0);
  std::size_t next = 0;
  for (auto& [label, idx] : index) idx = next++;

  BoundaryComplex out;
  out.volume.assign(next, 0.0);
  for (auto& [label, idx] : index) out.labels.push_back("B" + std::to_string(label));
  for (std::size_t c = 0; c < complex.cell_count(); ++c)
    out.volume[index.at(block_of_cell[c])] += complex.volume[c];

  std::map<std::pair<std::size_t, std::size_t>, double> merged;
  for (const auto& f : complex.interfaces) {
    const std::size_t a = index.at(block_of_cell[f.a]);
    const std::size_t b = index.at(block_of_cell[f.b]);
    if (a == b) continue;
    merged[std::minmax(a, b)] += f.perimeter;
  }
  for (const auto& [key, p] : merged) out.interfaces.push_back({key.first, key.second, p});

  std::vector<double> rho(next, 0.0);
  std::vector<bool> has_face(next, false);
  for (const auto& face : complex.faces) {
    const std::size_t b = index.at(block_of_cell[face.cell]);
    rho[b] += face.rho;
    has_face[b] = true;
  }
  for (std::size_t b = 0; b < next; ++b)
    if (has_face[b]) out.faces.push_back({b, rho[b]});
  return out;
}

double total_volume(const BoundaryComplex& complex) {
  double s = 0.0;
  for (double v : complex.volume) s += v;
  return s;
}

double total_rho(const BoundaryComplex& complex) {
  double s = 0.0;
  for (const auto& f : complex.faces) s += f.rho;
  return s;
}

}  // namespace steklov
