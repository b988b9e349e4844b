#include "steklov/graph_io.hpp"

#include <map>
#include <set>

#include "json.hpp"
#include "steklov/errors.hpp"

namespace steklov {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw InputError(where + ": unknown field \"" + it.key() + "\"");
}

std::optional<double> optional_number(const json& obj, const char* key,
                                      const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_number())
    throw InputError(where + ": field \"" + key + "\" must be a number");
  return it->get<double>();
}

std::string id_string(const json& value, const std::string& where,
                      const char* key) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  throw InputError(where + ": field \"" + key + "\" must be a string or integer");
}

const json& required(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw InputError(where + ": missing field \"" + key + "\"");
  return *it;
}

double require_value(const std::optional<double>& v, const char* key,
                     const std::string& where) {
  if (!v) throw InputError(where + ": missing field \"" + key + "\"");
  return *v;
}

}  // namespace

GraphInput parse_graph_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("graph JSON: top level must be an object");
  reject_unknown(doc, {"dimension", "vertices", "edges"}, "graph");

  GraphInput g;
  if (auto it = doc.find("dimension"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<int>() < 1)
      throw InputError("graph: \"dimension\" must be a positive integer");
    g.dimension.n = it->get<int>();
  }
  const json& vertices = required(doc, "vertices", "graph");
  if (!vertices.is_array()) throw InputError("graph: \"vertices\" must be an array");
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const json& v = vertices[i];
    const std::string where = "vertex " + std::to_string(i);
    if (!v.is_object()) throw InputError(where + ": must be an object");
    reject_unknown(v, {"id", "boundary", "volume_weight", "boundary_mass", "rho_weight"},
                   where);
    GraphVertex gv;
    gv.id = id_string(required(v, "id", where), where, "id");
    const json& b = required(v, "boundary", where);
    if (!b.is_boolean()) throw InputError(where + ": field \"boundary\" must be a boolean");
    gv.boundary = b.get<bool>();
    gv.volume_weight = optional_number(v, "volume_weight", where);
    gv.boundary_mass = optional_number(v, "boundary_mass", where);
    gv.rho_weight = optional_number(v, "rho_weight", where);
    g.vertices.push_back(std::move(gv));
  }
  const json& edges = required(doc, "edges", "graph");
  if (!edges.is_array()) throw InputError("graph: \"edges\" must be an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const json& e = edges[i];
    const std::string where = "edge " + std::to_string(i);
    if (!e.is_object()) throw InputError(where + ": must be an object");
    reject_unknown(e, {"source", "target", "conductance", "perimeter_weight"}, where);
    GraphEdge ge;
    ge.source = id_string(required(e, "source", where), where, "source");
    ge.target = id_string(required(e, "target", where), where, "target");
    ge.conductance = optional_number(e, "conductance", where);
    ge.perimeter_weight = optional_number(e, "perimeter_weight", where);
    g.edges.push_back(std::move(ge));
  }
  return g;
}

std::string graph_to_json(const GraphInput& graph) {
  json doc;
  doc["dimension"] = graph.dimension.n;
  json vertices = json::array();
  for (const auto& v : graph.vertices) {
    json jv;
    jv["id"] = v.id;
    jv["boundary"] = v.boundary;
    if (v.volume_weight) jv["volume_weight"] = *v.volume_weight;
    if (v.boundary_mass) jv["boundary_mass"] = *v.boundary_mass;
    if (v.rho_weight) jv["rho_weight"] = *v.rho_weight;
    vertices.push_back(std::move(jv));
  }
  json edges = json::array();
  for (const auto& e : graph.edges) {
    json je;
    je["source"] = e.source;
    je["target"] = e.target;
    if (e.conductance) je["conductance"] = *e.conductance;
    if (e.perimeter_weight) je["perimeter_weight"] = *e.perimeter_weight;
    edges.push_back(std::move(je));
  }
  doc["vertices"] = std::move(vertices);
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

GraphInstance graph_to_pair(const GraphInput& graph) {
  GraphInstance out;
  out.dimension = graph.dimension;
  auto& net = out.network;
  auto& complex = out.complex;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
    const auto& v = graph.vertices[i];
    const std::string where = "vertex \"" + v.id + "\"";
    if (!index.emplace(v.id, i).second)
      throw InputError(where + ": duplicate id");
    net.is_boundary.push_back(v.boundary);
    net.labels.push_back(v.id);
    complex.labels.push_back(v.id);
    complex.volume.push_back(require_value(v.volume_weight, "volume_weight", where));
    if (v.boundary) {
      net.boundary_mass.push_back(require_value(v.boundary_mass, "boundary_mass", where));
      complex.faces.push_back({i, require_value(v.rho_weight, "rho_weight", where)});
    } else {
      if (v.boundary_mass)
        throw InputError(where + ": field \"boundary_mass\" on an interior vertex");
      if (v.rho_weight)
        throw InputError(where + ": field \"rho_weight\" on an interior vertex");
      net.boundary_mass.push_back(0.0);
    }
  }
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const auto& e = graph.edges[i];
    const std::string where = "edge " + std::to_string(i);
    auto a = index.find(e.source);
    auto b = index.find(e.target);
    if (a == index.end()) throw InputError(where + ": unknown source \"" + e.source + "\"");
    if (b == index.end()) throw InputError(where + ": unknown target \"" + e.target + "\"");
    net.edges.push_back(
        {a->second, b->second, require_value(e.conductance, "conductance", where)});
    complex.interfaces.push_back(
        {a->second, b->second,
         require_value(e.perimeter_weight, "perimeter_weight", where)});
  }
  return out;
}

GraphInput pair_to_graph(const SteklovNetwork& net, const BoundaryComplex& complex,
                         Dimension dim) {
  if (net.vertex_count() != complex.cell_count() ||
      net.edges.size() != complex.interfaces.size())
    throw std::invalid_argument("pair_to_graph: network and complex index spaces differ");
  GraphInput g;
  g.dimension = dim;
  std::vector<std::optional<double>> rho(complex.cell_count());
  for (const auto& f : complex.faces) rho[f.cell] = rho[f.cell].value_or(0.0) + f.rho;
  for (std::size_t v = 0; v < net.vertex_count(); ++v) {
    GraphVertex gv;
    gv.id = net.label(v);
    gv.boundary = net.is_boundary[v];
    gv.volume_weight = complex.volume[v];
    if (gv.boundary) {
      gv.boundary_mass = net.boundary_mass[v];
      gv.rho_weight = rho[v].value_or(0.0);
    }
    g.vertices.push_back(std::move(gv));
  }
  for (std::size_t i = 0; i < net.edges.size(); ++i) {
    const auto& e = net.edges[i];
    g.edges.push_back({net.label(e.a), net.label(e.b), e.conductance,
                       complex.interfaces[i].perimeter});
  }
  return g;
}

GraphInput path_graph(std::size_t edges, double length) {
  if (edges < 1) throw std::invalid_argument("path_graph: need at least one edge");
  GraphInput g;
  g.dimension.n = 1;
  const std::size_t n = edges + 1;
  const double step = length / static_cast<double>(edges);
  auto name = [&](std::size_t i) -> std::string {
    if (n == 3) return i == 0 ? "u" : (i == 1 ? "m" : "v");
    return "p" + std::to_string(i);
  };
  for (std::size_t i = 0; i < n; ++i) {
    GraphVertex v;
    v.id = name(i);
    v.boundary = (i == 0 || i == n - 1);
    v.volume_weight = step;
    if (v.boundary) {
      v.boundary_mass = 1.0;
      v.rho_weight = 1.0;
    }
    g.vertices.push_back(std::move(v));
  }
  for (std::size_t i = 0; i + 1 < n; ++i)
    g.edges.push_back({name(i), name(i + 1), 1.0 / step, 1.0});
  return g;
}

}  // namespace steklov
