// steklov: command-line front end for the solver, the isoperimetric
// constants, certificates and the parameter studies.
//
// Exit codes: 0 success, 1 verification failure, 2 input error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "steklov/certificate.hpp"
#include "steklov/cheeger.hpp"
#include "steklov/errors.hpp"
#include "steklov/experiments.hpp"
#include "steklov/graph_io.hpp"
#include "steklov/mesh.hpp"
#include "steklov/solver.hpp"

namespace fs = std::filesystem;
using namespace steklov;

namespace {

constexpr int kOk = 0;
constexpr int kVerificationFailed = 1;
constexpr int kInputError = 2;

struct RunConfig {
  std::string graph;
  std::string mesh;
  std::string field;
  std::size_t k = 4;
  std::string variant = "volume";
  std::size_t cap = 22;
  unsigned jobs = 1;
  unsigned long long seed = 0;
  double tol = 1e-8;
  std::string out = ".";
  std::string emit = "both";
  std::string blocks = "6x3";
  bool exact = false;
  // studies
  std::vector<double> lambdas{2.0, 5.0};
  int dimension = 0;
  double circumference = 2.0 * std::numbers::pi;
  std::vector<double> a_list{0.4, 0.2, 0.1, 0.05};
  double mesh_h = 0.1;
  double r = 1.0;
  std::vector<double> w_list{0.5, 0.25, 0.1};
  double neck = 0.5;
  std::string shape = "disk";
  std::vector<double> levels;
  double length = 2.0;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void put(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool emit_csv(const RunConfig& c) { return c.emit == "both" || c.emit == "csv"; }
bool emit_json(const RunConfig& c) { return c.emit == "both" || c.emit == "json"; }

std::pair<std::size_t, std::size_t> parse_blocks(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw InputError("--blocks expects NXxNY, got " + s);
  try {
    const std::size_t nx = std::stoul(s.substr(0, x));
    const std::size_t ny = std::stoul(s.substr(x + 1));
    if (nx == 0 || ny == 0) throw InputError("--blocks counts must be positive");
    return {nx, ny};
  } catch (const std::logic_error&) {
    throw InputError("--blocks expects NXxNY, got " + s);
  }
}

// A loaded instance. Mesh instances keep the mesh for field transfer and
// coarsening.
struct Instance {
  SteklovNetwork network;
  BoundaryComplex complex;
  Dimension dimension;
  std::optional<TriangleMesh> mesh;
  std::optional<MeshTopology> topo;
  std::vector<std::string> diagnostics;
};

Instance load_instance(const RunConfig& c) {
  if (c.graph.empty() == c.mesh.empty())
    throw InputError("exactly one of --graph or --mesh is required");
  Instance inst;
  if (!c.graph.empty()) {
    GraphInstance g = graph_to_pair(parse_graph_json(slurp(c.graph)));
    inst.network = std::move(g.network);
    inst.complex = std::move(g.complex);
    inst.dimension = g.dimension;
  } else {
    inst.mesh = load_mesh(slurp(c.mesh));
    inst.topo = build_topology(*inst.mesh);
    P1Assembly p1 = assemble_p1(*inst.mesh, *inst.topo);
    inst.network = std::move(p1.network);
    inst.diagnostics = std::move(p1.diagnostics);
    inst.complex = mesh_to_complex(*inst.mesh, *inst.topo);
    inst.dimension = Dimension{2};
  }
  for (const auto& d : inst.diagnostics) std::cerr << "warning: " << d << "\n";
  return inst;
}

std::vector<double> cell_field(const Instance& inst, const Eigenpair& pair) {
  if (inst.mesh) return triangle_average(*inst.mesh, *inst.topo, pair.field);
  return {pair.field.data(), pair.field.data() + pair.field.size()};
}

// Complex used for exact enumeration: meshes are coarsened to blocks.
BoundaryComplex enumerable_complex(const Instance& inst, const RunConfig& c) {
  if (!inst.mesh) return inst.complex;
  const auto [nx, ny] = parse_blocks(c.blocks);
  return coarsen(inst.complex, grid_blocks(*inst.mesh, nx, ny));
}

std::string subset_labels(const BoundaryComplex& cx, const std::vector<std::size_t>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + cx.label(s[i]);
  return out + "}";
}

nlohmann::json cut_json(const BoundaryComplex& cx, const CutResult& r) {
  nlohmann::json labels = nlohmann::json::array();
  for (auto c : r.subset) labels.push_back(cx.label(c));
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"subset", r.subset},
          {"labels", labels},
          {"cut", num(r.cut)},
          {"volume", num(r.volume)},
          {"exterior", num(r.exterior)},
          {"h_ratio", num(r.h_ratio)},
          {"hprime_ratio", num(r.hprime_ratio)},
          {"variant", to_string(r.variant)},
          {"exact", r.exact}};
}

int run_solve(const RunConfig& c) {
  const Instance inst = load_instance(c);
  const std::size_t nb = inst.network.boundary_vertices().size();
  const Spectrum spec = steklov_spectrum(inst.network, std::min(c.k, nb));
  fs::create_directories(c.out);
  std::string values = "index,eigenvalue\n";
  for (std::size_t i = 0; i < spec.size(); ++i)
    values += std::to_string(i) + "," + fmt17(spec.eigenvalues[i]) + "\n";
  std::string vectors = "vertex_id";
  for (std::size_t i = 0; i < spec.size(); ++i) vectors += ",v" + std::to_string(i);
  vectors += "\n";
  for (std::size_t r = 0; r < spec.boundary_ids.size(); ++r) {
    vectors += inst.network.label(spec.boundary_ids[r]);
    for (std::size_t i = 0; i < spec.size(); ++i)
      vectors += "," + fmt17(spec.boundary_vectors(static_cast<long>(r), static_cast<long>(i)));
    vectors += "\n";
  }
  put((fs::path(c.out) / "spectrum.csv").string(), values);
  put((fs::path(c.out) / "boundary_vectors.csv").string(), vectors);
  if (inst.mesh && spec.size() > 1)
    put((fs::path(c.out) / "eigenfunction.csv").string(),
        eigenfunction_csv(*inst.mesh, *inst.topo, spec.pair(1).field));
  std::cout << "steklov eigenvalues:";
  for (double v : spec.eigenvalues) std::cout << " " << v;
  std::cout << "\n";
  return kOk;
}

int run_cheeger(const RunConfig& c) {
  const Instance inst = load_instance(c);
  const BoundaryComplex cx = enumerable_complex(inst, c);
  const Constraint variant = parse_constraint(c.variant);
  EnumerationOptions eo;
  eo.cap = c.cap;
  eo.jobs = c.jobs;
  const CheegerConstants k = enumerate_constants(cx, variant, eo);
  std::cout << "h=" << k.h << " witness " << subset_labels(cx, k.h_witness.subset) << "\n"
            << "h'=" << k.hprime << " witness " << subset_labels(cx, k.hprime_witness.subset)
            << "\n";
  if (emit_json(c)) {
    fs::create_directories(c.out);
    nlohmann::json j;
    j["variant"] = to_string(variant);
    j["cells"] = cx.cell_count();
    j["coarsened"] = inst.mesh.has_value();
    j["h"] = std::isfinite(k.h) ? nlohmann::json(k.h) : nlohmann::json(nullptr);
    j["hprime"] = std::isfinite(k.hprime) ? nlohmann::json(k.hprime) : nlohmann::json(nullptr);
    j["h_witness"] = cut_json(cx, k.h_witness);
    j["hprime_witness"] = cut_json(cx, k.hprime_witness);
    put((fs::path(c.out) / "cheeger.json").string(), j.dump(2) + "\n");
  }
  return kOk;
}

int run_certify(const RunConfig& c) {
  const Instance inst = load_instance(c);
  const Constraint variant = parse_constraint(c.variant);
  const Spectrum spec = steklov_spectrum(inst.network, 2);
  const Eigenpair pair = spec.pair(1);
  CertificateOptions opts;
  opts.fem_instance = inst.mesh.has_value();
  opts.tolerance = c.tol;
  if (c.exact) {
    if (inst.mesh)
      throw InputError("--exact applies to graph instances; mesh constants are coarsened");
    EnumerationOptions eo;
    eo.cap = c.cap;
    eo.jobs = c.jobs;
    const CheegerConstants k = enumerate_constants(inst.complex, variant, eo);
    opts.h_exact = k.h;
    opts.hprime_exact = k.hprime;
  }
  const Certificate cert =
      build_certificate(inst.network, inst.complex, pair, cell_field(inst, pair), variant, opts);
  fs::create_directories(c.out);
  if (emit_json(c))
    put((fs::path(c.out) / "certificate.json").string(), certificate_to_json(cert));
  if (emit_csv(c))
    put((fs::path(c.out) / "threshold_table.csv").string(), threshold_table_csv(cert));
  std::cout << "bound " << cert.bound << " <= sigma1 " << cert.sigma1 << " ("
            << (cert.bound <= cert.sigma1 * (1.0 + c.tol) ? "holds" : "violated") << ")\n"
            << "h_eff=" << cert.h_eff << " h'_eff=" << cert.hprime_eff << "\n";
  for (const auto& s : cert.verdict.steps)
    if (!s.pass)
      std::cout << (s.hard ? "FAILED " : "note: ") << s.name << " residual " << s.residual
                << "\n";
  std::cout << "verdict: " << (cert.verdict.passed ? "verified" : "FAILED") << "\n";
  return cert.verdict.passed ? kOk : kVerificationFailed;
}

std::vector<double> read_field(const std::string& path) {
  std::istringstream in(slurp(path));
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.rfind(',');
    const std::string tok = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      out.push_back(std::stod(tok));
    } catch (const std::logic_error&) {
      if (out.empty()) continue;  // header
      throw InputError("field file " + path + ": bad value '" + tok + "'");
    }
  }
  return out;
}

int run_sweep(const RunConfig& c) {
  const Instance inst = load_instance(c);
  const Constraint variant = parse_constraint(c.variant);
  std::vector<double> field;
  if (!c.field.empty()) {
    field = read_field(c.field);
    if (field.size() != inst.complex.cell_count())
      throw InputError("field has " + std::to_string(field.size()) + " values for " +
                       std::to_string(inst.complex.cell_count()) + " cells");
  } else {
    const Spectrum spec = steklov_spectrum(inst.network, 2);
    field = cell_field(inst, spec.pair(1));
  }
  const SweepResult sw = sweep_cuts(inst.complex, field, variant);
  std::string csv = "threshold,size,cut,volume,exterior,h_ratio,hprime_ratio\n";
  for (std::size_t i = 0; i < sw.cuts.size(); ++i) {
    const CutResult& r = sw.cuts[i];
    csv += fmt17(sw.thresholds[i]) + "," + std::to_string(r.subset.size()) + "," + fmt17(r.cut) +
           "," + fmt17(r.volume) + "," + fmt17(r.exterior) + "," + fmt17(r.h_ratio) + "," +
           fmt17(r.hprime_ratio) + "\n";
  }
  fs::create_directories(c.out);
  if (emit_csv(c)) put((fs::path(c.out) / "sweep.csv").string(), csv);
  std::cout << sw.cuts.size() << " admissible superlevel sets\n";
  if (sw.best_h) std::cout << "best h ratio " << sw.cuts[*sw.best_h].h_ratio << "\n";
  if (sw.best_hprime)
    std::cout << "best h' ratio " << sw.cuts[*sw.best_hprime].hprime_ratio << "\n";
  if (emit_json(c)) {
    nlohmann::json j;
    j["variant"] = to_string(variant);
    j["seed"] = c.seed;
    nlohmann::json cuts = nlohmann::json::array();
    for (const auto& r : sw.cuts) cuts.push_back(cut_json(inst.complex, r));
    j["cuts"] = std::move(cuts);
    if (sw.best_h) {
      j["best_h"] = cut_json(inst.complex, sw.cuts[*sw.best_h]);
      j["best_h_local"] =
          cut_json(inst.complex, local_search_improve(inst.complex, sw.cuts[*sw.best_h], Objective::kH));
    }
    if (sw.best_hprime) {
      j["best_hprime"] = cut_json(inst.complex, sw.cuts[*sw.best_hprime]);
      j["best_hprime_local"] = cut_json(
          inst.complex,
          local_search_improve(inst.complex, sw.cuts[*sw.best_hprime], Objective::kHPrime));
    }
    put((fs::path(c.out) / "sweep.json").string(), j.dump(2) + "\n");
  }
  return kOk;
}

StudyOptions study_options(const RunConfig& c) {
  StudyOptions o;
  o.variant = parse_constraint(c.variant);
  o.jobs = c.jobs;
  const auto [nx, ny] = parse_blocks(c.blocks);
  o.blocks_x = nx;
  o.blocks_y = ny;
  return o;
}

int finish_study(StudyReport& report, const RunConfig& c) {
  write_report(report, c.out);
  if (!emit_json(c)) fs::remove(report.json_path);
  if (!emit_csv(c)) fs::remove(report.csv_path);
  std::cout << report.study << ": " << report.records.size() << " points\n";
  for (const auto& f : report.fits)
    std::cout << "  fit " << f.name << " slope " << f.slope << " r2 " << f.r2 << "\n";
  for (const auto& ch : report.checks)
    std::cout << "  " << (ch.pass ? "ok   " : "FAIL ") << ch.name << " " << ch.value << "\n";
  std::cout << "report " << report.json_path << "\n";
  return report.passed() ? kOk : kVerificationFailed;
}

int run_scale(const RunConfig& c) {
  const Instance inst = load_instance(c);
  ScalingInstance si;
  si.name = fs::path(c.graph.empty() ? c.mesh : c.graph).filename().string();
  si.network = inst.network;
  si.complex = enumerable_complex(inst, c);
  si.dimension = c.dimension > 0 ? Dimension{c.dimension} : inst.dimension;
  StudyReport report = scaling_study(si, c.lambdas, study_options(c));
  return finish_study(report, c);
}

int run_thin(const RunConfig& c) {
  StudyReport report = thin_product_study(c.circumference, c.a_list, c.mesh_h, study_options(c));
  return finish_study(report, c);
}

int run_dumbbell(const RunConfig& c) {
  StudyReport report = dumbbell_study(c.r, c.w_list, c.neck, c.mesh_h, study_options(c));
  return finish_study(report, c);
}

int run_converge(const RunConfig& c) {
  ConvergenceShape shape;
  std::vector<double> levels = c.levels;
  if (c.shape == "disk") {
    shape = ConvergenceShape::kDisk;
    if (levels.empty()) levels = {0.2, 0.1, 0.05};
  } else if (c.shape == "chain") {
    shape = ConvergenceShape::kIntervalChain;
    if (levels.empty()) levels = {2, 4, 10};
  } else {
    throw InputError("--shape must be disk or chain");
  }
  StudyReport report = convergence_study(shape, levels, c.length, study_options(c));
  return finish_study(report, c);
}

// Turns a JSON object of option values into extra arguments, skipping
// options already given on the command line so flags win.
std::vector<std::string> config_args(const std::string& path,
                                     const std::vector<std::string>& given) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw InputError("config " + path + ": expected an object");
  auto present = [&](const std::string& flag) {
    for (const auto& g : given)
      if (g == flag || g.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  auto scalar = [&](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return fmt17(v.get<double>());
    throw InputError("config " + path + ": unsupported value " + v.dump());
  };
  std::vector<std::string> out;
  for (const auto& [key, value] : j.items()) {
    if (key == "config") continue;
    const std::string flag = (key.size() == 1 ? "-" : "--") + key;
    if (present(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + scalar(v);
      out.push_back(flag);
      out.push_back(joined);
    } else {
      out.push_back(flag);
      out.push_back(scalar(value));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Steklov eigenvalues, isoperimetric constants and certificates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "steklov 1.0");

  auto instance_opts = [&](CLI::App* s) {
    s->add_option("--graph", cfg.graph, "graph JSON instance");
    s->add_option("--mesh", cfg.mesh, "SMESH 1 mesh");
  };
  auto common = [&](CLI::App* s) {
    s->add_option("--variant", cfg.variant, "volume or boundary constraint")
        ->check(CLI::IsMember({"volume", "boundary", "VolumeHalf", "BoundaryHalf"}));
    s->add_option("--cap", cfg.cap, "enumeration cell cap")->check(CLI::PositiveNumber);
    s->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
    s->add_option("--seed", cfg.seed, "seed for randomized steps");
    s->add_option("--tol", cfg.tol, "relative tolerance for inequalities")
        ->check(CLI::PositiveNumber);
    s->add_option("--out", cfg.out, "output directory");
    s->add_option("--emit", cfg.emit, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    s->add_option("--blocks", cfg.blocks, "coarsening grid for meshes, NXxNY");
    s->add_option("--config", "JSON file of option values; flags win");
  };

  auto* solve = app.add_subcommand("solve", "Steklov spectrum of a network or mesh");
  instance_opts(solve);
  common(solve);
  solve->add_option("-k", cfg.k, "number of eigenpairs")->check(CLI::PositiveNumber);

  auto* cheeger = app.add_subcommand("cheeger", "exact h and h' with witnesses");
  instance_opts(cheeger);
  common(cheeger);

  auto* certify = app.add_subcommand("certify", "certificate for sigma1 >= h h'/4");
  instance_opts(certify);
  common(certify);
  certify->add_flag("--exact", cfg.exact, "also enumerate exact constants (graphs)");

  auto* sweep = app.add_subcommand("sweep", "superlevel-set cuts of a cell field");
  instance_opts(sweep);
  common(sweep);
  sweep->add_option("--field", cfg.field, "one value per cell; default is the first eigenfield");

  auto* scale = app.add_subcommand("scale-test", "metric scaling study");
  instance_opts(scale);
  common(scale);
  scale->add_option("--lambda", cfg.lambdas, "scale factors")->delimiter(',');
  scale->add_option("--dimension", cfg.dimension, "override the instance dimension");

  auto* thin = app.add_subcommand("thin-limit", "thin cylinder study");
  common(thin);
  thin->add_option("--circumference", cfg.circumference);
  thin->add_option("--a", cfg.a_list, "heights, decreasing")->delimiter(',');
  thin->add_option("--mesh-h", cfg.mesh_h, "mesh size");

  auto* dumb = app.add_subcommand("dumbbell", "dumbbell neck study");
  common(dumb);
  dumb->add_option("--r", cfg.r, "disk radius");
  dumb->add_option("--w", cfg.w_list, "neck widths, decreasing")->delimiter(',');
  dumb->add_option("--neck", cfg.neck, "neck length");
  dumb->add_option("--mesh-h", cfg.mesh_h, "mesh size");

  auto* conv = app.add_subcommand("converge", "refinement study");
  common(conv);
  conv->add_option("--shape", cfg.shape, "disk or chain");
  conv->add_option("--levels", cfg.levels, "mesh sizes (disk) or edge counts (chain)")
      ->delimiter(',');
  conv->add_option("--length", cfg.length, "chain length");

  // Merge --config before parsing so explicit flags take precedence.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
      if (path.empty()) continue;
      const auto extra = config_args(path, args);
      args.insert(args.end(), extra.begin(), extra.end());
      break;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kInputError;
  }

  try {
    if (*solve) return run_solve(cfg);
    if (*cheeger) return run_cheeger(cfg);
    if (*certify) return run_certify(cfg);
    if (*sweep) return run_sweep(cfg);
    if (*scale) return run_scale(cfg);
    if (*thin) return run_thin(cfg);
    if (*dumb) return run_dumbbell(cfg);
    if (*conv) return run_converge(cfg);
  } catch (const CertificateAbort& e) {
    std::cerr << "certificate aborted: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
