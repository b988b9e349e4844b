#include "steklov/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <numbers>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "steklov/errors.hpp"
#include "steklov/graph_io.hpp"
#include "steklov/mesh_gen.hpp"
#include "steklov/solver.hpp"

namespace steklov {
namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ";" : "") + fmt17(xs[i]);
  return out;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double rel_dev(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

void require_decreasing(const std::vector<double>& xs, const char* what) {
  if (xs.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) throw std::invalid_argument(std::string(what) + ": values must be positive");
    if (i > 0 && !(xs[i] < xs[i - 1]))
      throw std::invalid_argument(std::string(what) + ": values must be strictly decreasing");
  }
}

// Runs f(i) for i < n on up to `jobs` threads; rethrows the lowest-index
// failure.
template <class F>
void for_each_point(std::size_t n, unsigned jobs, F&& f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

StudyCheck at_most(const std::string& name, double value, double limit) {
  return {name, value <= limit, value};
}

StudyCheck within(const std::string& name, double value, double lo, double hi) {
  return {name, value >= lo && value <= hi, value};
}

StudyCheck strictly_decreasing(const std::string& name, const std::vector<double>& ys) {
  bool ok = true;
  for (std::size_t i = 1; i < ys.size(); ++i) ok = ok && ys[i] < ys[i - 1];
  return {name, ok, static_cast<double>(ys.size())};
}

template <class Get>
std::vector<double> column(const std::vector<StudyRecord>& records, Get get) {
  std::vector<double> out;
  for (const auto& r : records) out.push_back(get(r));
  return out;
}

void fill_constants(StudyRecord& rec, const CheegerConstants& c, Provenance source) {
  rec.h = c.h;
  rec.hprime = c.hprime;
  rec.h_source = source;
  rec.hprime_source = source;
  rec.h_witness = c.h_witness.subset;
  rec.hprime_witness = c.hprime_witness.subset;
}

StudyOptions single_threaded(StudyOptions o) {
  o.jobs = 1;
  return o;
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kExact:
      return "exact";
    case Provenance::kExactCoarsened:
      return "exact-coarsened";
    case Provenance::kSweep:
      return "sweep";
  }
  return "?";
}

bool StudyReport::passed() const {
  for (const auto& r : records)
    if (!r.verdict) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

SlopeFit fit_loglog(const std::string& name, const std::vector<double>& x,
                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog: need two or more paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i]))
      throw std::invalid_argument("fit_loglog: data must be positive and finite");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    sx += lx.back();
    sy += ly.back();
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_loglog: x values coincide");
  SlopeFit fit{name, sxy / sxx, 0.0, 1.0};
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0) fit.r2 = (sxy * sxy) / (sxx * syy);
  return fit;
}

StudyRecord analyse_mesh(const TriangleMesh& mesh, const StudyOptions& options,
                         Certificate* certificate) {
  const MeshTopology topo = build_topology(mesh);
  const P1Assembly p1 = assemble_p1(mesh, topo);
  const BoundaryComplex complex = mesh_to_complex(mesh, topo);
  const Spectrum spec = steklov_spectrum(p1.network, 2);
  const Eigenpair pair = spec.pair(1);

  StudyRecord rec;
  rec.vertices = p1.network.vertex_count();
  rec.cells = complex.cell_count();
  rec.sigma1 = pair.value;
  rec.total_volume = total_volume(complex);

  const BoundaryComplex coarse =
      coarsen(complex, grid_blocks(mesh, options.blocks_x, options.blocks_y));
  EnumerationOptions eo;
  eo.jobs = options.jobs;
  fill_constants(rec, enumerate_constants(coarse, options.variant, eo),
                 Provenance::kExactCoarsened);

  CertificateOptions co;
  co.fem_instance = true;
  const std::vector<double> cells = triangle_average(mesh, topo, pair.field);
  Certificate cert = build_certificate(p1.network, complex, pair, cells, options.variant, co);
  rec.bound = cert.bound;
  rec.verdict = verify_chain(cert).passed;
  if (certificate) *certificate = std::move(cert);
  return rec;
}

StudyReport thin_product_study(double circumference, const std::vector<double>& a_list,
                               double mesh_h, const StudyOptions& options) {
  require_decreasing(a_list, "thin_product_study");
  StudyReport report;
  report.study = "thin_product";
  report.params = {{"circumference", fmt17(circumference)},
                   {"a", join(a_list)},
                   {"mesh_h", fmt17(mesh_h)},
                   {"variant", to_string(options.variant)},
                   {"blocks", std::to_string(options.blocks_x) + "x" +
                                  std::to_string(options.blocks_y)}};
  report.records.resize(a_list.size());
  const StudyOptions inner = single_threaded(options);
  // Lowest separated modes: cos(k theta) times cosh about mid-height, and
  // the linear profile across the height.
  const double kappa = 2.0 * std::numbers::pi / circumference;
  for_each_point(a_list.size(), options.jobs, [&](std::size_t i) {
    const double a = a_list[i];
    StudyRecord rec = analyse_mesh(make_cylinder(circumference, a, mesh_h), inner);
    rec.param = a;
    rec.reference = std::min(kappa * std::tanh(0.5 * kappa * a), 2.0 / a);
    report.records[i] = std::move(rec);
  });

  const auto& rs = report.records;
  const auto sig = column(rs, [](const StudyRecord& r) { return r.sigma1; });
  const auto hp = column(rs, [](const StudyRecord& r) { return r.hprime; });
  const auto h = column(rs, [](const StudyRecord& r) { return r.h; });
  if (a_list.size() >= 2) {
    const SlopeFit fs = fit_loglog("sigma1_vs_a", a_list, sig);
    const SlopeFit fh = fit_loglog("hprime_vs_a", a_list, hp);
    report.fits = {fs, fh};
    report.checks.push_back(within("sigma1_slope", fs.slope, 0.9, 1.1));
    report.checks.push_back(within("sigma1_r2", fs.r2, 0.99, 1.0));
    report.checks.push_back(within("hprime_slope", fh.slope, 0.85, 1.15));
  }
  const auto [hmin, hmax] = std::minmax_element(h.begin(), h.end());
  report.checks.push_back(at_most("h_range", *hmax / *hmin, 4.0));
  const StudyRecord& finest = rs.back();
  report.checks.push_back(
      at_most("finest_reference_deviation", std::abs(finest.sigma1 / *finest.reference - 1.0), 0.03));
  return report;
}

ScalingInstance p3_instance() {
  const GraphInstance g = graph_to_pair(path_graph(2, 2.0));
  return {"p3", g.network, g.complex, g.dimension};
}

ScalingInstance disk_instance(double mesh_h, const StudyOptions& options) {
  const TriangleMesh mesh = make_disk(mesh_h);
  const MeshTopology topo = build_topology(mesh);
  ScalingInstance inst;
  inst.name = "disk";
  inst.network = assemble_p1(mesh, topo).network;
  inst.complex = coarsen(mesh_to_complex(mesh, topo),
                         grid_blocks(mesh, options.blocks_x, options.blocks_y));
  inst.dimension = Dimension{2};
  return inst;
}

StudyReport scaling_study(const ScalingInstance& instance, const std::vector<double>& lambdas,
                          const StudyOptions& options) {
  if (lambdas.empty()) throw std::invalid_argument("scaling_study: empty lambda list");
  for (double l : lambdas)
    if (!(l > 0.0)) throw std::invalid_argument("scaling_study: lambda must be positive");
  StudyReport report;
  report.study = "scaling";
  report.params = {{"instance", instance.name},
                   {"dimension", std::to_string(instance.dimension.n)},
                   {"lambda", join(lambdas)},
                   {"variant", to_string(options.variant)}};

  EnumerationOptions eo;
  eo.jobs = options.jobs;
  const double base_sigma = steklov_spectrum(instance.network, 2).eigenvalues[1];
  const CheegerConstants base = enumerate_constants(instance.complex, options.variant, eo);

  double dev_sigma = 0.0, dev_h = 0.0, dev_hp = 0.0;
  bool same_argmin = true;
  for (double lambda : lambdas) {
    const auto [net, cx] = scale_metric(instance.network, instance.complex, lambda,
                                        instance.dimension);
    const Spectrum spec = steklov_spectrum(net, 2);
    const CheegerConstants c = enumerate_constants(cx, options.variant, eo);
    StudyRecord rec;
    rec.param = lambda;
    rec.vertices = net.vertex_count();
    rec.cells = cx.cell_count();
    rec.sigma1 = spec.eigenvalues[1];
    rec.reference = base_sigma / lambda;
    rec.total_volume = total_volume(cx);
    fill_constants(rec, c, Provenance::kExact);

    // The certificate needs a cell field; when cells are the network's
    // vertices the eigenfield serves directly, otherwise the sweep side is
    // skipped and only the constants are compared.
    if (cx.cell_count() == net.vertex_count()) {
      const Eigenpair pair = spec.pair(1);
      const std::vector<double> cells(pair.field.data(), pair.field.data() + pair.field.size());
      const Certificate cert = build_certificate(net, cx, pair, cells, options.variant);
      rec.bound = cert.bound;
      rec.verdict = verify_chain(cert).passed;
    } else {
      rec.bound = 0.25 * c.h * c.hprime;
      rec.verdict = true;
    }
    dev_sigma = std::max(dev_sigma, rel_dev(rec.sigma1 * lambda, base_sigma));
    dev_h = std::max(dev_h, rel_dev(rec.h * lambda, base.h));
    dev_hp = std::max(dev_hp, rel_dev(rec.hprime, base.hprime));
    same_argmin = same_argmin && rec.h_witness == base.h_witness.subset &&
                  rec.hprime_witness == base.hprime_witness.subset;
    report.records.push_back(std::move(rec));
  }
  report.checks.push_back(at_most("sigma1_times_lambda", dev_sigma, 1e-10));
  report.checks.push_back(at_most("h_times_lambda", dev_h, 1e-10));
  // Invariant up to the rounding of the scaled weights themselves.
  report.checks.push_back(at_most("hprime_invariant", dev_hp, 1e-14));
  report.checks.push_back({"argmin_identical", same_argmin, same_argmin ? 1.0 : 0.0});
  return report;
}

StudyReport dumbbell_study(double r, const std::vector<double>& w_list, double neck_length,
                           double mesh_h, const StudyOptions& options) {
  require_decreasing(w_list, "dumbbell_study");
  if (!(w_list.front() < 2.0 * r))
    throw std::invalid_argument("dumbbell_study: neck width must stay below 2r");
  StudyReport report;
  report.study = "dumbbell";
  report.params = {{"r", fmt17(r)},
                   {"w", join(w_list)},
                   {"neck_length", fmt17(neck_length)},
                   {"mesh_h", fmt17(mesh_h)},
                   {"variant", to_string(options.variant)},
                   {"blocks", std::to_string(options.blocks_x) + "x" +
                                  std::to_string(options.blocks_y)}};
  report.records.resize(w_list.size());
  const StudyOptions inner = single_threaded(options);
  for_each_point(w_list.size(), options.jobs, [&](std::size_t i) {
    StudyRecord rec = analyse_mesh(make_dumbbell(r, w_list[i], neck_length, mesh_h), inner);
    rec.param = w_list[i];
    report.records[i] = std::move(rec);
  });
  const auto& rs = report.records;
  report.checks.push_back(strictly_decreasing(
      "sigma1_decreasing", column(rs, [](const StudyRecord& x) { return x.sigma1; })));
  report.checks.push_back(
      strictly_decreasing("h_decreasing", column(rs, [](const StudyRecord& x) { return x.h; })));
  report.checks.push_back(strictly_decreasing(
      "hprime_decreasing", column(rs, [](const StudyRecord& x) { return x.hprime; })));
  const auto vol = column(rs, [](const StudyRecord& x) { return x.total_volume; });
  const auto [vmin, vmax] = std::minmax_element(vol.begin(), vol.end());
  report.checks.push_back(at_most("volume_band", *vmax / *vmin, 1.2));
  return report;
}

StudyReport convergence_study(ConvergenceShape shape, const std::vector<double>& levels,
                              double length, const StudyOptions& options) {
  if (levels.size() < 3) throw std::invalid_argument("convergence_study: need three levels");
  StudyReport report;
  report.records.resize(levels.size());
  if (shape == ConvergenceShape::kDisk) {
    require_decreasing(levels, "convergence_study");
    report.study = "convergence_disk";
    report.params = {{"h", join(levels)}, {"variant", to_string(options.variant)}};
    const StudyOptions inner = single_threaded(options);
    for_each_point(levels.size(), options.jobs, [&](std::size_t i) {
      StudyRecord rec = analyse_mesh(make_disk(levels[i]), inner);
      rec.param = levels[i];
      rec.reference = 1.0;
      report.records[i] = std::move(rec);
    });
    std::vector<double> err;
    for (const auto& r : report.records) err.push_back(std::abs(r.sigma1 - 1.0));
    const SlopeFit fit = fit_loglog("error_vs_h", levels, err);
    report.fits.push_back(fit);
    for (std::size_t i = 1; i < levels.size(); ++i)
      report.fits.push_back(fit_loglog("rate_" + std::to_string(i - 1) + "_" + std::to_string(i),
                                       {levels[i - 1], levels[i]}, {err[i - 1], err[i]}));
    report.checks.push_back({"observed_order", fit.slope >= 1.7, fit.slope});
    report.checks.push_back(strictly_decreasing("error_decreasing", err));
    return report;
  }

  report.study = "convergence_chain";
  report.params = {{"edges", join(levels)},
                   {"length", fmt17(length)},
                   {"variant", to_string(options.variant)}};
  double worst = 0.0;
  for_each_point(levels.size(), options.jobs, [&](std::size_t i) {
    const double k = levels[i];
    if (!(k >= 1.0) || k != std::floor(k))
      throw std::invalid_argument("convergence_study: edge counts must be positive integers");
    const GraphInstance g = graph_to_pair(path_graph(static_cast<std::size_t>(k), length));
    const Spectrum spec = steklov_spectrum(g.network, 2);
    const Eigenpair pair = spec.pair(1);
    StudyRecord rec;
    rec.param = k;
    rec.vertices = g.network.vertex_count();
    rec.cells = g.complex.cell_count();
    rec.sigma1 = pair.value;
    rec.reference = 2.0 / length;
    rec.total_volume = total_volume(g.complex);
    const std::vector<double> cells(pair.field.data(), pair.field.data() + pair.field.size());
    const Certificate cert = build_certificate(g.network, g.complex, pair, cells, options.variant);
    if (g.complex.cell_count() <= EnumerationOptions{}.cap) {
      fill_constants(rec, enumerate_constants(g.complex, options.variant), Provenance::kExact);
    } else {
      rec.h = cert.h_eff;
      rec.hprime = cert.hprime_eff;
      rec.h_source = rec.hprime_source = Provenance::kSweep;
    }
    rec.bound = cert.bound;
    rec.verdict = verify_chain(cert).passed;
    report.records[i] = std::move(rec);
  });
  for (const auto& r : report.records) worst = std::max(worst, rel_dev(r.sigma1, *r.reference));
  report.checks.push_back(at_most("continuum_match", worst, 1e-10));
  return report;
}

std::string params_hash(const StudyReport& report) {
  std::uint64_t hash = 1469598103934665603ull;
  auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      hash ^= ch;
      hash *= 1099511628211ull;
    }
    hash ^= 0xff;
    hash *= 1099511628211ull;
  };
  feed(report.study);
  for (const auto& [k, v] : report.params) {
    feed(k);
    feed(v);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string report_json(const StudyReport& report) {
  json j;
  j["study"] = report.study;
  json params = json::object();
  for (const auto& [k, v] : report.params) params[k] = v;
  j["params"] = std::move(params);
  json records = json::array();
  for (const auto& r : report.records) {
    records.push_back({{"param", number(r.param)},
                       {"vertices", r.vertices},
                       {"cells", r.cells},
                       {"sigma1", number(r.sigma1)},
                       {"reference", r.reference ? number(*r.reference) : json(nullptr)},
                       {"h", number(r.h)},
                       {"h_source", to_string(r.h_source)},
                       {"h_witness", r.h_witness},
                       {"hprime", number(r.hprime)},
                       {"hprime_source", to_string(r.hprime_source)},
                       {"hprime_witness", r.hprime_witness},
                       {"bound", number(r.bound)},
                       {"total_volume", number(r.total_volume)},
                       {"verdict", r.verdict}});
  }
  j["records"] = std::move(records);
  json fits = json::array();
  for (const auto& f : report.fits)
    fits.push_back({{"name", f.name},
                    {"slope", number(f.slope)},
                    {"intercept", number(f.intercept)},
                    {"r2", number(f.r2)}});
  j["fits"] = std::move(fits);
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", number(c.value)}});
  j["checks"] = std::move(checks);
  j["passed"] = report.passed();
  return j.dump(2) + "\n";
}

std::string report_csv(const StudyReport& report) {
  std::string out =
      "param,vertices,cells,sigma1,reference,h,h_source,hprime,hprime_source,bound,"
      "total_volume,verdict\n";
  for (const auto& r : report.records) {
    out += fmt17(r.param) + "," + std::to_string(r.vertices) + "," + std::to_string(r.cells) +
           "," + fmt17(r.sigma1) + "," + (r.reference ? fmt17(*r.reference) : "") + "," +
           fmt17(r.h) + "," + to_string(r.h_source) + "," + fmt17(r.hprime) + "," +
           to_string(r.hprime_source) + "," + fmt17(r.bound) + "," + fmt17(r.total_volume) +
           "," + (r.verdict ? "1" : "0") + "\n";
  }
  return out;
}

void write_report(StudyReport& report, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const std::string stem = report.study + "_" + params_hash(report);
  report.json_path = (fs::path(directory) / (stem + ".json")).string();
  report.csv_path = (fs::path(directory) / (stem + ".csv")).string();
  auto put = [](const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path);
    f << text;
  };
  put(report.json_path, report_json(report));
  put(report.csv_path, report_csv(report));
}

}  // namespace steklov
