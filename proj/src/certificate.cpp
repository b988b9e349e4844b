#include "steklov/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "steklov/errors.hpp"

namespace steklov {
namespace {

using nlohmann::json;

constexpr double kIdentityTol = 1e-10;

double rel_gap(double a, double b) {
  if (a == b) return 0.0;
  if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// Residual of lhs <= rhs relative to rhs.
double excess(double lhs, double rhs) {
  if (lhs <= rhs) return 0.0;
  if (!std::isfinite(lhs)) return kInf;
  return (lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

StepCheck identity(const std::string& name, double a, double b, bool hard = true) {
  const double r = rel_gap(a, b);
  return {name, hard, r <= kIdentityTol, r};
}

StepCheck at_most(const std::string& name, double lhs, double rhs, double tol, bool hard) {
  const double r = excess(lhs, rhs);
  return {name, hard, r <= tol, r};
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j) {
  if (j.is_null()) return kInf;
  if (!j.is_number()) throw InputError("certificate: expected a number");
  return j.get<double>();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const StepCheck* Verdict::find(const std::string& name) const {
  for (const auto& s : steps)
    if (s.name == name) return &s;
  return nullptr;
}

MPlus extract_m_plus(const BoundaryComplex& complex, std::span<const double> cell_field,
                     Constraint variant) {
  if (cell_field.size() != complex.cell_count())
    throw std::invalid_argument("extract_m_plus: one field value per cell required");
  if (std::all_of(cell_field.begin(), cell_field.end(), [](double v) { return v == 0.0; }))
    throw CertificateAbort("eigenfield vanishes on every cell");

  CutEvaluator eval(complex);
  struct Option {
    int sign;
    std::vector<bool> in;
    SubsetMeasures m;
    std::vector<std::size_t> cells;
  };
  std::vector<Option> ok;
  for (int sign : {1, -1}) {
    Option o{sign, std::vector<bool>(cell_field.size()), {}, {}};
    for (std::size_t c = 0; c < cell_field.size(); ++c) {
      o.in[c] = sign * cell_field[c] > 0.0;
      if (o.in[c]) o.cells.push_back(c);
    }
    o.m = eval.measure(o.in);
    if (eval.admissible(o.m, variant)) ok.push_back(std::move(o));
  }
  if (ok.empty())
    throw CertificateAbort("neither sign of the eigenfield gives an admissible M+ under " +
                           to_string(variant));
  const Option* pick = &ok[0];
  if (ok.size() == 2) {
    const Option& a = ok[0];
    const Option& b = ok[1];
    bool take_b = false;
    if (a.m.volume != b.m.volume) {
      take_b = b.m.volume < a.m.volume;
    } else if (a.cells.size() != b.cells.size()) {
      take_b = b.cells.size() < a.cells.size();
    } else {
      take_b = std::lexicographical_compare(b.cells.begin(), b.cells.end(), a.cells.begin(),
                                            a.cells.end());
    }
    if (take_b) pick = &b;
  }
  MPlus out;
  out.sign = pick->sign;
  out.cells = pick->cells;
  out.signed_field.reserve(cell_field.size());
  for (double v : cell_field) out.signed_field.push_back(pick->sign * v);
  return out;
}

CoareaSums coarea_sums(const BoundaryComplex& complex, std::span<const double> u,
                       Constraint variant) {
  if (u.size() != complex.cell_count())
    throw std::invalid_argument("coarea_sums: one value per cell required");
  for (double v : u)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("coarea_sums: field must be finite and nonnegative");
  CutEvaluator eval(complex);
  std::vector<double> levels;
  for (double v : u)
    if (v > 0.0) levels.push_back(v);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  CoareaSums out;
  std::vector<bool> in(u.size());
  double previous = 0.0;
  for (double t : levels) {
    for (std::size_t c = 0; c < u.size(); ++c) in[c] = u[c] >= t;
    const SubsetMeasures m = eval.measure(in);
    out.table.push_back({t, m.cut, m.volume, m.exterior, m.size, eval.admissible(m, variant)});
    const double dt = t - previous;
    out.variation.threshold_sum += dt * m.cut;
    out.mass.threshold_sum += dt * m.volume;
    out.boundary.threshold_sum += dt * m.exterior;
    previous = t;
  }
  for (const auto& f : complex.interfaces)
    out.variation.direct_sum += f.perimeter * std::abs(u[f.a] - u[f.b]);
  for (std::size_t c = 0; c < u.size(); ++c) out.mass.direct_sum += complex.volume[c] * u[c];
  for (const auto& face : complex.faces) out.boundary.direct_sum += face.rho * u[face.cell];
  return out;
}

Certificate build_certificate(const SteklovNetwork& net, const BoundaryComplex& complex,
                              const Eigenpair& pair, std::span<const double> cell_field,
                              Constraint variant, const CertificateOptions& options) {
  if (pair.field.size() != static_cast<long>(net.vertex_count()))
    throw std::invalid_argument("build_certificate: eigenfield size differs from the network");
  const MPlus plus = extract_m_plus(complex, cell_field, variant);

  Certificate cert;
  cert.sigma1 = pair.value;
  cert.variant = variant;
  cert.final_is_hard = options.fem_instance;
  cert.sign = plus.sign;
  cert.m_plus = plus.cells;
  cert.h_exact = options.h_exact;
  cert.hprime_exact = options.hprime_exact;

  CutEvaluator eval(complex);
  cert.total_volume = eval.total_volume();
  cert.total_exterior = eval.total_exterior();

  std::vector<double> u(cell_field.size(), 0.0);
  for (std::size_t c = 0; c < u.size(); ++c) {
    const double f = plus.signed_field[c];
    u[c] = f > 0.0 ? f * f : 0.0;
  }
  CoareaSums sums = coarea_sums(complex, u, variant);
  if (sums.table.empty()) throw CertificateAbort("empty threshold table");
  cert.table = std::move(sums.table);
  cert.variation = sums.variation;
  cert.mass = sums.mass;
  cert.boundary = sums.boundary;
  for (const auto& row : cert.table) {
    if (!row.admissible) continue;
    if (row.volume > 0.0) cert.h_eff = std::min(cert.h_eff, row.perimeter / row.volume);
    if (row.exterior > 0.0) cert.hprime_eff = std::min(cert.hprime_eff, row.perimeter / row.exterior);
  }
  cert.bound = 0.25 * cert.h_eff * cert.hprime_eff;

  // Network side: positive part of the signed vertex field.
  Eigen::VectorXd fplus = (plus.sign * pair.field).cwiseMax(0.0);
  auto& ch = cert.chain;
  for (const auto& e : net.edges) {
    const double d = fplus(static_cast<long>(e.a)) - fplus(static_cast<long>(e.b));
    ch.energy_plus += e.conductance * d * d;
  }
  for (std::size_t v = 0; v < net.vertex_count(); ++v)
    if (net.is_boundary[v]) {
      const double x = fplus(static_cast<long>(v));
      ch.boundary_plus += net.boundary_mass[v] * x * x;
    }
  ch.mixed_ratio = ch.boundary_plus > 0.0 ? ch.energy_plus / ch.boundary_plus : kInf;
  const double var = cert.variation.direct_sum;
  const double mass = cert.mass.direct_sum;
  const double bd = cert.boundary.direct_sum;
  ch.cs_middle = (mass > 0.0 && bd > 0.0) ? (0.5 * var) * (0.5 * var) / (mass * bd) : kInf;
  ch.split_product = (mass > 0.0 && bd > 0.0) ? 0.25 * (var / mass) * (var / bd) : kInf;

  cert.verdict = verify_chain(cert, options.tolerance);
  return cert;
}

Verdict verify_chain(const Certificate& cert, double tol) {
  Verdict v;
  auto& s = v.steps;

  // (a) co-area identities recomputed from the table.
  double var = 0.0, mass = 0.0, bd = 0.0, previous = 0.0;
  bool sorted = true, nested = true;
  for (std::size_t k = 0; k < cert.table.size(); ++k) {
    const auto& row = cert.table[k];
    const double dt = row.t - previous;
    var += dt * row.perimeter;
    mass += dt * row.volume;
    bd += dt * row.exterior;
    previous = row.t;
    if (k > 0) {
      const auto& prev = cert.table[k - 1];
      if (!(row.t > prev.t)) sorted = false;
      if (row.size > prev.size || row.volume > prev.volume || row.exterior > prev.exterior)
        nested = false;
    }
  }
  s.push_back({"table.sorted_nested", true, sorted && nested && !cert.table.empty(), 0.0});
  s.push_back(identity("coarea.variation", var, cert.variation.direct_sum));
  s.push_back(identity("coarea.mass", mass, cert.mass.direct_sum));
  s.push_back(identity("coarea.boundary", bd, cert.boundary.direct_sum));
  s.push_back(identity("coarea.recorded_variation", var, cert.variation.threshold_sum));
  s.push_back(identity("coarea.recorded_mass", mass, cert.mass.threshold_sum));
  s.push_back(identity("coarea.recorded_boundary", bd, cert.boundary.threshold_sum));

  // (b) sweep infima: recorded values equal the table minima and dominate
  // the exact constants when those are known.
  double h_min = kInf, hp_min = kInf;
  bool flags_agree = true;
  for (const auto& row : cert.table) {
    const bool ok =
        row.size > 0 &&
        (cert.variant == Constraint::kVolumeHalf
             ? row.volume > 0.0 &&
                   row.volume <= 0.5 * cert.total_volume * (1.0 + kAdmissibleSlack)
             : row.exterior <= 0.5 * cert.total_exterior * (1.0 + kAdmissibleSlack));
    if (ok != row.admissible) flags_agree = false;
    if (!ok) continue;
    if (row.volume > 0.0) h_min = std::min(h_min, row.perimeter / row.volume);
    if (row.exterior > 0.0) hp_min = std::min(hp_min, row.perimeter / row.exterior);
  }
  s.push_back({"table.admissible_flags", true, flags_agree, 0.0});
  s.push_back(identity("sweep.h_eff", cert.h_eff, h_min));
  s.push_back(identity("sweep.hprime_eff", cert.hprime_eff, hp_min));
  if (cert.h_exact)
    s.push_back(at_most("sweep.h_dominates_exact", *cert.h_exact, cert.h_eff, tol, true));
  if (cert.hprime_exact)
    s.push_back(
        at_most("sweep.hprime_dominates_exact", *cert.hprime_exact, cert.hprime_eff, tol, true));

  // Proof chain, evaluated on the discrete data.
  const auto& ch = cert.chain;
  s.push_back(at_most("chain.mixed_ratio", ch.mixed_ratio, cert.sigma1, tol, false));
  s.push_back(at_most("chain.cauchy_schwarz", ch.cs_middle, ch.mixed_ratio, tol, false));
  const double split = 0.25 * (cert.variation.direct_sum / cert.mass.direct_sum) *
                       (cert.variation.direct_sum / cert.boundary.direct_sum);
  s.push_back(identity("chain.split", ch.cs_middle, ch.split_product));
  s.push_back(identity("chain.split_recomputed", split, ch.split_product));
  const double bound = 0.25 * cert.h_eff * cert.hprime_eff;
  s.push_back(identity("chain.bound_recomputed", bound, cert.bound));
  s.push_back(at_most("chain.coarea_bound", bound, ch.split_product, kIdentityTol, true));

  // (c) the inequality itself.
  s.push_back(at_most("final", cert.bound, cert.sigma1, tol, cert.final_is_hard));

  v.passed = std::all_of(s.begin(), s.end(), [](const StepCheck& c) { return !c.hard || c.pass; });
  return v;
}

std::string certificate_to_json(const Certificate& cert) {
  json j;
  j["sigma1"] = number(cert.sigma1);
  j["variant"] = to_string(cert.variant);
  j["final_is_hard"] = cert.final_is_hard;
  j["sign"] = cert.sign;
  j["m_plus"] = cert.m_plus;
  j["total_volume"] = number(cert.total_volume);
  j["total_exterior"] = number(cert.total_exterior);
  json table = json::array();
  for (const auto& r : cert.table)
    table.push_back({{"t", number(r.t)},
                     {"perimeter", number(r.perimeter)},
                     {"volume", number(r.volume)},
                     {"exterior", number(r.exterior)},
                     {"size", r.size},
                     {"admissible", r.admissible}});
  j["threshold_table"] = std::move(table);
  auto pair = [](const CoareaPair& p) {
    return json{{"threshold_sum", number(p.threshold_sum)}, {"direct_sum", number(p.direct_sum)}};
  };
  j["coarea"] = {{"variation", pair(cert.variation)},
                 {"mass", pair(cert.mass)},
                 {"boundary", pair(cert.boundary)}};
  j["h_eff"] = number(cert.h_eff);
  j["hprime_eff"] = number(cert.hprime_eff);
  j["bound"] = number(cert.bound);
  j["h_exact"] = cert.h_exact ? number(*cert.h_exact) : json(nullptr);
  j["hprime_exact"] = cert.hprime_exact ? number(*cert.hprime_exact) : json(nullptr);
  j["chain"] = {{"energy_plus", number(cert.chain.energy_plus)},
                {"boundary_plus", number(cert.chain.boundary_plus)},
                {"mixed_ratio", number(cert.chain.mixed_ratio)},
                {"cs_middle", number(cert.chain.cs_middle)},
                {"split_product", number(cert.chain.split_product)}};
  json steps = json::array();
  for (const auto& st : cert.verdict.steps)
    steps.push_back({{"name", st.name},
                     {"hard", st.hard},
                     {"pass", st.pass},
                     {"residual", number(st.residual)}});
  j["verdict"] = {{"passed", cert.verdict.passed}, {"steps", std::move(steps)}};
  return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
  Certificate c;
  try {
    const json j = json::parse(text);
    c.sigma1 = read_number(j.at("sigma1"));
    c.variant = parse_constraint(j.at("variant").get<std::string>());
    c.final_is_hard = j.at("final_is_hard").get<bool>();
    c.sign = j.at("sign").get<int>();
    c.m_plus = j.at("m_plus").get<std::vector<std::size_t>>();
    c.total_volume = read_number(j.at("total_volume"));
    c.total_exterior = read_number(j.at("total_exterior"));
    for (const auto& r : j.at("threshold_table"))
      c.table.push_back({read_number(r.at("t")), read_number(r.at("perimeter")),
                         read_number(r.at("volume")), read_number(r.at("exterior")),
                         r.at("size").get<std::size_t>(), r.at("admissible").get<bool>()});
    auto pair = [](const json& p) {
      return CoareaPair{read_number(p.at("threshold_sum")), read_number(p.at("direct_sum"))};
    };
    c.variation = pair(j.at("coarea").at("variation"));
    c.mass = pair(j.at("coarea").at("mass"));
    c.boundary = pair(j.at("coarea").at("boundary"));
    c.h_eff = read_number(j.at("h_eff"));
    c.hprime_eff = read_number(j.at("hprime_eff"));
    c.bound = read_number(j.at("bound"));
    if (!j.at("h_exact").is_null()) c.h_exact = read_number(j.at("h_exact"));
    if (!j.at("hprime_exact").is_null()) c.hprime_exact = read_number(j.at("hprime_exact"));
    const json& ch = j.at("chain");
    c.chain = {read_number(ch.at("energy_plus")), read_number(ch.at("boundary_plus")),
               read_number(ch.at("mixed_ratio")), read_number(ch.at("cs_middle")),
               read_number(ch.at("split_product"))};
    for (const auto& st : j.at("verdict").at("steps"))
      c.verdict.steps.push_back({st.at("name").get<std::string>(), st.at("hard").get<bool>(),
                                 st.at("pass").get<bool>(), read_number(st.at("residual"))});
    c.verdict.passed = j.at("verdict").at("passed").get<bool>();
  } catch (const json::exception& e) {
    throw InputError(std::string("certificate JSON: ") + e.what());
  }
  return c;
}

std::string threshold_table_csv(const Certificate& cert) {
  std::string out = "t,perimeter,volume,exterior,size,admissible\n";
  for (const auto& r : cert.table)
    out += fmt17(r.t) + "," + fmt17(r.perimeter) + "," + fmt17(r.volume) + "," +
           fmt17(r.exterior) + "," + std::to_string(r.size) + "," +
           (r.admissible ? "1" : "0") + "\n";
  return out;
}

}  // namespace steklov
