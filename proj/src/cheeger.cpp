#include "steklov/cheeger.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <thread>

#include "steklov/errors.hpp"

namespace steklov {
namespace {

constexpr double kScreen = 1e-9;
constexpr std::uint64_t kResyncPeriod = 4096;

struct Best {
  double ratio = kInf;
  std::vector<std::size_t> subset;
  SubsetMeasures measures;

  void offer(double r, std::vector<std::size_t>&& s, const SubsetMeasures& m) {
    if (better_witness(r, s, ratio, subset)) {
      ratio = r;
      subset = std::move(s);
      measures = m;
    }
  }
};

struct TaskResult {
  Best h;
  Best hprime;
};

std::vector<std::size_t> members(const std::vector<bool>& in) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < in.size(); ++c)
    if (in[c]) out.push_back(c);
  return out;
}

CutResult make_result(const std::vector<std::size_t>& subset, const SubsetMeasures& m,
                      Constraint v, bool exact) {
  CutResult r;
  r.subset = subset;
  r.cut = m.cut;
  r.volume = m.volume;
  r.exterior = m.exterior;
  r.h_ratio = m.volume > 0.0 ? m.cut / m.volume : kInf;
  r.hprime_ratio = m.exterior > 0.0 ? m.cut / m.exterior : kInf;
  r.variant = v;
  r.exact = exact;
  return r;
}

// Enumerates every subset whose top `prefix_bits` cells follow `prefix`.
TaskResult enumerate_task(const CutEvaluator& eval, Constraint variant,
                          std::size_t prefix_bits, std::uint64_t prefix) {
  const std::size_t n = eval.cell_count();
  const std::size_t low = n - prefix_bits;
  std::vector<bool> in(n, false);
  for (std::size_t b = 0; b < prefix_bits; ++b)
    if ((prefix >> b) & 1u) in[low + b] = true;

  SubsetMeasures cur = eval.measure(in);
  const double half_vol = 0.5 * eval.total_volume();
  const double half_ext = 0.5 * eval.total_exterior();
  const double cut_slack = kScreen * std::max(eval.total_perimeter(), 1e-300);

  auto roughly_admissible = [&](const SubsetMeasures& m) {
    if (m.size == 0) return false;
    if (variant == Constraint::kVolumeHalf)
      return m.volume > 0.0 && m.volume <= half_vol * (1.0 + kScreen);
    return m.exterior <= half_ext * (1.0 + kScreen);
  };

  TaskResult out;
  auto consider = [&]() {
    if (!roughly_admissible(cur)) return;
    const bool try_h = cur.volume > 0.0 &&
                       (out.h.ratio == kInf ||
                        cur.cut <= out.h.ratio * cur.volume * (1.0 + kScreen) + cut_slack);
    const bool try_hp = cur.exterior > 0.0 &&
                        (out.hprime.ratio == kInf ||
                         cur.cut <= out.hprime.ratio * cur.exterior * (1.0 + kScreen) + cut_slack);
    if (!try_h && !try_hp) return;
    const SubsetMeasures exact = eval.measure(in);
    if (!eval.admissible(exact, variant)) return;
    if (try_h && exact.volume > 0.0) out.h.offer(exact.cut / exact.volume, members(in), exact);
    if (try_hp && exact.exterior > 0.0)
      out.hprime.offer(exact.cut / exact.exterior, members(in), exact);
  };

  const std::uint64_t states = std::uint64_t{1} << low;
  for (std::uint64_t i = 0; i < states; ++i) {
    consider();
    if (i + 1 == states) break;
    const auto c = static_cast<std::size_t>(std::countr_zero(i + 1));
    const bool adding = !in[c];
    double delta = 0.0;
    for (const auto& nb : eval.neighbours(c)) delta += in[nb.cell] ? -nb.perimeter : nb.perimeter;
    const double sign = adding ? 1.0 : -1.0;
    cur.cut += sign * delta;
    cur.volume += sign * eval.complex().volume[c];
    cur.exterior += sign * eval.cell_exterior(c);
    cur.size = adding ? cur.size + 1 : cur.size - 1;
    in[c] = adding;
    if ((i + 1) % kResyncPeriod == 0) cur = eval.measure(in);
  }
  return out;
}

}  // namespace

std::string to_string(Constraint c) {
  return c == Constraint::kVolumeHalf ? "volume" : "boundary";
}

Constraint parse_constraint(const std::string& s) {
  if (s == "volume" || s == "VolumeHalf") return Constraint::kVolumeHalf;
  if (s == "boundary" || s == "BoundaryHalf") return Constraint::kBoundaryHalf;
  throw InputError("unknown constraint variant \"" + s + "\" (use volume or boundary)");
}

CutEvaluator::CutEvaluator(const BoundaryComplex& complex)
    : complex_(&complex),
      adjacency_(complex.cell_count()),
      cell_exterior_(complex.cell_count(), 0.0) {
  const std::size_t n = complex.cell_count();
  for (const auto& f : complex.interfaces) {
    if (f.a >= n || f.b >= n) throw InputError("interface references a missing cell");
    adjacency_[f.a].push_back({f.b, f.perimeter});
    adjacency_[f.b].push_back({f.a, f.perimeter});
    total_perimeter_ += f.perimeter;
  }
  for (const auto& face : complex.faces) {
    if (face.cell >= n) throw InputError("boundary face references a missing cell");
    cell_exterior_[face.cell] += face.rho;
  }
  for (std::size_t c = 0; c < n; ++c) {
    total_volume_ += complex.volume[c];
    total_exterior_ += cell_exterior_[c];
  }
}

SubsetMeasures CutEvaluator::measure(const std::vector<bool>& in) const {
  SubsetMeasures m;
  for (const auto& f : complex_->interfaces)
    if (in[f.a] != in[f.b]) m.cut += f.perimeter;
  for (std::size_t c = 0; c < in.size(); ++c)
    if (in[c]) {
      m.volume += complex_->volume[c];
      m.exterior += cell_exterior_[c];
      ++m.size;
    }
  return m;
}

bool CutEvaluator::admissible(const SubsetMeasures& m, Constraint v) const {
  if (m.size == 0) return false;
  if (v == Constraint::kVolumeHalf)
    return m.volume > 0.0 && m.volume <= 0.5 * total_volume_ * (1.0 + kAdmissibleSlack);
  return m.exterior <= 0.5 * total_exterior_ * (1.0 + kAdmissibleSlack);
}

CutResult CutEvaluator::result(const std::vector<bool>& in, Constraint v, bool exact) const {
  return make_result(members(in), measure(in), v, exact);
}

bool better_witness(double ratio_a, const std::vector<std::size_t>& a, double ratio_b,
                    const std::vector<std::size_t>& b) {
  if (ratio_a != ratio_b) return ratio_a < ratio_b;
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

CheegerConstants enumerate_constants(const BoundaryComplex& complex, Constraint variant,
                                     EnumerationOptions options) {
  const std::size_t n = complex.cell_count();
  if (n > options.cap || n > 62)
    throw SizeError("exhaustive enumeration limited to " + std::to_string(options.cap) +
                    " cells (complex has " + std::to_string(n) +
                    "); use sweep_cuts and local_search_improve instead");
  CheegerConstants out;
  out.h_witness.variant = out.hprime_witness.variant = variant;
  out.h_witness.exact = out.hprime_witness.exact = true;
  if (n == 0) return out;

  CutEvaluator eval(complex);
  const unsigned jobs = std::max(1u, options.jobs);
  std::size_t prefix_bits = 0;
  if (jobs > 1)
    prefix_bits = std::min<std::size_t>(n, static_cast<std::size_t>(std::bit_width(jobs - 1)) + 2);
  const std::size_t tasks = std::size_t{1} << prefix_bits;

  std::vector<TaskResult> results(tasks);
  if (jobs == 1) {
    results[0] = enumerate_task(eval, variant, 0, 0);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < std::min<std::size_t>(jobs, tasks); ++w)
      workers.emplace_back([&] {
        for (std::size_t t = next++; t < tasks; t = next++)
          results[t] = enumerate_task(eval, variant, prefix_bits, t);
      });
    for (auto& w : workers) w.join();
  }

  Best h, hp;
  for (auto& r : results) {
    if (r.h.ratio < kInf) h.offer(r.h.ratio, std::move(r.h.subset), r.h.measures);
    if (r.hprime.ratio < kInf)
      hp.offer(r.hprime.ratio, std::move(r.hprime.subset), r.hprime.measures);
  }
  if (h.ratio < kInf) {
    out.h = h.ratio;
    out.h_witness = make_result(h.subset, h.measures, variant, true);
  }
  if (hp.ratio < kInf) {
    out.hprime = hp.ratio;
    out.hprime_witness = make_result(hp.subset, hp.measures, variant, true);
  }
  return out;
}

SweepResult sweep_cuts(const BoundaryComplex& complex, std::span<const double> cell_field,
                       Constraint variant) {
  if (cell_field.size() != complex.cell_count())
    throw std::invalid_argument("sweep_cuts: one field value per cell required");
  SweepResult out;
  if (cell_field.empty()) return out;
  const auto [lo, hi] = std::minmax_element(cell_field.begin(), cell_field.end());
  if (*lo == *hi) return out;

  std::vector<double> levels;
  for (double v : cell_field)
    if (v > 0.0) levels.push_back(v);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  CutEvaluator eval(complex);
  std::vector<bool> in(cell_field.size());
  for (double t : levels) {
    for (std::size_t c = 0; c < in.size(); ++c) in[c] = cell_field[c] >= t;
    const SubsetMeasures m = eval.measure(in);
    if (!eval.admissible(m, variant)) continue;
    out.thresholds.push_back(t);
    out.cuts.push_back(make_result(members(in), m, variant, false));
    const std::size_t idx = out.cuts.size() - 1;
    const CutResult& r = out.cuts.back();
    if (r.h_ratio < kInf && (!out.best_h || r.h_ratio < out.cuts[*out.best_h].h_ratio))
      out.best_h = idx;
    if (r.hprime_ratio < kInf &&
        (!out.best_hprime || r.hprime_ratio < out.cuts[*out.best_hprime].hprime_ratio))
      out.best_hprime = idx;
  }
  return out;
}

CutResult local_search_improve(const BoundaryComplex& complex, const CutResult& seed,
                               Objective objective) {
  CutEvaluator eval(complex);
  const std::size_t n = complex.cell_count();
  std::vector<bool> in(n, false);
  for (std::size_t c : seed.subset) {
    if (c >= n) throw std::invalid_argument("local_search_improve: seed names a missing cell");
    in[c] = true;
  }
  SubsetMeasures cur = eval.measure(in);
  if (!eval.admissible(cur, seed.variant))
    throw std::invalid_argument("local_search_improve: seed is not admissible under " +
                                to_string(seed.variant));
  auto ratio_of = [objective](const SubsetMeasures& m) {
    const double den = objective == Objective::kH ? m.volume : m.exterior;
    return den > 0.0 ? m.cut / den : kInf;
  };
  double current = ratio_of(cur);
  const double half_vol = 0.5 * eval.total_volume();
  const double half_ext = 0.5 * eval.total_exterior();

  for (bool moved = true; moved;) {
    moved = false;
    for (std::size_t c = 0; c < n; ++c) {
      const bool adding = !in[c];
      if (!adding && cur.size == 1) continue;
      double delta = 0.0;
      for (const auto& nb : eval.neighbours(c)) delta += in[nb.cell] ? -nb.perimeter : nb.perimeter;
      const double sign = adding ? 1.0 : -1.0;
      SubsetMeasures trial{cur.cut + sign * delta, cur.volume + sign * complex.volume[c],
                           cur.exterior + sign * eval.cell_exterior(c),
                           adding ? cur.size + 1 : cur.size - 1};
      if (seed.variant == Constraint::kVolumeHalf
              ? trial.volume > half_vol * (1.0 + kScreen)
              : trial.exterior > half_ext * (1.0 + kScreen))
        continue;
      const double approx = ratio_of(trial);
      if (!(approx < kInf) || (current < kInf && approx > current * (1.0 + kScreen))) continue;
      in[c] = adding;
      const SubsetMeasures exact = eval.measure(in);
      const double r = ratio_of(exact);
      if (eval.admissible(exact, seed.variant) && r < current) {
        cur = exact;
        current = r;
        moved = true;
      } else {
        in[c] = !adding;
      }
    }
  }
  return make_result(members(in), cur, seed.variant, false);
}

}  // namespace steklov
