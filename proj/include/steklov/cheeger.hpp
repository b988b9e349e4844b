#pragma once

// Isoperimetric constants of a BoundaryComplex:
//
//   h  = inf |d_I D| / |D|        h' = inf |d_I D| / |d_E D|
//
// over admissible cell subsets D. |d_I D| sums perimeters of interfaces
// with exactly one endpoint in D, |D| sums cell volumes, |d_E D| sums the
// rho weights of boundary faces on cells of D.
//
// Canonical evaluation: every measure of a subset is summed in a fixed
// order (interfaces by index, cells by id, and per-cell rho totals
// pre-summed by face index) so equal subsets always yield bit-identical
// ratios, whichever enumeration produced them.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "steklov/complex.hpp"

namespace steklov {

enum class Constraint {
  kVolumeHalf,    // 0 < |D| <= |M| / 2
  kBoundaryHalf,  // D nonempty, |d_E D| <= |d M| / 2
};

std::string to_string(Constraint c);
// Accepts "volume" / "boundary". Throws InputError otherwise.
Constraint parse_constraint(const std::string& s);

enum class Objective { kH, kHPrime };

inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative slack on the "<= half" admissibility test, so exact-half subsets
// stay admissible despite rounding in the totals.
inline constexpr double kAdmissibleSlack = 1e-12;

struct SubsetMeasures {
  double cut = 0.0;
  double volume = 0.0;
  double exterior = 0.0;
  std::size_t size = 0;
};

struct CutResult {
  std::vector<std::size_t> subset;  // ascending cell ids
  double cut = 0.0;
  double volume = 0.0;
  double exterior = 0.0;
  double h_ratio = kInf;       // cut / volume, +inf when volume == 0
  double hprime_ratio = kInf;  // cut / exterior, +inf when exterior == 0
  Constraint variant = Constraint::kVolumeHalf;
  bool exact = false;

  double ratio(Objective o) const { return o == Objective::kH ? h_ratio : hprime_ratio; }
};

// Precomputed adjacency and totals for repeated subset evaluation.
class CutEvaluator {
 public:
  explicit CutEvaluator(const BoundaryComplex& complex);

  const BoundaryComplex& complex() const { return *complex_; }
  std::size_t cell_count() const { return complex_->cell_count(); }
  double total_volume() const { return total_volume_; }
  double total_exterior() const { return total_exterior_; }
  double total_perimeter() const { return total_perimeter_; }
  double cell_exterior(std::size_t c) const { return cell_exterior_[c]; }

  struct Neighbour {
    std::size_t cell;
    double perimeter;
  };
  const std::vector<Neighbour>& neighbours(std::size_t c) const { return adjacency_[c]; }

  SubsetMeasures measure(const std::vector<bool>& in) const;
  bool admissible(const SubsetMeasures& m, Constraint v) const;
  CutResult result(const std::vector<bool>& in, Constraint v, bool exact) const;

 private:
  const BoundaryComplex* complex_;
  std::vector<std::vector<Neighbour>> adjacency_;
  std::vector<double> cell_exterior_;
  double total_volume_ = 0.0;
  double total_exterior_ = 0.0;
  double total_perimeter_ = 0.0;
};

struct CheegerConstants {
  double h = kInf;
  CutResult h_witness;  // empty subset when h is +inf
  double hprime = kInf;
  CutResult hprime_witness;
};

struct EnumerationOptions {
  std::size_t cap = 22;
  unsigned jobs = 1;
};

// Strict order used to pick witnesses: smaller ratio, then fewer cells,
// then lexicographically smaller id list.
bool better_witness(double ratio_a, const std::vector<std::size_t>& a, double ratio_b,
                    const std::vector<std::size_t>& b);

// Exact constants over all admissible subsets by Gray-code enumeration.
// Subsets with zero exterior never attain h'; subsets with zero volume
// never attain h. Throws SizeError above options.cap cells.
CheegerConstants enumerate_constants(const BoundaryComplex& complex, Constraint variant,
                                     EnumerationOptions options = {});

struct SweepResult {
  std::vector<CutResult> cuts;  // admissible superlevel sets, ascending threshold
  std::vector<double> thresholds;
  std::optional<std::size_t> best_h;
  std::optional<std::size_t> best_hprime;
};

// Superlevel sets {field >= t} for each distinct positive field value t.
SweepResult sweep_cuts(const BoundaryComplex& complex, std::span<const double> cell_field,
                       Constraint variant);

// Greedy single-cell toggles in ascending id order, accepted while the
// objective strictly decreases and the subset stays admissible, repeated
// until a full pass makes no move. Throws std::invalid_argument for an
// inadmissible seed.
CutResult local_search_improve(const BoundaryComplex& complex, const CutResult& seed,
                               Objective objective);

}  // namespace steklov
