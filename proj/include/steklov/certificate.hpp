#pragma once

// Replays the co-area proof of sigma_1 >= h h' / 4 on one computed
// eigenpair and records every intermediate quantity.
//
// With f the first eigenfunction, signed so that M+ = {f > 0} is small,
// and u = (f+)^2 per cell, the superlevel sets D_t = {u >= t} over the
// distinct positive values of u give
//
//   sum_e p_e |u_a - u_b|  = sum_k (t_k - t_{k-1}) |d_I D_k|
//   sum_c w_c u_c          = sum_k (t_k - t_{k-1}) |D_k|
//   sum_faces rho u        = sum_k (t_k - t_{k-1}) |d_E D_k|
//
// exactly, hence (variation/mass)(variation/boundary)/4 >= h_eff h'_eff / 4
// where h_eff, h'_eff are the best ratios among the rows.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "steklov/cheeger.hpp"
#include "steklov/complex.hpp"
#include "steklov/solver.hpp"

namespace steklov {

struct MPlus {
  int sign = 1;
  std::vector<double> signed_field;
  std::vector<std::size_t> cells;
};

// Picks the sign of the cell field so the strict positive set satisfies the
// variant's smallness constraint (and is nonempty). When both signs do, the
// smaller gamma-volume wins, then fewer cells, then the lexicographically
// smaller cell list. Throws CertificateAbort when neither sign qualifies or
// the field is identically zero.
MPlus extract_m_plus(const BoundaryComplex& complex, std::span<const double> cell_field,
                     Constraint variant);

struct ThresholdRow {
  double t = 0.0;
  double perimeter = 0.0;
  double volume = 0.0;
  double exterior = 0.0;
  std::size_t size = 0;
  bool admissible = false;
};

struct CoareaPair {
  double threshold_sum = 0.0;  // sum_k (t_k - t_{k-1}) * column_k
  double direct_sum = 0.0;
};

struct CoareaSums {
  std::vector<ThresholdRow> table;  // ascending t
  CoareaPair variation;
  CoareaPair mass;
  CoareaPair boundary;
};

// Superlevel-set table and both sides of the three co-area identities for a
// nonnegative cell field u. Rows are D_t = {u >= t} for the distinct
// positive values t of u. Throws std::invalid_argument on negative or
// non-finite values.
CoareaSums coarea_sums(const BoundaryComplex& complex, std::span<const double> u,
                       Constraint variant);

struct ChainValues {
  double energy_plus = 0.0;    // sum_e c_e (F+_a - F+_b)^2 on the network
  double boundary_plus = 0.0;  // sum_b m_b (F+_b)^2
  double mixed_ratio = 0.0;    // energy_plus / boundary_plus
  double cs_middle = 0.0;      // (variation/2)^2 / (mass * boundary)
  double split_product = 0.0;  // (variation/mass) * (variation/boundary) / 4
};

struct StepCheck {
  std::string name;
  bool hard = true;
  bool pass = false;
  double residual = 0.0;
};

struct Verdict {
  std::vector<StepCheck> steps;
  bool passed = false;  // every hard step passes

  const StepCheck* find(const std::string& name) const;
};

struct Certificate {
  double sigma1 = 0.0;
  Constraint variant = Constraint::kVolumeHalf;
  // The final inequality is a hard check only on FEM instances, where energy
  // and measure weights come from one geometry.
  bool final_is_hard = false;
  int sign = 1;
  std::vector<std::size_t> m_plus;
  double total_volume = 0.0;
  double total_exterior = 0.0;
  std::vector<ThresholdRow> table;
  CoareaPair variation;  // integral of |d(f^2)| over M+
  CoareaPair mass;       // integral of f^2 over M+
  CoareaPair boundary;   // integral of f^2 over the exterior boundary of M+
  double h_eff = kInf;
  double hprime_eff = kInf;
  double bound = kInf;
  std::optional<double> h_exact;
  std::optional<double> hprime_exact;
  ChainValues chain;
  Verdict verdict;
};

struct CertificateOptions {
  bool fem_instance = false;
  std::optional<double> h_exact;
  std::optional<double> hprime_exact;
  double tolerance = 1e-8;
};

// `cell_field` is the eigenfield transferred to cells (identity for graph
// instances, triangle averages for meshes). The returned certificate
// already carries verify_chain's verdict.
Certificate build_certificate(const SteklovNetwork& net, const BoundaryComplex& complex,
                              const Eigenpair& pair, std::span<const double> cell_field,
                              Constraint variant, const CertificateOptions& options = {});

// Re-evaluates every recorded relation from the stored numbers. Identities
// are checked to 1e-10 relative, inequalities to `tol` relative.
Verdict verify_chain(const Certificate& cert, double tol = 1e-8);

std::string certificate_to_json(const Certificate& cert);
// Throws InputError on malformed documents.
Certificate certificate_from_json(const std::string& text);
// t,perimeter,volume,exterior,size,admissible
std::string threshold_table_csv(const Certificate& cert);

}  // namespace steklov
