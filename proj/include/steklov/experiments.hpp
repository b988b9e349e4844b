#pragma once

// Parameter studies over meshes and path networks. Each point solves for
// sigma_1, computes the isoperimetric constants and builds a certificate;
// reports are written as JSON (full records) and CSV (flat table).

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "steklov/certificate.hpp"
#include "steklov/cheeger.hpp"
#include "steklov/complex.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

// Where an h / h' value came from.
enum class Provenance {
  kExact,           // enumeration over the instance's own complex
  kExactCoarsened,  // enumeration over a block-coarsened complex
  kSweep,           // best admissible superlevel set of the eigenfield
};
std::string to_string(Provenance p);

struct StudyRecord {
  double param = 0.0;  // a, w, lambda, mesh h or edge count
  std::size_t vertices = 0;
  std::size_t cells = 0;
  double sigma1 = 0.0;
  std::optional<double> reference;  // closed-form sigma_1 when one is known
  double h = kInf;
  double hprime = kInf;
  Provenance h_source = Provenance::kExact;
  Provenance hprime_source = Provenance::kExact;
  std::vector<std::size_t> h_witness;
  std::vector<std::size_t> hprime_witness;
  double bound = kInf;  // certificate h_eff * h'_eff / 4
  double total_volume = 0.0;
  bool verdict = false;
};

struct SlopeFit {
  std::string name;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct StudyCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
};

struct StudyReport {
  std::string study;
  std::vector<std::pair<std::string, std::string>> params;  // in emission order
  std::vector<StudyRecord> records;
  std::vector<SlopeFit> fits;
  std::vector<StudyCheck> checks;
  std::string json_path;
  std::string csv_path;

  // All certificates verified and all checks passed.
  bool passed() const;
};

// Least squares of log y against log x. Throws std::invalid_argument for
// fewer than two points or nonpositive data.
SlopeFit fit_loglog(const std::string& name, const std::vector<double>& x,
                    const std::vector<double>& y);

struct StudyOptions {
  Constraint variant = Constraint::kVolumeHalf;
  // Coarsening grid for exact constants on meshes.
  std::size_t blocks_x = 6;
  std::size_t blocks_y = 3;
  unsigned jobs = 1;
};

// One mesh point: sigma_1, exact constants on the coarsened complex and a
// FEM certificate on the fine complex.
StudyRecord analyse_mesh(const TriangleMesh& mesh, const StudyOptions& options,
                         Certificate* certificate = nullptr);

StudyReport thin_product_study(double circumference, const std::vector<double>& a_list,
                               double mesh_h, const StudyOptions& options = {});

// A scaling instance: a network/complex pair with its dimension.
struct ScalingInstance {
  std::string name;
  SteklovNetwork network;
  BoundaryComplex complex;
  Dimension dimension;
};
ScalingInstance p3_instance();
// The complex is coarsened with the options' grid so enumeration is exact.
ScalingInstance disk_instance(double mesh_h, const StudyOptions& options = {});

StudyReport scaling_study(const ScalingInstance& instance, const std::vector<double>& lambdas,
                          const StudyOptions& options = {});

StudyReport dumbbell_study(double r, const std::vector<double>& w_list, double neck_length,
                           double mesh_h, const StudyOptions& options = {});

enum class ConvergenceShape { kDisk, kIntervalChain };
// Disk: levels are mesh sizes. Interval chain: levels are edge counts of a
// path of the given length.
StudyReport convergence_study(ConvergenceShape shape, const std::vector<double>& levels,
                              double length = 2.0, const StudyOptions& options = {});

// 16 hex digits of FNV-1a over the study name and parameters.
std::string params_hash(const StudyReport& report);
std::string report_json(const StudyReport& report);
std::string report_csv(const StudyReport& report);
// Writes <dir>/<study>_<hash>.json and .csv and records the paths.
void write_report(StudyReport& report, const std::string& directory);

}  // namespace steklov
