#include "steklov/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "steklov/errors.hpp"

namespace steklov {
namespace {

constexpr double kClusterGap = 1e-8;
constexpr double kKernelTol = 1e-10;
constexpr double kSignTol = 1e-8;

using Triplets = std::vector<Eigen::Triplet<double>>;

// Submatrix of a sparse symmetric matrix with rows/cols given by index lists.
Eigen::SparseMatrix<double> block(const Eigen::SparseMatrix<double>& m,
                                  const std::vector<std::size_t>& rows,
                                  const std::vector<std::size_t>& cols) {
  std::vector<long> row_pos(m.rows(), -1), col_pos(m.cols(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) row_pos[rows[i]] = static_cast<long>(i);
  for (std::size_t j = 0; j < cols.size(); ++j) col_pos[cols[j]] = static_cast<long>(j);
  Triplets t;
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      const long r = row_pos[it.row()], c = col_pos[it.col()];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  Eigen::SparseMatrix<double> out(static_cast<long>(rows.size()),
                                  static_cast<long>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

void canonicalize_cluster(Eigen::MatrixXd& y, long first, long last,
                          const Eigen::VectorXd& sqrt_mass) {
  // y columns live in the mass-scaled basis where the inner product is
  // Euclidean; unit boundary vector e_b maps to sqrt(m_b) e_b.
  const long dim = last - first;
  if (dim <= 1) return;
  const Eigen::MatrixXd basis = y.middleCols(first, dim);
  Eigen::MatrixXd out(y.rows(), dim);
  long filled = 0;
  for (long b = 0; b < y.rows() && filled < dim; ++b) {
    Eigen::VectorXd cand = basis * basis.row(b).transpose() * sqrt_mass(b);
    for (long j = 0; j < filled; ++j) cand -= out.col(j).dot(cand) * out.col(j);
    for (long j = 0; j < filled; ++j) cand -= out.col(j).dot(cand) * out.col(j);
    const double norm = cand.norm();
    if (norm > 1e-3 * sqrt_mass(b)) out.col(filled++) = cand / norm;
  }
  if (filled == dim) y.middleCols(first, dim) = out;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> u) {
  const double peak = u.cwiseAbs().maxCoeff();
  for (long i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) > kSignTol * peak) {
      if (u(i) < 0.0) u = -u;
      return;
    }
  }
}

}  // namespace

Eigen::SparseMatrix<double> assemble_laplacian(const SteklovNetwork& net) {
  const long n = static_cast<long>(net.vertex_count());
  Triplets t;
  t.reserve(net.edges.size() * 4);
  for (const auto& e : net.edges) {
    const long a = static_cast<long>(e.a), b = static_cast<long>(e.b);
    t.emplace_back(a, a, e.conductance);
    t.emplace_back(b, b, e.conductance);
    t.emplace_back(a, b, -e.conductance);
    t.emplace_back(b, a, -e.conductance);
  }
  Eigen::SparseMatrix<double> l(n, n);
  l.setFromTriplets(t.begin(), t.end());
  return l;
}

struct BoundaryReduction::Factor {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

BoundaryReduction::~BoundaryReduction() = default;
BoundaryReduction::BoundaryReduction(BoundaryReduction&&) noexcept = default;
BoundaryReduction& BoundaryReduction::operator=(BoundaryReduction&&) noexcept = default;

BoundaryReduction::BoundaryReduction(const SteklovNetwork& net)
    : boundary_(net.boundary_vertices()),
      interior_(net.interior_vertices()),
      factor_(std::make_unique<Factor>()) {
  if (boundary_.empty()) throw StructuralError("network has no boundary vertex");
  for (const auto& e : net.edges)
    if (e.a >= net.vertex_count() || e.b >= net.vertex_count())
      throw StructuralError("edge references a missing vertex");
  const auto l = assemble_laplacian(net);
  l_bb_ = block(l, boundary_, boundary_);
  l_bi_ = block(l, boundary_, interior_);
  if (!interior_.empty()) {
    const auto l_ii = block(l, interior_, interior_);
    factor_->ldlt.compute(l_ii);
    bool ok = factor_->ldlt.info() == Eigen::Success;
    if (ok) {
      const auto& d = factor_->ldlt.vectorD();
      const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
      ok = (d.array() > 1e-13 * scale).all();
    }
    if (!ok)
      throw StructuralError(
          "interior Laplacian block is singular or indefinite: some interior "
          "component has no path to the boundary");
  }
}

Eigen::MatrixXd BoundaryReduction::extend(const Eigen::MatrixXd& boundary_values) const {
  if (boundary_values.rows() != static_cast<long>(boundary_.size()))
    throw std::invalid_argument("extend: one row per boundary vertex required");
  const long n = static_cast<long>(boundary_.size() + interior_.size());
  Eigen::MatrixXd out(n, boundary_values.cols());
  for (std::size_t i = 0; i < boundary_.size(); ++i)
    out.row(static_cast<long>(boundary_[i])) = boundary_values.row(static_cast<long>(i));
  if (!interior_.empty()) {
    const Eigen::MatrixXd rhs = -(l_bi_.transpose() * boundary_values);
    const Eigen::MatrixXd inner = factor_->ldlt.solve(rhs);
    for (std::size_t i = 0; i < interior_.size(); ++i)
      out.row(static_cast<long>(interior_[i])) = inner.row(static_cast<long>(i));
  }
  return out;
}

Eigen::MatrixXd BoundaryReduction::dtn() const {
  Eigen::MatrixXd lambda = Eigen::MatrixXd(l_bb_);
  if (!interior_.empty()) {
    const Eigen::MatrixXd l_ib = Eigen::MatrixXd(l_bi_.transpose());
    const Eigen::MatrixXd x = factor_->ldlt.solve(l_ib);
    lambda -= l_bi_ * x;
  }
  return 0.5 * (lambda + lambda.transpose());
}

Eigen::VectorXd harmonic_extension(const SteklovNetwork& net,
                                   const Eigen::VectorXd& boundary_values) {
  return BoundaryReduction(net).extend(boundary_values);
}

Eigen::MatrixXd dtn_operator(const SteklovNetwork& net) {
  return BoundaryReduction(net).dtn();
}

Spectrum steklov_spectrum(const SteklovNetwork& net, std::size_t k) {
  BoundaryReduction reduction(net);
  const auto& ids = reduction.boundary_ids();
  const long nb = static_cast<long>(ids.size());
  if (k > ids.size())
    throw std::invalid_argument("steklov_spectrum: k exceeds boundary vertex count");

  Eigen::VectorXd sqrt_mass(nb);
  for (long i = 0; i < nb; ++i) {
    const double m = net.boundary_mass[ids[static_cast<std::size_t>(i)]];
    if (!(m > 0.0)) throw StructuralError("nonpositive boundary mass");
    sqrt_mass(i) = std::sqrt(m);
  }
  const Eigen::MatrixXd lambda = reduction.dtn();
  const Eigen::VectorXd inv = sqrt_mass.cwiseInverse();
  Eigen::MatrixXd scaled = inv.asDiagonal() * lambda * inv.asDiagonal();
  scaled = 0.5 * (scaled + scaled.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
  if (eig.info() != Eigen::Success) throw StructuralError("eigensolver failed");

  Eigen::VectorXd values = eig.eigenvalues();
  Eigen::MatrixXd y = eig.eigenvectors();
  const double top = values.cwiseAbs().maxCoeff();
  const double floor = kKernelTol * (top > kKernelTol ? top : 1.0);
  for (long i = 0; i < nb; ++i)
    if (std::abs(values(i)) < floor) values(i) = 0.0;

  for (long first = 0; first < nb;) {
    long last = first + 1;
    while (last < nb &&
           std::abs(values(last) - values(first)) <=
               kClusterGap * std::max(std::abs(values(last)), floor))
      ++last;
    canonicalize_cluster(y, first, last, sqrt_mass);
    first = last;
  }

  Spectrum out;
  out.boundary_ids = ids;
  const long kk = static_cast<long>(k);
  out.boundary_vectors = inv.asDiagonal() * y.leftCols(kk);
  for (long j = 0; j < kk; ++j) {
    fix_sign(out.boundary_vectors.col(j));
    out.eigenvalues.push_back(values(j));
  }
  out.extensions = reduction.extend(out.boundary_vectors);
  return out;
}

double rayleigh_quotient(const SteklovNetwork& net, const Eigen::VectorXd& f) {
  if (f.size() != static_cast<long>(net.vertex_count()))
    throw std::invalid_argument("rayleigh_quotient: field size mismatch");
  double num = 0.0;
  for (const auto& e : net.edges) {
    const double d = f(static_cast<long>(e.a)) - f(static_cast<long>(e.b));
    num += e.conductance * d * d;
  }
  double den = 0.0;
  for (std::size_t v = 0; v < net.vertex_count(); ++v)
    if (net.is_boundary[v]) {
      const double x = f(static_cast<long>(v));
      den += net.boundary_mass[v] * x * x;
    }
  if (!(den > 0.0))
    throw std::domain_error("rayleigh_quotient: boundary restriction vanishes");
  return num / den;
}

double full_pencil_sigma1_oracle(const SteklovNetwork& net) {
  const long n = static_cast<long>(net.vertex_count());
  if (n > 2000) throw SizeError("full-pencil oracle limited to 2000 vertices");
  if (n < 2) throw StructuralError("full-pencil oracle needs two vertices");
  const Eigen::MatrixXd l = Eigen::MatrixXd(assemble_laplacian(net));
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (long v = 0; v < n; ++v)
    if (net.is_boundary[static_cast<std::size_t>(v)])
      w(v) = net.boundary_mass[static_cast<std::size_t>(v)];
  if (!(w.sum() > 0.0)) throw StructuralError("no boundary mass");

  // Columns 1..n-1 of the Householder reflector of w span {f : w^T f = 0}.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(w)};
  const Eigen::MatrixXd q_full = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd q = q_full.rightCols(n - 1);

  const Eigen::MatrixXd lt = q.transpose() * l * q;
  const Eigen::MatrixXd bt = q.transpose() * w.asDiagonal() * q;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      0.5 * (bt + bt.transpose()), 0.5 * (lt + lt.transpose()));
  if (ges.info() != Eigen::Success)
    throw StructuralError("full-pencil oracle: constrained energy not definite");
  const double mu = ges.eigenvalues().maxCoeff();
  if (!(mu > 0.0)) throw StructuralError("full-pencil oracle: no finite eigenvalue");
  return 1.0 / mu;
}

}  // namespace steklov
