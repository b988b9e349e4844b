#pragma once

// Steklov spectrum of a SteklovNetwork through its discrete
// Dirichlet-to-Neumann map: the Schur complement of the weighted Laplacian
// onto the boundary vertices, paired with the diagonal boundary mass.

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "steklov/complex.hpp"

namespace steklov {

struct Eigenpair {
  double value = 0.0;
  // One value per network vertex.
  Eigen::VectorXd field;
};

struct Spectrum {
  // Ascending; the kernel eigenvalue is reported as exactly 0.
  std::vector<double> eigenvalues;
  // Ascending boundary vertex ids; row i of boundary_vectors is vertex
  // boundary_ids[i].
  std::vector<std::size_t> boundary_ids;
  // Columns are rho-orthonormal boundary eigenvectors.
  Eigen::MatrixXd boundary_vectors;
  // Columns are harmonic extensions over all vertices.
  Eigen::MatrixXd extensions;

  std::size_t size() const { return eigenvalues.size(); }
  Eigenpair pair(std::size_t i) const { return {eigenvalues.at(i), extensions.col(i)}; }
};

// Symmetric; f^T L f = sum_e c_e (f_a - f_b)^2.
Eigen::SparseMatrix<double> assemble_laplacian(const SteklovNetwork& net);

// Factorizes the interior block once and reuses it for extensions and the
// Schur complement. Throws StructuralError when the interior block is
// singular (an interior component without boundary contact).
class BoundaryReduction {
 public:
  explicit BoundaryReduction(const SteklovNetwork& net);
  ~BoundaryReduction();
  BoundaryReduction(BoundaryReduction&&) noexcept;
  BoundaryReduction& operator=(BoundaryReduction&&) noexcept;

  const std::vector<std::size_t>& boundary_ids() const { return boundary_; }
  const std::vector<std::size_t>& interior_ids() const { return interior_; }

  // Columns of `boundary_values` are boundary vectors (rows follow
  // boundary_ids()); returns full-vertex columns.
  Eigen::MatrixXd extend(const Eigen::MatrixXd& boundary_values) const;
  Eigen::MatrixXd dtn() const;

 private:
  struct Factor;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> interior_;
  Eigen::SparseMatrix<double> l_bb_, l_bi_;
  std::unique_ptr<Factor> factor_;
};

Eigen::VectorXd harmonic_extension(const SteklovNetwork& net,
                                   const Eigen::VectorXd& boundary_values);

Eigen::MatrixXd dtn_operator(const SteklovNetwork& net);

// First k Steklov eigenpairs. Throws std::invalid_argument when k exceeds
// the number of boundary vertices.
//
// Eigenvectors are canonical: each cluster of eigenvalues within relative
// gap 1e-8 is re-spanned by Gram-Schmidt over the projections of the unit
// boundary vectors in ascending id order, and every vector's first
// coordinate with magnitude above 1e-8 of its max is made positive.
Spectrum steklov_spectrum(const SteklovNetwork& net, std::size_t k);

// sum_e c_e (f_a - f_b)^2 / sum_b m_b f_b^2. Throws std::domain_error when
// the boundary restriction of f vanishes.
double rayleigh_quotient(const SteklovNetwork& net, const Eigen::VectorXd& f);

// Independent check of sigma_1: the full pencil L f = sigma B f, with B the
// boundary masses padded by zeros, restricted to the B-orthogonal complement
// of the constants where L is definite, then inverted. Dense; refuses more
// than 2000 vertices with SizeError.
double full_pencil_sigma1_oracle(const SteklovNetwork& net);

}  // namespace steklov
