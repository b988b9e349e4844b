#include <cmath>

#include <gtest/gtest.h>

#include "steklov/errors.hpp"
#include "steklov/graph_io.hpp"
#include "steklov/solver.hpp"
#include "test_support.hpp"

using namespace steklov;

namespace {

SteklovNetwork star(std::size_t leaves) {
  SteklovNetwork net;
  net.is_boundary.assign(leaves + 1, true);
  net.is_boundary[0] = false;
  net.boundary_mass.assign(leaves + 1, 1.0);
  net.boundary_mass[0] = 0.0;
  for (std::size_t i = 1; i <= leaves; ++i) net.edges.push_back({0, i, 1.0});
  return net;
}

// Generalized eigenvalues of (Schur complement, diag mass) from scratch.
Eigen::VectorXd dense_steklov_values(const SteklovNetwork& net) {
  const Eigen::MatrixXd l = testkit::dense_laplacian(net);
  const auto b = net.boundary_vertices();
  const auto in = net.interior_vertices();
  const long nb = static_cast<long>(b.size()), ni = static_cast<long>(in.size());
  Eigen::MatrixXd lbb(nb, nb), lbi(nb, ni), lii(ni, ni);
  for (long i = 0; i < nb; ++i) {
    for (long j = 0; j < nb; ++j) lbb(i, j) = l(b[i], b[j]);
    for (long j = 0; j < ni; ++j) lbi(i, j) = l(b[i], in[j]);
  }
  for (long i = 0; i < ni; ++i)
    for (long j = 0; j < ni; ++j) lii(i, j) = l(in[i], in[j]);
  Eigen::MatrixXd schur = lbb;
  if (ni > 0) schur -= lbi * lii.ldlt().solve(lbi.transpose());
  Eigen::VectorXd m(nb);
  for (long i = 0; i < nb; ++i) m(i) = net.boundary_mass[b[i]];
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(schur, m.asDiagonal().toDenseMatrix());
  return es.eigenvalues();
}

}  // namespace

TEST(Solver, TwoVertexPath) {
  SteklovNetwork net;
  net.is_boundary = {true, true};
  net.boundary_mass = {1.0, 1.0};
  net.edges = {{0, 1, 1.0}};
  const auto s = steklov_spectrum(net, 2);
  EXPECT_EQ(s.eigenvalues[0], 0.0);
  EXPECT_NEAR(s.eigenvalues[1], 2.0, 1e-14);
  EXPECT_NEAR(full_pencil_sigma1_oracle(net), 2.0, 1e-12);
}

TEST(Solver, ThreeVertexPath) {
  const auto g = graph_to_pair(path_graph(2, 2.0));
  const auto s = steklov_spectrum(g.network, 2);
  EXPECT_EQ(s.eigenvalues[0], 0.0);
  EXPECT_NEAR(s.eigenvalues[1], 1.0, 1e-14);
  const Eigen::MatrixXd dtn = dtn_operator(g.network);
  EXPECT_NEAR(dtn(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(dtn(0, 1), -0.5, 1e-15);
  // Linear eigenfunction, harmonic in the middle.
  const Eigenpair p = s.pair(1);
  EXPECT_NEAR(p.field(1), 0.5 * (p.field(0) + p.field(2)), 1e-14);
  EXPECT_GT(p.field(0), 0.0);
}

TEST(Solver, StarHasDoubleEigenvalue) {
  const auto net = star(3);
  const auto s = steklov_spectrum(net, 3);
  EXPECT_NEAR(s.eigenvalues[1], 1.0, 1e-13);
  EXPECT_NEAR(s.eigenvalues[2], 1.0, 1e-13);
  EXPECT_NEAR(full_pencil_sigma1_oracle(net), 1.0, 1e-12);
  // Canonical basis of the cluster: projection of e_1 first.
  EXPECT_GT(s.boundary_vectors(0, 1), 0.0);
  EXPECT_NEAR(s.boundary_vectors.col(1).dot(s.boundary_vectors.col(2)), 0.0, 1e-13);
}

TEST(Solver, ChainMatchesContinuum) {
  for (std::size_t k : {2u, 5u, 10u, 31u}) {
    const auto g = graph_to_pair(path_graph(k, 2.0));
    EXPECT_NEAR(steklov_spectrum(g.network, 2).eigenvalues[1], 1.0, 1e-10) << k;
  }
  const auto g = graph_to_pair(path_graph(6, 3.0));
  EXPECT_NEAR(steklov_spectrum(g.network, 2).eigenvalues[1], 2.0 / 3.0, 1e-12);
}

TEST(Solver, MatchesDenseReferenceOnRandomNetworks) {
  testkit::Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const auto net = testkit::random_network(rng, 2 + testkit::pick(rng, 30));
    const auto s = steklov_spectrum(net, net.boundary_vertices().size());
    const Eigen::VectorXd ref = dense_steklov_values(net);
    ASSERT_EQ(static_cast<long>(s.size()), ref.size());
    for (long i = 1; i < ref.size(); ++i)
      EXPECT_NEAR(s.eigenvalues[static_cast<std::size_t>(i)], ref(i), 1e-10 * ref.maxCoeff());
  }
}

TEST(Solver, EigenvectorsAreMassOrthonormalAndHarmonic) {
  testkit::Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto net = testkit::random_network(rng, 6 + testkit::pick(rng, 20));
    const std::size_t k = std::min<std::size_t>(4, net.boundary_vertices().size());
    const auto s = steklov_spectrum(net, k);
    Eigen::VectorXd m(static_cast<long>(s.boundary_ids.size()));
    for (std::size_t i = 0; i < s.boundary_ids.size(); ++i)
      m(static_cast<long>(i)) = net.boundary_mass[s.boundary_ids[i]];
    const Eigen::MatrixXd gram = s.boundary_vectors.transpose() * m.asDiagonal() * s.boundary_vectors;
    EXPECT_TRUE(gram.isApprox(Eigen::MatrixXd::Identity(static_cast<long>(k), static_cast<long>(k)), 1e-10));

    const Eigen::MatrixXd l = testkit::dense_laplacian(net);
    for (std::size_t i = 1; i < k; ++i) {
      const Eigenpair p = s.pair(i);
      const Eigen::VectorXd r = l * p.field;
      for (std::size_t v : net.interior_vertices()) EXPECT_NEAR(r(static_cast<long>(v)), 0.0, 1e-10);
      for (std::size_t v : net.boundary_vertices())
        EXPECT_NEAR(r(static_cast<long>(v)), p.value * net.boundary_mass[v] * p.field(static_cast<long>(v)),
                    1e-9);
      EXPECT_NEAR(rayleigh_quotient(net, p.field), p.value, 1e-10 * std::max(1.0, p.value));
    }
  }
}

TEST(Solver, IsDeterministic) {
  testkit::Rng rng(8);
  const auto net = testkit::random_network(rng, 25);
  const auto a = steklov_spectrum(net, 3);
  const auto b = steklov_spectrum(net, 3);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_TRUE(a.extensions == b.extensions);
}

TEST(Solver, HarmonicExtensionSolvesInteriorRows) {
  const auto net = star(4);
  Eigen::VectorXd bv(4);
  bv << 1.0, 2.0, 3.0, 6.0;
  const Eigen::VectorXd f = harmonic_extension(net, bv);
  EXPECT_NEAR(f(0), 3.0, 1e-14);
  EXPECT_EQ(f(4), 6.0);
}

TEST(Solver, Errors) {
  const auto net = star(3);
  EXPECT_THROW(steklov_spectrum(net, 4), std::invalid_argument);
  EXPECT_THROW(rayleigh_quotient(net, Eigen::VectorXd::Unit(4, 0)), std::domain_error);

  SteklovNetwork split = net;  // interior vertex with no path to the boundary
  split.is_boundary.push_back(false);
  split.boundary_mass.push_back(0.0);
  EXPECT_THROW(steklov_spectrum(split, 2), StructuralError);

  SteklovNetwork big;
  big.is_boundary.assign(2001, true);
  big.boundary_mass.assign(2001, 1.0);
  for (std::size_t i = 1; i < 2001; ++i) big.edges.push_back({i - 1, i, 1.0});
  EXPECT_THROW(full_pencil_sigma1_oracle(big), SizeError);
}
