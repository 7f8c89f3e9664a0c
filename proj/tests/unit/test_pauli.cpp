#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "hqc/errors.hpp"
#include "hqc/pauli.hpp"
#include "support.hpp"

using namespace hqc;
using testing::max_abs_diff;

namespace {

Matrix2c dense_commutator(const Matrix2c& a, const Matrix2c& b) {
  const std::complex<double> mi(0.0, -1.0);
  return mi * (a * b - b * a);
}

Eigen::Matrix2cd dense_partial_trace(const Matrix4c& t) {
  // first factor is the slow index
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) out(i, j) += t(2 * k + i, 2 * k + j);
  return out;
}

}  // namespace

TEST_CASE("to_pauli on basic operators") {
  Matrix2c half = Matrix2c::Identity() * 0.5;
  CHECK(max_abs_diff(to_pauli(half), PauliVector(0.5, 0, 0, 0)) == 0.0);
  CHECK(max_abs_diff(to_pauli(pauli_matrices()[1]), PauliVector(0, 1, 0, 0)) == 0.0);
  Matrix2c up = Matrix2c::Zero();
  up(0, 0) = 1.0;
  CHECK(max_abs_diff(to_pauli(up), PauliVector(0.5, 0, 0, 0.5)) < 1e-15);
}

TEST_CASE("to_pauli rejects non-Hermitian input") {
  Matrix2c m = Matrix2c::Zero();
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(to_pauli(m), InvalidArgument);
}

TEST_CASE("projector_from_bloch") {
  CHECK(max_abs_diff(projector_from_bloch(PureBlochState(0, 0, 1)), PauliVector(0.5, 0, 0, 0.5)) == 0.0);
  const Matrix2c m = from_pauli(projector_from_bloch(PureBlochState(0, 1, 0)));
  Eigen::SelfAdjointEigenSolver<Matrix2c> es(m);
  CHECK(es.eigenvalues()[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(es.eigenvalues()[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(PureBlochState(0, 0, 1.1), InvalidArgument);
}

TEST_CASE("commutator_coords") {
  const double m1 = 0.3;
  const PauliVector c = commutator_coords(PauliVector(0, 0, 0, 1), PauliVector(0.5, m1, 0, 0));
  CHECK(max_abs_diff(c, PauliVector(0, 0, 2 * m1, 0)) < 1e-15);

  std::mt19937_64 rng(7);
  const PauliVector a = testing::random_hermitian(rng);
  CHECK(max_abs_diff(commutator_coords(a, a), PauliVector{}) == 0.0);
  CHECK(max_abs_diff(commutator_coords(PauliVector(1, 0, 0, 0), a), PauliVector{}) == 0.0);
}

TEST_CASE("structure constants are 2 epsilon") {
  const auto& sc = structure_constants();
  CHECK(sc.c[3][1][2] == 2.0);
  CHECK(sc.c[3][2][1] == -2.0);
  CHECK(sc.c[1][2][3] == 2.0);
  CHECK(sc.c[0][1][2] == 0.0);
}

TEST_CASE("purity") {
  CHECK(purity(PauliVector(0.5, 0, 0, 0)) == 0.25);
  CHECK(purity(PauliVector{}) == 0.0);
  CHECK(purity(projector_from_bloch(PureBlochState(0.6, 0, 0.8))) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("partial trace of products and mixtures") {
  const PauliVector p1 = projector_from_bloch(PureBlochState(0, 0, 1));
  const PauliVector p2 = projector_from_bloch(PureBlochState(0.6, 0, 0.8));
  CHECK(max_abs_diff(partial_trace_first(symmetric_product(p2, p2)), p2) < 1e-15);

  const double lam = 0.3;
  const SymmetricTwoBody mix = symmetric_product(p1, p1) * lam + symmetric_product(p2, p2) * (1 - lam);
  const PauliVector expect = p1 * lam + p2 * (1 - lam);
  CHECK(max_abs_diff(partial_trace_first(mix), expect) < 1e-15);
  // explicit 4×4 oracle
  const PauliVector dense = to_pauli(dense_partial_trace(to_matrix(mix)));
  CHECK(max_abs_diff(dense, expect) < 1e-14);
}

TEST_CASE("to_two_body round trip and symmetry check") {
  std::mt19937_64 rng(3);
  SymmetricTwoBody t;
  std::normal_distribution<double> g;
  for (double& c : t.c) c = g(rng);
  CHECK(max_abs_diff(to_two_body(to_matrix(t)), t) < 1e-14);
  // σ1⊗σ2 alone is not swap-symmetric
  Matrix4c asym = Eigen::kroneckerProduct(pauli_matrices()[1], pauli_matrices()[2]);
  CHECK_THROWS_AS(to_two_body(asym), InvalidArgument);
}

TEST_CASE("entropies") {
  Eigen::MatrixXcd pure = from_pauli(projector_from_bloch(PureBlochState(0, 0, 1)));
  Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = 0.75;
  d(1, 1) = 0.25;
  CHECK(von_neumann_entropy(pure) == doctest::Approx(0.0));
  CHECK(von_neumann_entropy(mixed) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(von_neumann_entropy(d) == doctest::Approx(0.5623351446188083).epsilon(1e-15));
  CHECK(mercator_entropy(pure, 1) == doctest::Approx(0.0));
  CHECK(mercator_entropy(mixed, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(mercator_entropy(mixed, 20) - std::log(2.0)) < 1e-4);
  CHECK_THROWS_AS(mercator_entropy(mixed, 0), InvalidArgument);
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
  CHECK_THROWS_AS(von_neumann_entropy(bad), InvalidArgument);
}

TEST_CASE("property: algebra against dense matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const PauliVector a = testing::random_hermitian(rng);
    const PauliVector b = testing::random_hermitian(rng);
    const PauliVector c = to_pauli(dense_commutator(from_pauli(a), from_pauli(b)));
    CHECK(max_abs_diff(commutator_coords(a, b), c) < 1e-12);

    // Tr(M²)/2 = Σ μ_j²
    const Matrix2c m = from_pauli(a);
    CHECK(purity(a) == doctest::Approx((m * m).trace().real() / 2).epsilon(1e-12));

    const SymmetricTwoBody t = symmetric_product(a, b);
    const Matrix4c dense = 0.5 * (Eigen::kroneckerProduct(from_pauli(a), from_pauli(b)).eval() +
                                  Eigen::kroneckerProduct(from_pauli(b), from_pauli(a)).eval());
    CHECK((to_matrix(t) - dense).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(max_abs_diff(partial_trace_first(t), to_pauli(dense_partial_trace(dense), 1e-10)) < 1e-12);
  }
}
