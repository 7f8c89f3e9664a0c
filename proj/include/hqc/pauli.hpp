#pragma once

// Exact operator algebra of a two-level system in the Pauli basis
// {σ0 = I, σ1, σ2, σ3}.
//
// Coordinate convention used throughout the library:
//   one-body   M = Σ_j μ_j σ_j,            μ_j = Tr(M σ_j) / 2
//   two-body   T = Σ_{a,b} μ_ab σ_a ⊗ σ_b, μ_ab = μ_ba = Tr(T σ_a ⊗ σ_b) / 4
// so a density matrix has μ0 = 1/2, a pure state has Σ_j μ_j² = 1/2, and the
// second moment of a distribution of pure states has μ_ab = E[μ_a μ_b].

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>

#include <Eigen/Dense>

namespace hqc {

using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Vec3 = std::array<double, 3>;

struct PauliVector {
  std::array<double, 4> mu{};

  constexpr PauliVector() = default;
  constexpr PauliVector(double m0, double m1, double m2, double m3) : mu{m0, m1, m2, m3} {}

  constexpr double operator[](std::size_t j) const { return mu[j]; }
  constexpr double& operator[](std::size_t j) { return mu[j]; }

  // Bloch vector (Tr ρσ_k) of the operator, k = 1..3.
  constexpr Vec3 bloch() const { return {2.0 * mu[1], 2.0 * mu[2], 2.0 * mu[3]}; }
  constexpr double trace() const { return 2.0 * mu[0]; }

  PauliVector& operator+=(const PauliVector& o) {
    for (std::size_t j = 0; j < 4; ++j) mu[j] += o.mu[j];
    return *this;
  }
  PauliVector& operator-=(const PauliVector& o) {
    for (std::size_t j = 0; j < 4; ++j) mu[j] -= o.mu[j];
    return *this;
  }
  PauliVector& operator*=(double s) {
    for (auto& m : mu) m *= s;
    return *this;
  }
  friend PauliVector operator+(PauliVector a, const PauliVector& b) { return a += b; }
  friend PauliVector operator-(PauliVector a, const PauliVector& b) { return a -= b; }
  friend PauliVector operator*(PauliVector a, double s) { return a *= s; }
  friend PauliVector operator*(double s, PauliVector a) { return a *= s; }
  friend bool operator==(const PauliVector&, const PauliVector&) = default;
};

// Symmetric two-body operator stored as its 10 independent coefficients
// μ_ab (a ≤ b). Index order: 00 01 02 03 11 12 13 22 23 33.
struct SymmetricTwoBody {
  std::array<double, 10> c{};

  static constexpr std::size_t index(std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    // offsets of row a in the packed upper triangle of a 4x4 matrix
    constexpr std::size_t row_start[4] = {0, 4, 7, 9};
    return row_start[a] + (b - a);
  }

  constexpr double operator()(std::size_t a, std::size_t b) const { return c[index(a, b)]; }
  constexpr double& operator()(std::size_t a, std::size_t b) { return c[index(a, b)]; }

  double mu00() const { return c[0]; }

  SymmetricTwoBody& operator+=(const SymmetricTwoBody& o) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    return *this;
  }
  SymmetricTwoBody& operator-=(const SymmetricTwoBody& o) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
    return *this;
  }
  SymmetricTwoBody& operator*=(double s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  friend SymmetricTwoBody operator+(SymmetricTwoBody a, const SymmetricTwoBody& b) { return a += b; }
  friend SymmetricTwoBody operator-(SymmetricTwoBody a, const SymmetricTwoBody& b) { return a -= b; }
  friend SymmetricTwoBody operator*(SymmetricTwoBody a, double s) { return a *= s; }
  friend SymmetricTwoBody operator*(double s, SymmetricTwoBody a) { return a *= s; }
  friend bool operator==(const SymmetricTwoBody&, const SymmetricTwoBody&) = default;
};

// Unit Bloch vector of a pure state. Construction rejects | |n| - 1 | > 1e-10.
class PureBlochState {
 public:
  PureBlochState(double x, double y, double z);
  explicit PureBlochState(const Vec3& n) : PureBlochState(n[0], n[1], n[2]) {}

  const Vec3& n() const { return n_; }
  double x() const { return n_[0]; }
  double y() const { return n_[1]; }
  double z() const { return n_[2]; }

 private:
  Vec3 n_;
};

// c[j][k][l]: j-coordinate of [σ_k, σ_l] = -i(σ_k σ_l - σ_l σ_k).
// Equals 2 ε_{klj}; every entry with an index 0 vanishes.
struct StructureConstants {
  double c[4][4][4];
};
const StructureConstants& structure_constants();

PauliVector to_pauli(const Matrix2c& m, double hermiticity_tol = 1e-12);
Matrix2c from_pauli(const PauliVector& v);

PauliVector projector_from_bloch(const PureBlochState& n);

// Coordinates of [A, B] = -i(AB - BA).
PauliVector commutator_coords(const PauliVector& a, const PauliVector& b);

// Σ_{j=0..3} μ_j², i.e. Tr(M²)/2.
double purity(const PauliVector& r);

// Tr_1 T: μ0 = 2 μ00, μ_k = 2 μ_0k.
PauliVector partial_trace_first(const SymmetricTwoBody& t);

// Symmetrized product ½(A⊗B + B⊗A); for A = B a pure projector this is π⊗π.
SymmetricTwoBody symmetric_product(const PauliVector& a, const PauliVector& b);

Matrix4c to_matrix(const SymmetricTwoBody& t);
// Rejects operators that are not Hermitian or not swap-symmetric.
SymmetricTwoBody to_two_body(const Matrix4c& m, double tol = 1e-12);

// Dense Pauli matrices, σ0..σ3.
const std::array<Matrix2c, 4>& pauli_matrices();

// Spectral entropies. Both require a positive semidefinite Hermitian matrix
// of dimension 2 or 4 with unit trace (tolerance 1e-10).
double von_neumann_entropy(const Eigen::MatrixXcd& m);
double mercator_entropy(const Eigen::MatrixXcd& m, int order);

// The same functionals applied to an eigenvalue list. These skip the
// normalization checks and are what hybrid-entropy quadrature uses.
double entropy_of_spectrum(std::span<const double> eigenvalues);
double mercator_of_spectrum(std::span<const double> eigenvalues, int order);

}  // namespace hqc
