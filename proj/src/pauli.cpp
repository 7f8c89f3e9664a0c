#include "hqc/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hqc/errors.hpp"

namespace hqc {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

void require_density(const Eigen::MatrixXcd& m, const char* who) {
  if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 4)) {
    throw InvalidArgument(std::string(who) + ": matrix must be 2x2 or 4x4");
  }
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    std::ostringstream os;
    os << who << ": matrix is not Hermitian (max asymmetry " << asym << ")";
    throw InvalidArgument(os.str());
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > 1e-10) {
    std::ostringstream os;
    os << who << ": trace " << tr << " differs from 1";
    throw InvalidArgument(os.str());
  }
}

Eigen::VectorXd spectrum_checked(const Eigen::MatrixXcd& m, const char* who) {
  require_density(m, who);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-10) {
    std::ostringstream os;
    os << who << ": negative eigenvalue " << ev.minCoeff();
    throw InvalidArgument(os.str());
  }
  return ev;
}

}  // namespace

PureBlochState::PureBlochState(double x, double y, double z) : n_{x, y, z} {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (!(std::abs(norm - 1.0) <= 1e-10)) {
    std::ostringstream os;
    os << "Bloch vector is not a unit vector (|n| = " << norm << ")";
    throw InvalidArgument(os.str());
  }
}

const StructureConstants& structure_constants() {
  static const StructureConstants table = [] {
    StructureConstants s{};
    auto eps = [](int i, int j, int k) -> double {
      // Levi-Civita on {1,2,3}
      return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0;
    };
    for (int j = 1; j < 4; ++j)
      for (int k = 1; k < 4; ++k)
        for (int l = 1; l < 4; ++l) s.c[j][k][l] = 2.0 * eps(k, l, j);
    return s;
  }();
  return table;
}

const std::array<Matrix2c, 4>& pauli_matrices() {
  static const std::array<Matrix2c, 4> sigma = [] {
    std::array<Matrix2c, 4> s;
    s[0] << 1, 0, 0, 1;
    s[1] << 0, 1, 1, 0;
    s[2] << 0, -kI, kI, 0;
    s[3] << 1, 0, 0, -1;
    return s;
  }();
  return sigma;
}

PauliVector to_pauli(const Matrix2c& m, double hermiticity_tol) {
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > hermiticity_tol) {
    std::ostringstream os;
    os << "to_pauli: matrix is not Hermitian (max asymmetry " << asym << ")";
    throw InvalidArgument(os.str());
  }
  const auto& s = pauli_matrices();
  PauliVector v;
  for (int j = 0; j < 4; ++j) v[j] = 0.5 * (m * s[j]).trace().real();
  return v;
}

Matrix2c from_pauli(const PauliVector& v) {
  const auto& s = pauli_matrices();
  Matrix2c m = Matrix2c::Zero();
  for (int j = 0; j < 4; ++j) m += v[j] * s[j];
  return m;
}

PauliVector projector_from_bloch(const PureBlochState& n) {
  return {0.5, 0.5 * n.x(), 0.5 * n.y(), 0.5 * n.z()};
}

PauliVector commutator_coords(const PauliVector& a, const PauliVector& b) {
  // -i[σ_j, σ_k] = 2 ε_jkl σ_l, so the result is twice the cross product.
  return {0.0, 2.0 * (a[2] * b[3] - a[3] * b[2]), 2.0 * (a[3] * b[1] - a[1] * b[3]),
          2.0 * (a[1] * b[2] - a[2] * b[1])};
}

double purity(const PauliVector& r) {
  return r[0] * r[0] + r[1] * r[1] + r[2] * r[2] + r[3] * r[3];
}

PauliVector partial_trace_first(const SymmetricTwoBody& t) {
  return {2.0 * t(0, 0), 2.0 * t(0, 1), 2.0 * t(0, 2), 2.0 * t(0, 3)};
}

SymmetricTwoBody symmetric_product(const PauliVector& a, const PauliVector& b) {
  SymmetricTwoBody t;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i; j < 4; ++j) t(i, j) = 0.5 * (a[i] * b[j] + a[j] * b[i]);
  return t;
}

Matrix4c to_matrix(const SymmetricTwoBody& t) {
  const auto& s = pauli_matrices();
  Matrix4c m = Matrix4c::Zero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m += t(a, b) * kron(s[a], s[b]);
  return m;
}

SymmetricTwoBody to_two_body(const Matrix4c& m, double tol) {
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    std::ostringstream os;
    os << "to_two_body: matrix is not Hermitian (max asymmetry " << asym << ")";
    throw InvalidArgument(os.str());
  }
  const auto& s = pauli_matrices();
  double coeff[4][4];
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) coeff[a][b] = 0.25 * (m * kron(s[a], s[b])).trace().real();
  SymmetricTwoBody t;
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      if (std::abs(coeff[a][b] - coeff[b][a]) > tol) {
        std::ostringstream os;
        os << "to_two_body: operator is not swap-symmetric (coefficients " << a << b << ")";
        throw InvalidArgument(os.str());
      }
      t(a, b) = 0.5 * (coeff[a][b] + coeff[b][a]);
    }
  }
  return t;
}

double entropy_of_spectrum(std::span<const double> eigenvalues) {
  double s = 0.0;
  for (double l : eigenvalues)
    if (l > 0.0) s -= l * std::log(l);
  return s;
}

double mercator_of_spectrum(std::span<const double> eigenvalues, int order) {
  if (order < 1) throw InvalidArgument("mercator_entropy: order must be >= 1");
  double s = 0.0;
  for (double l : eigenvalues) {
    // λ Σ_{n=1..order} (1-λ)^n / n
    const double q = 1.0 - l;
    double pw = 1.0;
    double acc = 0.0;
    for (int n = 1; n <= order; ++n) {
      pw *= q;
      acc += pw / n;
    }
    s += l * acc;
  }
  return s;
}

double von_neumann_entropy(const Eigen::MatrixXcd& m) {
  const Eigen::VectorXd ev = spectrum_checked(m, "von_neumann_entropy");
  return entropy_of_spectrum(std::span<const double>(ev.data(), ev.size()));
}

double mercator_entropy(const Eigen::MatrixXcd& m, int order) {
  if (order < 1) throw InvalidArgument("mercator_entropy: order must be >= 1");
  const Eigen::VectorXd ev = spectrum_checked(m, "mercator_entropy");
  return mercator_of_spectrum(std::span<const double>(ev.data(), ev.size()), order);
}

}  // namespace hqc
