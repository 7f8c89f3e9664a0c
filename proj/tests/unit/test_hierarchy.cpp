#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "hqc/errors.hpp"
#include "hqc/hierarchy.hpp"
#include "support.hpp"

using namespace hqc;
using testing::max_abs_diff;

namespace {

double max_field_diff(const std::vector<PauliVector>& a, const std::vector<PauliVector>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, max_abs_diff(a[k], b[k]));
  return m;
}

}  // namespace

TEST_CASE("xi-independent Hamiltonian gives the pure commutator") {
  const PhaseGrid g = PhaseGrid::square(6.0, 32);
  const MomentField f = mixture_moment_field(paper_initial_density(), g, 2);
  const PauliVector h{0.3, 0.2, -0.5, 0.9};
  const HierarchyRHS rhs = first_moment_rhs(f, f, OperatorField::constant(h));
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(max_abs_diff(rhs.drho[k], commutator_coords(h, f.first[k])) < 1e-15);
    CHECK(rhs.dF[k] == 0.0);
  }
}

TEST_CASE("scalar Hamiltonian gives classical Liouville transport") {
  // Gaussian centred at (1, 0) under ½(R²+P²): {H, F} = −P F
  const PhaseGrid g = PhaseGrid::square(8.0, 128);
  const ConditionalMixtureField d = gaussian_pure_density({1.0, 0.0}, 1.0, PureBlochState(0.6, 0, 0.8));
  const MomentField f = mixture_moment_field(d, g, 2);
  for (BracketForm form : {BracketForm::kAdvective, BracketForm::kConservative}) {
    const HierarchyRHS rhs = first_moment_rhs(f, f, harmonic_hamiltonian(), {Stencil::kCentral4OneSided, form});
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto x = g.node(k);
      worst = std::max(worst, std::abs(rhs.dF[k] + x.P * f.F[k]));
      // every coordinate is transported, the conditional state stays put
      CHECK(rhs.drho[k][3] == doctest::Approx(0.4 * rhs.dF[k]).epsilon(1e-9).scale(1e-14));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("first_moment_rhs validates its inputs") {
  const PhaseGrid g = PhaseGrid::square(6.0, 16);
  MomentField f = mixture_moment_field(paper_initial_density(), g, 2);
  const MomentField other = mixture_moment_field(paper_initial_density(), PhaseGrid::square(5.0, 16), 2);
  CHECK_THROWS_AS(first_moment_rhs(f, other, paper_hamiltonian()), InvalidArgument);
  f.second[40](0, 3) += 1e-3;
  CHECK_THROWS_AS(first_moment_rhs(f, f, paper_hamiltonian()), InvalidArgument);
}

TEST_CASE("two-body commutator against the 4x4 matrix") {
  std::mt19937_64 rng(4);
  const auto& s = pauli_matrices();
  for (int trial = 0; trial < 50; ++trial) {
    const PauliVector h = testing::random_hermitian(rng);
    SymmetricTwoBody t;
    std::normal_distribution<double> gn;
    for (double& c : t.c) c = gn(rng);
    const Matrix2c H = from_pauli(h);
    const Matrix4c Hs = Eigen::kroneckerProduct(H, s[0]).eval() + Eigen::kroneckerProduct(s[0], H).eval();
    const Matrix4c T = to_matrix(t);
    const Matrix4c C = std::complex<double>(0, -1) * (Hs * T - T * Hs);
    CHECK(max_abs_diff(two_body_commutator(h, t), to_two_body(C, 1e-10)) < 1e-12);
  }
}

TEST_CASE("k = 2 hierarchy level") {
  const PhaseGrid g = PhaseGrid::square(6.0, 32);
  const MomentField f = mixture_moment_field(paper_initial_density(), g, 3);
  const PauliVector h{0.1, 0.4, 0.0, -0.7};
  const HierarchyRHS c = kth_moment_rhs(2, f, OperatorField::constant(h));
  for (std::size_t k = 0; k < g.size(); k += 7)
    CHECK(max_abs_diff(c.drho2[k], two_body_commutator(h, f.second[k])) < 1e-15);

  // Tr_1 commutes with the time derivative
  const HierarchyRHS r2 = kth_moment_rhs(2, f, paper_hamiltonian());
  const HierarchyRHS r1 = kth_moment_rhs(1, f, paper_hamiltonian());
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    worst = std::max(worst, max_abs_diff(partial_trace_first(r2.drho2[k]), r1.drho[k]));
  CHECK(worst < 1e-10);
  CHECK(max_field_diff(r2.drho, r1.drho) == 0.0);
  CHECK_THROWS_AS(kth_moment_rhs(2, mixture_moment_field(paper_initial_density(), g, 2), paper_hamiltonian()),
                  InvalidArgument);
  CHECK_THROWS_AS(kth_moment_rhs(3, f, paper_hamiltonian()), InvalidArgument);
}

TEST_CASE("marginal equations conserve probability") {
  const PhaseGrid g = PhaseGrid::square(8.0, 64);
  const MomentField f = mixture_moment_field(paper_initial_density(), g, 1);
  for (BracketForm form : {BracketForm::kAdvective, BracketForm::kConservative}) {
    const MarginalRHS m = marginal_rhs(f, paper_hamiltonian(), {Stencil::kCentral4OneSided, form});
    CHECK(std::abs(integrate(g, m.dF)) < 1e-6);
  }
  const PauliVector h{0.0, 0.0, 0.0, 1.0};
  const MarginalRHS c = marginal_rhs(f, OperatorField::constant(h));
  PauliVector total;
  for (std::size_t k = 0; k < g.size(); ++k) total += f.first[k] * g.cell_area();
  CHECK(max_abs_diff(c.drho_marginal, commutator_coords(h, total)) < 1e-14);
}

TEST_CASE("average rates") {
  const PhaseGrid g = PhaseGrid::square(8.0, 64);
  const MomentField f = mixture_moment_field(paper_initial_density(), g, 2);
  const OperatorField H = paper_hamiltonian();
  const AverageRate one = average_rate(OperatorField::constant({1, 0, 0, 0}), f, f, H);
  CHECK(std::abs(one.value) < 1e-6);
  CHECK(std::abs(one.moment_form) < 1e-15);
  const AverageRate e = average_rate(H, f, f, H);
  CHECK(std::abs(e.value) <= g.dR() * g.dR() * e.scale);
  CHECK(std::abs(e.moment_form) < 1e-12);
  // both routes agree for a generic observable up to the difference error
  const AverageRate s3 = average_rate(OperatorField::constant({0, 0, 0, 1}), f, f, H);
  CHECK(std::abs(s3.value - s3.moment_form) <= g.dR() * g.dR() * s3.scale);
}

TEST_CASE("pointwise RHS matches the grid RHS") {
  const PhaseGrid g = PhaseGrid::square(8.0, 128);
  const auto d = paper_initial_density();
  const MomentField f = mixture_moment_field(d, g, 2);
  const HierarchyRHS rhs = first_moment_rhs(f, f, paper_hamiltonian());
  const std::size_t k = g.index(70, 60);
  const PauliVector at = first_moment_rhs_at(g.node(k), f.first[k],
                                             [&](const ClassicalPoint& x) { return d.second_moment(x); },
                                             paper_hamiltonian());
  CHECK(max_abs_diff(at, rhs.drho[k]) < 1e-4);
}

TEST_CASE("theta decomposition") {
  // maximally mixed: antipodal pair with equal weights
  for (double th : {0.0, 0.7, 2.0}) {
    const ThetaDecomposition t = theta_decomposition({0.5, 0, 0, 0}, th);
    CHECK(t.w1 == doctest::Approx(0.5));
    CHECK(t.w2 == doctest::Approx(0.5));
    CHECK(t.n2[0] == doctest::Approx(-t.n1[0]));
    CHECK(t.n2[2] == doctest::Approx(-t.n1[2]));
  }
  // θ along the eigenvector recovers the spectral weights
  const double lam = 0.8, a = 0.6;
  const PauliVector r{0.5, 0.5 * (2 * lam - 1) * std::sin(a), 0, 0.5 * (2 * lam - 1) * std::cos(a)};
  const ThetaDecomposition t = theta_decomposition(r, a);
  CHECK(t.w1 == doctest::Approx(lam).epsilon(1e-12));
  CHECK(t.w2 == doctest::Approx(1 - lam).epsilon(1e-12));

  // example density at (1, 0): a = π/4, λ = 1/2, θ = π/2
  const auto d = paper_initial_density();
  const PauliVector cond = d.first_moment({1.0, 0.0}) * (1.0 / d.marginal({1.0, 0.0}));
  const ThetaDecomposition p = theta_decomposition(cond, std::numbers::pi / 2);
  Vec3 rec{};
  for (int i = 0; i < 3; ++i) rec[i] = p.w1 * p.n1[i] + p.w2 * p.n2[i];
  const Vec3 b = cond.bloch();
  for (int i = 0; i < 3; ++i) CHECK(std::abs(rec[i] - b[i]) < 1e-12);
  CHECK(p.w1 >= 0.0);
  CHECK(p.w2 >= 0.0);
  CHECK_THROWS_AS(theta_decomposition({0.5, 0, 0, 0.5}, 0.3), InvalidArgument);
}

TEST_CASE("fig1 scan") {
  Fig1Options o;
  o.nR = 9;
  o.ntheta = 7;
  const auto rows = fig1_scan(paper_initial_density(), paper_hamiltonian(), o);
  CHECK(rows.size() == 63);
  double worst_dev = 0.0;
  for (const auto& r : rows) worst_dev = std::max(worst_dev, r.first_deviation);
  CHECK(worst_dev < 1e-12);

  // frozen quantum part: the derivative cannot depend on θ
  const auto flat = fig1_scan(paper_initial_density(), uncoupled_hamiltonian(), o);
  for (std::size_t i = 0; i < o.nR; ++i) {
    double lo = 1e300, hi = -1e300, noise = 0.0;
    for (std::size_t j = 0; j < o.ntheta; ++j) {
      const auto& r = flat[i * o.ntheta + j];
      lo = std::min(lo, r.dmu3);
      hi = std::max(hi, r.dmu3);
      noise = std::max(noise, r.noise);
    }
    CHECK(hi - lo <= noise);
  }
}
