#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hqc/errors.hpp"
#include "hqc/grid.hpp"
#include "hqc/scenario.hpp"
#include "support.hpp"

using namespace hqc;
using testing::max_abs_diff;

TEST_CASE("example Hamiltonian partials") {
  const OperatorField H = paper_hamiltonian();
  CHECK(H.provenance() == PartialsProvenance::kAnalytic);
  CHECK(max_abs_diff(H.dP({0.0, 0.0}), PauliVector{}) == 0.0);

  // analytic partials against centred differences, h = 1e-5
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double h = 1e-5;
  for (int i = 0; i < 50; ++i) {
    const ClassicalPoint x{u(rng), u(rng)};
    const PauliVector fdR = (H({x.R + h, x.P}) - H({x.R - h, x.P})) * (0.5 / h);
    const PauliVector fdP = (H({x.R, x.P + h}) - H({x.R, x.P - h})) * (0.5 / h);
    CHECK(max_abs_diff(H.dR(x), fdR) < 1e-8);
    CHECK(max_abs_diff(H.dP(x), fdP) < 1e-8);
  }
}

TEST_CASE("example Hamiltonian spectrum") {
  const OperatorField H = paper_hamiltonian();
  // E2 at the origin is 2; the quantum part splits the levels by E2 − E1
  const PaperLevels lv = paper_levels({0.0, 0.0});
  CHECK(lv.e1 == 1.0);
  CHECK(lv.e2 == 2.0);
  const PauliVector h0 = H({0.0, 0.0});
  // Tr(π̂2 Ĥ) = H_0 − |h|
  const double f_down = h0[0] - std::sqrt(h0[1] * h0[1] + h0[2] * h0[2] + h0[3] * h0[3]);
  const double f_up = h0[0] + std::sqrt(h0[1] * h0[1] + h0[2] * h0[2] + h0[3] * h0[3]);
  CHECK(f_down == doctest::Approx(1.0));
  CHECK(f_up == doctest::Approx(2.0));
}

TEST_CASE("finite-difference partials") {
  const OperatorField H = paper_hamiltonian();
  const OperatorField bare = OperatorField::pointwise([H](const ClassicalPoint& x) { return H(x); });
  CHECK(!bare.has_partials());
  CHECK_THROWS_AS(bare.dR({0.0, 0.0}), InvalidArgument);
  const OperatorField fd = finite_difference_partials(bare, kDefaultFiniteDifferenceStep);
  CHECK(fd.provenance() == PartialsProvenance::kFiniteDifference);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 100; ++i) {
    const ClassicalPoint x{u(rng), u(rng)};
    CHECK(max_abs_diff(fd.dR(x), H.dR(x)) < 1e-7);
    CHECK(max_abs_diff(fd.dP(x), H.dP(x)) < 1e-7);
  }
  // centred differences are exact on quadratics
  const OperatorField rp = finite_difference_partials(
      OperatorField::pointwise([](const ClassicalPoint& x) { return PauliVector{x.R * x.P, 0, 0, 0}; }), 1e-4);
  CHECK(rp.dR({0.7, -1.3})[0] == doctest::Approx(-1.3).epsilon(1e-12));
  const OperatorField c = OperatorField::constant({1, 2, 3, 4});
  CHECK(max_abs_diff(c.dR({1, 1}), PauliVector{}) == 0.0);
}

TEST_CASE("example initial density") {
  const auto d = paper_initial_density();
  // λ(0,0) = 0, a = 0: the conditional state is the south pole
  const PauliVector rho = d.first_moment({0.0, 0.0});
  const double F = d.marginal({0.0, 0.0});
  CHECK(rho[0] == doctest::Approx(0.5 * F));
  CHECK(rho[3] / F == doctest::Approx(-0.5));
  CHECK(std::abs(rho[1]) < 1e-17);

  // ∫F_C over [−8,8]² by midpoint quadrature
  const PhaseGrid g = PhaseGrid::square(8.0, 400);
  const auto F_nodes = sample(g, [&](const ClassicalPoint& x) { return d.marginal(x); });
  CHECK(std::abs(integrate(g, F_nodes) - 1.0) < 1e-9);

  // second moment is a convex combination of products
  const ClassicalPoint x{0.8, -0.4};
  CHECK(max_abs_diff(partial_trace_first(d.second_moment(x)), d.first_moment(x)) < 1e-15);
}

TEST_CASE("expression fields") {
  const auto H = expression_hamiltonian({"0.5*(R^2+P^2)", "0", "0", "0.5"});
  CHECK(H({1.0, 2.0})[0] == doctest::Approx(2.5));
  CHECK(H.dR({1.0, 2.0})[0] == doctest::Approx(1.0).epsilon(1e-9));
  const auto d = expression_density("exp(-(R^2+P^2)/2)/(2*pi)", "1", "R");
  CHECK(!d.sampler().has_value());
  CHECK(d.first_moment({0.3, 0.0})[1] / d.marginal({0.3, 0.0}) == doctest::Approx(0.5 * std::sin(0.3)));
  const auto bad = expression_density("1", "2", "0");
  CHECK_THROWS_AS(bad.first_moment({0, 0}), InvalidArgument);
}
