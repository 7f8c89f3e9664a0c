#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hqc/ehrenfest.hpp"
#include "support.hpp"

using namespace hqc;

TEST_CASE("microstate RHS") {
  // example Hamiltonian at the origin: Ṙ = ∂_P f_H = P = 0
  const Microstate s({0.0, 0.0}, PureBlochState(0, 0, 1));
  CHECK(microstate_rhs(s, paper_hamiltonian()).dR == 0.0);

  // H = σ3, n = x̂: ṅ = 2 ẑ × x̂ = (0, 2, 0)
  const OperatorField H = OperatorField::constant({0, 0, 0, 1});
  const Tangent t = microstate_rhs(Microstate({0.0, 0.0}, PureBlochState(1, 0, 0)), H);
  CHECK(t.dn[0] == 0.0);
  CHECK(t.dn[1] == doctest::Approx(2.0));
  CHECK(t.dn[2] == 0.0);

  // frozen quantum part: classical motion is Hamilton's equations of H_C
  const OperatorField U = uncoupled_hamiltonian();
  const Tangent u = microstate_rhs(Microstate({0.4, -0.7}, PureBlochState(0, 1, 0)), U);
  CHECK(u.dR == doctest::Approx(-0.7));
  CHECK(u.dP == doctest::Approx(-0.4));
}

TEST_CASE("zero Hamiltonian leaves the state fixed") {
  const Microstate s({0.3, 0.2}, PureBlochState(0.6, 0, 0.8));
  const Trajectory tr = integrate_trajectory(s, OperatorField::constant({}), 1.0, 1e-2);
  CHECK(tr.final_state.xi.R == 0.3);
  CHECK(tr.final_state.xi.P == 0.2);
  CHECK(tr.final_state.n[0] == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("harmonic orbit has period 2 pi") {
  const Microstate s({1.0, 0.0}, PureBlochState(0, 0, 1));
  const Trajectory tr = integrate_trajectory(s, harmonic_hamiltonian(), 2 * std::numbers::pi, 1e-3, {1000});
  CHECK(std::abs(tr.final_state.xi.R - 1.0) < 1e-6);
  CHECK(std::abs(tr.final_state.xi.P) < 1e-6);
  CHECK(tr.samples.back().t == doctest::Approx(2 * std::numbers::pi));
  CHECK(tr.samples.size() == 8);  // t = 0, every 1000th step, and the end
}

TEST_CASE("hybrid energy and purity are conserved") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  const Microstate s({g(rng), g(rng)}, PureBlochState(testing::random_unit(rng)));
  const OperatorField H = paper_hamiltonian();
  const Trajectory tr = integrate_trajectory(s, H, 10.0, 1e-3, {100});
  const double e0 = tr.samples.front().f_H;
  double worst = 0.0;
  for (const auto& x : tr.samples) worst = std::max(worst, std::abs(x.f_H - e0) / std::abs(e0));
  CHECK(worst < 1e-8);
  CHECK(tr.max_norm_drift < 1e-12);
  CHECK(!tr.aborted);
}

TEST_CASE("non-finite state aborts with the last good state") {
  // Ṙ = e^R reaches infinity at t = 1
  const OperatorField blow = OperatorField(
      [](const ClassicalPoint& x) { return PauliVector{std::exp(x.R) * x.P, 0, 0, 0}; },
      [](const ClassicalPoint& x) { return PauliVector{std::exp(x.R) * x.P, 0, 0, 0}; },
      [](const ClassicalPoint& x) { return PauliVector{std::exp(x.R), 0, 0, 0}; });
  const Trajectory tr = integrate_trajectory(Microstate({0.0, 1.0}, PureBlochState(0, 0, 1)), blow, 2.0, 1e-2);
  CHECK(tr.aborted);
  CHECK(std::isfinite(tr.final_state.xi.R));
  CHECK(!tr.message.empty());
}

TEST_CASE("trajectory CSV header") {
  const Trajectory tr =
      integrate_trajectory(Microstate({1.0, 0.0}, PureBlochState(0, 0, 1)), harmonic_hamiltonian(), 0.01, 1e-3);
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  CHECK(os.str().rfind("t,R,P,nx,ny,nz,f_H\n", 0) == 0);
}
