#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hqc/errors.hpp"
#include "hqc/grid.hpp"

using namespace hqc;

TEST_CASE("grid construction") {
  CHECK_THROWS_AS(PhaseGrid(-1, 1, -1, 1, 7, 16), InvalidArgument);
  CHECK_THROWS_AS(PhaseGrid(1, -1, -1, 1, 16, 16), InvalidArgument);
  const PhaseGrid g(-2, 2, -1, 1, 8, 10);
  CHECK(g.size() == 80);
  CHECK(g.dR() == 0.5);
  CHECK(g.R(0) == -1.75);
  CHECK(g.P(9) == doctest::Approx(0.9));
  CHECK(g.node(g.index(3, 4)).R == g.R(3));
}

TEST_CASE("stencils on polynomials") {
  const PhaseGrid g(-1, 1, -1, 1, 16, 16);
  const auto quad = sample(g, [](const ClassicalPoint& x) { return x.R * x.R + 3 * x.P; });
  const auto cubic = sample(g, [](const ClassicalPoint& x) { return x.R * x.R * x.R; });
  std::vector<double> d(g.size());

  derivative_R(g, quad, d, Stencil::kCentral2);
  // interior exact, edges see the zero ghost
  CHECK(d[g.index(5, 3)] == doctest::Approx(2 * g.R(5)).epsilon(1e-12));
  CHECK(d[g.index(0, 3)] != doctest::Approx(2 * g.R(0)));

  derivative_R(g, quad, d, Stencil::kCentral4OneSided);
  for (std::size_t i = 0; i < g.nR(); ++i) CHECK(d[g.index(i, 2)] == doctest::Approx(2 * g.R(i)).epsilon(1e-11));
  derivative_P(g, quad, d, Stencil::kCentral4OneSided);
  for (std::size_t j = 0; j < g.nP(); ++j) CHECK(d[g.index(4, j)] == doctest::Approx(3.0).epsilon(1e-11));

  derivative_R(g, cubic, d, Stencil::kCentral4);
  for (std::size_t i = 2; i + 2 < g.nR(); ++i)
    CHECK(d[g.index(i, 0)] == doctest::Approx(3 * g.R(i) * g.R(i)).epsilon(1e-11));
}

TEST_CASE("second-order convergence of central differences") {
  auto err = [](std::size_t n) {
    const PhaseGrid g = PhaseGrid::square(6.0, n);
    const auto f = sample(g, [](const ClassicalPoint& x) { return std::exp(-0.5 * (x.R * x.R + x.P * x.P)); });
    std::vector<double> d(g.size());
    derivative_R(g, f, d, Stencil::kCentral2);
    double e = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto x = g.node(k);
      e = std::max(e, std::abs(d[k] + x.R * f[k]));
    }
    return e;
  };
  const double slope = std::log2(err(64) / err(128));
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("midpoint quadrature") {
  const PhaseGrid g = PhaseGrid::square(8.0, 128);
  const auto f = sample(g, [](const ClassicalPoint& x) {
    return std::exp(-0.5 * (x.R * x.R + x.P * x.P)) / (2 * std::numbers::pi);
  });
  CHECK(integrate(g, f) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> wrong(3);
  std::vector<double> out(g.size());
  CHECK_THROWS_AS(derivative_R(g, wrong, out, Stencil::kCentral2), InvalidArgument);
}
