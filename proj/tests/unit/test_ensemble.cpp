#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hqc/ensemble.hpp"
#include "hqc/errors.hpp"
#include "hqc/parallel.hpp"
#include "support.hpp"

using namespace hqc;
using testing::max_abs_diff;

namespace {

OperatorField scalar_field(double (*f)(const ClassicalPoint&)) {
  return OperatorField::pointwise([f](const ClassicalPoint& x) { return PauliVector{f(x), 0, 0, 0}; });
}

ConditionalMixtureField uniform_conditional() {
  // λ = 1/2 on ±x: first moment F_C·I/2
  return expression_density("exp(-(R^2+P^2)/2)/(2*pi)", "0.5", "pi/2");
}

}  // namespace

TEST_CASE("sampling the example density") {
  const Ensemble e = sample_initial(paper_initial_density(), 100000, 42);
  CHECK(e.size() == 100000);
  double mR = 0.0;
  for (const auto& m : e.members) mR += m.w * m.state.xi.R;
  CHECK(std::abs(mR) < 3.0 / std::sqrt(1e5));

  // λ → 0 near the origin: states there are the south pole
  std::size_t near = 0, south = 0;
  for (const auto& m : e.members) {
    const auto& x = m.state.xi;
    if (x.R * x.R + x.P * x.P < 0.01) {
      ++near;
      if (m.state.n[2] < -0.99) ++south;
    }
  }
  REQUIRE(near > 100);
  CHECK(static_cast<double>(south) / static_cast<double>(near) > 0.98);

  const Ensemble one = sample_initial(paper_initial_density(), 1, 1);
  CHECK(one.size() == 1);
  CHECK(one.members[0].w == 1.0);
  CHECK_THROWS_AS(sample_initial(paper_initial_density(), 0, 1), InvalidArgument);
}

TEST_CASE("rejection sampling matches the marginal") {
  const Ensemble e = sample_initial(uniform_conditional(), 20000, 3);
  double m2 = 0.0;
  for (const auto& m : e.members) m2 += m.w * m.state.xi.R * m.state.xi.R;
  CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / 20000));
  CHECK_THROWS_AS(sample_initial(expression_density("0", "0.5", "0"), 10, 1), InvalidArgument);
}

TEST_CASE("sampling does not depend on the thread count") {
  set_thread_count(1);
  const Ensemble a = sample_initial(paper_initial_density(), 1000, 8);
  set_thread_count(4);
  const Ensemble b = sample_initial(paper_initial_density(), 1000, 8);
  set_thread_count(0);
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    same = same && a.members[i].state.xi.R == b.members[i].state.xi.R && a.members[i].state.n == b.members[i].state.n;
  CHECK(same);
}

TEST_CASE("propagation") {
  const Ensemble e = sample_initial(transport_scenario().density, 4000, 5);
  const Ensemble same = propagate(e, harmonic_hamiltonian(), 0.0, 1e-2);
  CHECK(same.members[17].state.xi.R == e.members[17].state.xi.R);

  // harmonic flow rotates the Gaussian: centre (1, 0) → (cos t, −sin t)
  const double t = 1.0;
  const Ensemble moved = propagate(e, harmonic_hamiltonian(), t, 1e-2);
  double mR0 = 0.0, mP0 = 0.0, mR = 0.0, mP = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    mR0 += e.members[i].w * e.members[i].state.xi.R;
    mP0 += e.members[i].w * e.members[i].state.xi.P;
    mR += moved.members[i].w * moved.members[i].state.xi.R;
    mP += moved.members[i].w * moved.members[i].state.xi.P;
  }
  CHECK(mR == doctest::Approx(mR0 * std::cos(t) + mP0 * std::sin(t)).epsilon(1e-9));
  CHECK(std::abs(mR - std::cos(t)) < 3.0 / std::sqrt(4000.0) * 1.5);
  CHECK(std::abs(mP + std::sin(t)) < 3.0 / std::sqrt(4000.0) * 1.5);

  // every member conserves its hybrid energy
  const OperatorField H = paper_hamiltonian();
  const Ensemble p0 = sample_initial(paper_initial_density(), 200, 6);
  const Ensemble p1 = propagate(p0, H, 1.0, 1e-3);
  double worst = 0.0;
  for (std::size_t i = 0; i < p0.size(); ++i)
    worst = std::max(worst, std::abs(hybrid_energy(p1.members[i].state, H) - hybrid_energy(p0.members[i].state, H)));
  CHECK(worst < 1e-9);
}

TEST_CASE("kernel estimate of the first moment") {
  const auto d = paper_initial_density();
  const Ensemble e = sample_initial(d, 200000, 13);
  const PhaseGrid g = PhaseGrid::square(4.0, 32);
  MomentFieldErrors err;
  const double h = 0.15;
  const MomentField est = estimate_moment_field(e, g, 1, h, &err);
  // compare with the exact field; tolerance covers noise and the O(h²) smoothing bias
  const double bias = 0.5 * h * h * 0.2;
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const PauliVector ex = d.first_moment(g.node(k));
    for (std::size_t a = 0; a < 4; ++a)
      worst = std::max(worst, std::abs(est.first[k][a] - ex[a]) / (5.0 * err.first[k][a] + bias));
    CHECK(est.first[k][0] == 0.5 * est.F[k]);
  }
  CHECK(worst < 1.0);
}

TEST_CASE("estimator trace identities are exact") {
  const Ensemble e = sample_initial(paper_initial_density(), 5000, 2);
  const PhaseGrid g = PhaseGrid::square(4.0, 16);
  const MomentField f3 = estimate_moment_field(e, g, 3);
  const MomentField f1 = estimate_moment_field(e, g, 1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(f3.F[k] == f1.F[k]);
    CHECK(partial_trace_first(f3.second[k]) == f1.first[k]);
    CHECK(partial_trace_first(f3.third[k]) == f3.second[k]);
  }
  CHECK_THROWS_AS(estimate_moment_field(e, g, 4), InvalidArgument);
}

TEST_CASE("averages") {
  const auto d = paper_initial_density();
  const Ensemble e = sample_initial(d, 50000, 17);
  const OperatorField I = OperatorField::constant({1, 0, 0, 0});
  CHECK(ensemble_average(I, e).value == doctest::Approx(1.0).epsilon(1e-12));
  const Estimate r = ensemble_average(scalar_field([](const ClassicalPoint& x) { return x.R; }), e);
  CHECK(std::abs(r.value) < 3 * r.standard_error);

  // ⟨σ3⟩ at t = 0 on the grid against an independent quadrature of (2λ − 1) cos a
  const PhaseGrid g = PhaseGrid::square(8.0, 200);
  const MomentField f = mixture_moment_field(d, g, 2);
  const OperatorField s3 = OperatorField::constant({0, 0, 0, 1});
  const auto q = sample(g, [&](const ClassicalPoint& x) {
    const double r2 = x.R * x.R + x.P * x.P;
    const double a = std::atan(r2);
    const double lam = 2 / std::numbers::pi * a;
    return d.marginal(x) * (2 * lam - 1) * std::cos(a);
  });
  CHECK(average_observable(s3, f) == doctest::Approx(integrate(g, q)).epsilon(1e-12));
  const Estimate mc = ensemble_average(s3, e);
  CHECK(std::abs(mc.value - integrate(g, q)) < 3 * mc.standard_error);

  // B = I reduces to the single average
  CHECK(average_product(s3, I, f) == doctest::Approx(average_observable(s3, f)).epsilon(1e-12));
  CHECK(average_product(s3, I, e) == doctest::Approx(average_observable(s3, e)).epsilon(1e-12));
}

TEST_CASE("second moments carry information beyond the first") {
  const PhaseGrid g = PhaseGrid::square(8.0, 160);
  const OperatorField s3 = OperatorField::constant({0, 0, 0, 1});
  // pure conditional at angle R: ⟨σ3⊗σ3⟩ = ∫F_C cos²R = (1 + e^{-2})/2
  const MomentField pure = mixture_moment_field(expression_density("exp(-(R^2+P^2)/2)/(2*pi)", "1", "R"), g, 2);
  CHECK(average_product(s3, s3, pure) == doctest::Approx(0.5 * (1 + std::exp(-2.0))).epsilon(1e-9));

  // same first moment F_C·I/2, different second moments
  const MomentField along_z = mixture_moment_field(expression_density("exp(-(R^2+P^2)/2)/(2*pi)", "0.5", "0"), g, 2);
  const MomentField along_x = mixture_moment_field(uniform_conditional(), g, 2);
  CHECK(average_observable(s3, along_z) == doctest::Approx(average_observable(s3, along_x)));
  CHECK(std::abs(average_product(s3, s3, along_z) - average_product(s3, s3, along_x)) > 0.9);
}

TEST_CASE("factorization") {
  const PhaseGrid g = PhaseGrid::square(12.0, 64);
  const MomentField u = mixture_moment_field(uniform_conditional(), g, 1);
  const Factorization fu = factorize(u);
  std::size_t flagged = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!fu.defined[k]) {
      ++flagged;
      CHECK(u.F[k] < kUndefinedConditional);
      continue;
    }
    CHECK(max_abs_diff(fu.conditional[k], PauliVector(0.5, 0, 0, 0)) < 1e-12);
  }
  CHECK(flagged > 0);

  // example density: conditional eigenvalues {λ, 1 − λ}
  const auto d = paper_initial_density();
  const PhaseGrid h = PhaseGrid::square(3.0, 16);
  const Factorization fp = factorize(mixture_moment_field(d, h, 1));
  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto x = h.node(k);
    const double lam = 2 / std::numbers::pi * std::atan(x.R * x.R + x.P * x.P);
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(from_pauli(fp.conditional[k]));
    CHECK(es.eigenvalues()[0] == doctest::Approx(std::min(lam, 1 - lam)).epsilon(1e-12));
    CHECK(es.eigenvalues()[1] == doctest::Approx(std::max(lam, 1 - lam)).epsilon(1e-12));
  }
}

TEST_CASE("hybrid entropy") {
  auto run = [](std::size_t n) {
    const PhaseGrid g = PhaseGrid::square(9.0, n);
    return hybrid_entropy(mixture_moment_field(uniform_conditional(), g, 1), 1);
  };
  const HybridEntropy s = run(180);
  const double classical = 1 + std::log(2 * std::numbers::pi);
  CHECK(s.classical == doctest::Approx(classical).epsilon(1e-6));
  CHECK(s.quantum == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  CHECK(s.total == doctest::Approx(classical + std::log(2.0)).epsilon(1e-6));
  CHECK(std::abs(run(360).total - s.total) <= 1e-4);

  const PhaseGrid g = PhaseGrid::square(9.0, 90);
  const HybridEntropy pure = hybrid_entropy(mixture_moment_field(transport_scenario({0, 0}).density, g, 1), 1);
  CHECK(std::abs(pure.quantum) < 1e-12);
  CHECK(pure.total == pure.classical);

  MomentField bad = mixture_moment_field(uniform_conditional(), g, 1);
  bad.first[g.index(45, 45)][3] = bad.F[g.index(45, 45)];  // eigenvalue −F/2
  CHECK_THROWS_WITH_AS(hybrid_entropy(bad, 1), doctest::Contains("node"), InvalidArgument);
}

TEST_CASE("ensemble CSV") {
  const Ensemble e = sample_initial(paper_initial_density(), 3, 1);
  std::ostringstream os;
  write_ensemble_csv(os, e);
  CHECK(os.str().rfind("w,R,P,nx,ny,nz\n", 0) == 0);
}
