#include "hqc/scenario.hpp"

#include <cmath>
#include <numbers>

#include "hqc/errors.hpp"
#include "hqc/expression.hpp"

namespace hqc {

OperatorField::OperatorField(Fn eval, Fn d_dR, Fn d_dP)
    : eval_(std::move(eval)),
      dR_(std::move(d_dR)),
      dP_(std::move(d_dP)),
      provenance_(PartialsProvenance::kAnalytic) {}

OperatorField OperatorField::pointwise(Fn eval) {
  OperatorField f;
  f.eval_ = std::move(eval);
  return f;
}

OperatorField OperatorField::constant(const PauliVector& v) {
  auto zero = [](const ClassicalPoint&) { return PauliVector{}; };
  return OperatorField([v](const ClassicalPoint&) { return v; }, zero, zero);
}

PauliVector OperatorField::dR(const ClassicalPoint& xi) const {
  if (!has_partials()) throw InvalidArgument("operator field carries no classical partials");
  return dR_(xi);
}

PauliVector OperatorField::dP(const ClassicalPoint& xi) const {
  if (!has_partials()) throw InvalidArgument("operator field carries no classical partials");
  return dP_(xi);
}

OperatorField operator+(const OperatorField& a, const OperatorField& b) {
  OperatorField out;
  out.eval_ = [ea = a.eval_, eb = b.eval_](const ClassicalPoint& xi) { return ea(xi) + eb(xi); };
  if (a.has_partials() && b.has_partials()) {
    out.dR_ = [fa = a.dR_, fb = b.dR_](const ClassicalPoint& xi) { return fa(xi) + fb(xi); };
    out.dP_ = [fa = a.dP_, fb = b.dP_](const ClassicalPoint& xi) { return fa(xi) + fb(xi); };
    const bool analytic = a.provenance_ == PartialsProvenance::kAnalytic &&
                          b.provenance_ == PartialsProvenance::kAnalytic;
    out.provenance_ = analytic ? PartialsProvenance::kAnalytic : PartialsProvenance::kFiniteDifference;
    out.fd_step_ = std::max(a.fd_step_, b.fd_step_);
  }
  return out;
}

OperatorField finite_difference_partials(const OperatorField& field, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite_difference_partials: step h must be > 0");
  OperatorField out;
  out.eval_ = field.eval_;
  const double inv = 0.5 / h;
  out.dR_ = [f = field.eval_, h, inv](const ClassicalPoint& xi) {
    return (f({xi.R + h, xi.P}) - f({xi.R - h, xi.P})) * inv;
  };
  out.dP_ = [f = field.eval_, h, inv](const ClassicalPoint& xi) {
    return (f({xi.R, xi.P + h}) - f({xi.R, xi.P - h})) * inv;
  };
  out.provenance_ = PartialsProvenance::kFiniteDifference;
  out.fd_step_ = h;
  return out;
}

ConditionalMixtureField::ConditionalMixtureField(MarginalFn marginal, ComponentsFn components,
                                                 std::optional<Sampler> sampler)
    : marginal_(std::move(marginal)),
      components_(std::move(components)),
      sampler_(std::move(sampler)) {}

PauliVector ConditionalMixtureField::first_moment(const ClassicalPoint& xi) const {
  PauliVector acc;
  for (const auto& c : components_(xi)) acc += c.weight * projector_from_bloch(c.state);
  return marginal_(xi) * acc;
}

SymmetricTwoBody ConditionalMixtureField::second_moment(const ClassicalPoint& xi) const {
  SymmetricTwoBody acc;
  for (const auto& c : components_(xi)) {
    const PauliVector p = projector_from_bloch(c.state);
    acc += c.weight * symmetric_product(p, p);
  }
  return marginal_(xi) * acc;
}

PaperLevels paper_levels(const ClassicalPoint& xi) {
  const double R = xi.R;
  const double e1 = 1.0 / (1.0 + R * R);
  return {e1, e1 + 1.0 + 0.1 * R * R, {std::sin(R), 0.0, std::cos(R)}};
}

OperatorField paper_hamiltonian() {
  // With π̂1,2 = (I ± n·σ)/2:
  //   H_0 = ½(R²+P²) + (E1+E2)/2,  (H_1, H_2, H_3) = g(R) n(R),
  //   g = (E1−E2)/2 = −(1 + 0.1R²)/2.
  auto eval = [](const ClassicalPoint& xi) {
    const double R = xi.R;
    const double P = xi.P;
    const double e1 = 1.0 / (1.0 + R * R);
    const double g = -0.5 * (1.0 + 0.1 * R * R);
    return PauliVector{0.5 * (R * R + P * P) + e1 + 0.5 + 0.05 * R * R, g * std::sin(R), 0.0,
                       g * std::cos(R)};
  };
  auto d_dR = [](const ClassicalPoint& xi) {
    const double R = xi.R;
    const double q = 1.0 + R * R;
    const double de1 = -2.0 * R / (q * q);
    const double g = -0.5 * (1.0 + 0.1 * R * R);
    const double dg = -0.1 * R;
    const double s = std::sin(R);
    const double c = std::cos(R);
    return PauliVector{R + de1 + 0.1 * R, dg * s + g * c, 0.0, dg * c - g * s};
  };
  auto d_dP = [](const ClassicalPoint& xi) { return PauliVector{xi.P, 0.0, 0.0, 0.0}; };
  return OperatorField(eval, d_dR, d_dP);
}

OperatorField uncoupled_hamiltonian(double r0) {
  const PauliVector frozen = paper_hamiltonian()({r0, 0.0});
  const double trace_part = frozen[0] - 0.5 * r0 * r0;
  const PauliVector quantum{trace_part, frozen[1], frozen[2], frozen[3]};
  return harmonic_hamiltonian() + OperatorField::constant(quantum);
}

OperatorField harmonic_hamiltonian() {
  return OperatorField(
      [](const ClassicalPoint& xi) { return PauliVector{0.5 * (xi.R * xi.R + xi.P * xi.P), 0, 0, 0}; },
      [](const ClassicalPoint& xi) { return PauliVector{xi.R, 0, 0, 0}; },
      [](const ClassicalPoint& xi) { return PauliVector{xi.P, 0, 0, 0}; });
}

ConditionalMixtureField paper_initial_density() {
  auto marginal = [](const ClassicalPoint& xi) {
    const double r2 = xi.R * xi.R + xi.P * xi.P;
    return std::exp(-0.5 * r2) / (2.0 * std::numbers::pi);
  };
  auto components = [](const ClassicalPoint& xi) {
    const double r2 = xi.R * xi.R + xi.P * xi.P;
    const double a = std::atan(r2);
    const double lambda = 2.0 / std::numbers::pi * a;
    const double s = std::sin(a);
    const double c = std::cos(a);
    return std::vector<MixtureComponent>{{lambda, PureBlochState(s, 0.0, c)},
                                         {1.0 - lambda, PureBlochState(-s, 0.0, -c)}};
  };
  auto sampler = [](std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double R = normal(rng);
    const double P = normal(rng);
    return ClassicalPoint{R, P};
  };
  return ConditionalMixtureField(marginal, components, sampler);
}

ConditionalMixtureField gaussian_pure_density(ClassicalPoint center, double sigma,
                                              const PureBlochState& state) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian_pure_density: sigma must be > 0");
  auto marginal = [center, sigma](const ClassicalPoint& xi) {
    const double dr = xi.R - center.R;
    const double dp = xi.P - center.P;
    return std::exp(-0.5 * (dr * dr + dp * dp) / (sigma * sigma)) /
           (2.0 * std::numbers::pi * sigma * sigma);
  };
  auto components = [state](const ClassicalPoint&) {
    return std::vector<MixtureComponent>{{1.0, state}};
  };
  auto sampler = [center, sigma](std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, sigma);
    const double R = center.R + normal(rng);
    const double P = center.P + normal(rng);
    return ClassicalPoint{R, P};
  };
  return ConditionalMixtureField(marginal, components, sampler);
}

OperatorField expression_hamiltonian(const std::array<std::string, 4>& coordinates, double h) {
  std::array<Expression, 4> ex{Expression::parse(coordinates[0]), Expression::parse(coordinates[1]),
                               Expression::parse(coordinates[2]), Expression::parse(coordinates[3])};
  auto eval = [ex](const ClassicalPoint& xi) {
    return PauliVector{ex[0](xi.R, xi.P), ex[1](xi.R, xi.P), ex[2](xi.R, xi.P), ex[3](xi.R, xi.P)};
  };
  return finite_difference_partials(OperatorField::pointwise(eval), h);
}

ConditionalMixtureField expression_density(const std::string& marginal, const std::string& weight,
                                           const std::string& angle) {
  const Expression f = Expression::parse(marginal);
  const Expression w = Expression::parse(weight);
  const Expression a = Expression::parse(angle);
  auto marginal_fn = [f](const ClassicalPoint& xi) { return f(xi.R, xi.P); };
  auto components = [w, a](const ClassicalPoint& xi) {
    const double lambda = w(xi.R, xi.P);
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw InvalidArgument("mixture weight outside [0, 1] at (" + std::to_string(xi.R) + ", " +
                            std::to_string(xi.P) + ")");
    }
    const double ang = a(xi.R, xi.P);
    const double s = std::sin(ang);
    const double c = std::cos(ang);
    return std::vector<MixtureComponent>{{lambda, PureBlochState(s, 0.0, c)},
                                         {1.0 - lambda, PureBlochState(-s, 0.0, -c)}};
  };
  return ConditionalMixtureField(marginal_fn, components);
}

Scenario paper_scenario() { return {"paper_example", paper_hamiltonian(), paper_initial_density()}; }

Scenario uncoupled_scenario(double r0) {
  return {"uncoupled", uncoupled_hamiltonian(r0), paper_initial_density()};
}

Scenario transport_scenario(ClassicalPoint center, double sigma) {
  return {"transport", harmonic_hamiltonian(),
          gaussian_pure_density(center, sigma, PureBlochState(0.0, 0.0, 1.0))};
}

}  // namespace hqc
