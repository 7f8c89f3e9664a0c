#pragma once

// Classically parametrized Hamiltonians Ĥ(R, P) and initial hybrid densities.

#include <array>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hqc/pauli.hpp"

namespace hqc {

struct ClassicalPoint {
  double R = 0.0;
  double P = 0.0;
};

enum class PartialsProvenance { kNone, kAnalytic, kFiniteDifference };

// A Hermitian operator field ξ ↦ Â(ξ) in Pauli coordinates, with optional
// classical partials. The σ0 coordinate carries the classical energy H_C(ξ)
// together with the trace part of the quantum operator.
class OperatorField {
 public:
  using Fn = std::function<PauliVector(const ClassicalPoint&)>;

  // Field with analytic partials.
  OperatorField(Fn eval, Fn d_dR, Fn d_dP);
  // Field with pointwise evaluation only; see finite_difference_partials.
  static OperatorField pointwise(Fn eval);
  // ξ-independent operator.
  static OperatorField constant(const PauliVector& v);

  PauliVector operator()(const ClassicalPoint& xi) const { return eval_(xi); }
  PauliVector dR(const ClassicalPoint& xi) const;
  PauliVector dP(const ClassicalPoint& xi) const;

  bool has_partials() const { return provenance_ != PartialsProvenance::kNone; }
  PartialsProvenance provenance() const { return provenance_; }
  // Step used for finite-difference partials (0 when analytic).
  double fd_step() const { return fd_step_; }

  // Sum of two fields; partials are summed when both sides carry them.
  friend OperatorField operator+(const OperatorField& a, const OperatorField& b);

 private:
  OperatorField() = default;
  friend OperatorField finite_difference_partials(const OperatorField& field, double h);

  Fn eval_;
  Fn dR_;
  Fn dP_;
  PartialsProvenance provenance_ = PartialsProvenance::kNone;
  double fd_step_ = 0.0;
};

inline constexpr double kDefaultFiniteDifferenceStep = 1e-4;

// Centered differences of every Pauli coordinate with step h; O(h²) error.
OperatorField finite_difference_partials(const OperatorField& field, double h);

struct MixtureComponent {
  double weight;
  PureBlochState state;
};

// F_QC(ξ, ρψ) = F_C(ξ) Σ_k λ_k(ξ) δ(ρψ − π_k(ξ)).
class ConditionalMixtureField {
 public:
  using MarginalFn = std::function<double(const ClassicalPoint&)>;
  using ComponentsFn = std::function<std::vector<MixtureComponent>(const ClassicalPoint&)>;
  using Sampler = std::function<ClassicalPoint(std::mt19937_64&)>;

  ConditionalMixtureField(MarginalFn marginal, ComponentsFn components,
                          std::optional<Sampler> sampler = std::nullopt);

  double marginal(const ClassicalPoint& xi) const { return marginal_(xi); }
  std::vector<MixtureComponent> components(const ClassicalPoint& xi) const {
    return components_(xi);
  }
  // Exact sampler of F_C when the density has one; otherwise ensembles fall
  // back to rejection sampling on a bounding box.
  const std::optional<Sampler>& sampler() const { return sampler_; }

  // ρ̂(ξ) = F_C(ξ) Σ_k λ_k π_k(ξ).
  PauliVector first_moment(const ClassicalPoint& xi) const;
  // ρ̂^⊗2(ξ) = F_C(ξ) Σ_k λ_k π_k(ξ) ⊗ π_k(ξ), in closed form.
  SymmetricTwoBody second_moment(const ClassicalPoint& xi) const;

 private:
  MarginalFn marginal_;
  ComponentsFn components_;
  std::optional<Sampler> sampler_;
};

// Ĥ(R,P) = ½(R²+P²) I + E1 π̂1 + E2 π̂2, E1 = 1/(1+R²), E2 = E1 + 1 + 0.1 R²,
// π̂1 = (sin R, 0, cos R) and π̂2 = −π̂1 in Bloch coordinates. Analytic partials.
OperatorField paper_hamiltonian();

// Eigen-energies and upper-level projector direction used by paper_hamiltonian.
struct PaperLevels {
  double e1;
  double e2;
  Vec3 n1;  // Bloch vector of π̂1
};
PaperLevels paper_levels(const ClassicalPoint& xi);

// Same classical part as paper_hamiltonian, quantum part frozen at R = r0.
OperatorField uncoupled_hamiltonian(double r0 = 1.0);

// ½(R²+P²) I.
OperatorField harmonic_hamiltonian();

// λ(R,P) = (2/π) atan(R²+P²), F_C = exp(−(R²+P²)/2)/(2π), projectors at Bloch
// angle a = atan(R²+P²) in the x-z plane (weight λ) and its antipode (1−λ).
ConditionalMixtureField paper_initial_density();

// Gaussian marginal centred at `center` with width `sigma`, conditional state
// fixed to one pure state.
ConditionalMixtureField gaussian_pure_density(ClassicalPoint center, double sigma,
                                              const PureBlochState& state);

// Hamiltonian given by expressions for H_0..H_3 in R, P. Partials by centered
// differences with step h.
OperatorField expression_hamiltonian(const std::array<std::string, 4>& coordinates,
                                     double h = kDefaultFiniteDifferenceStep);

// Density given by expressions for F_C, λ and the Bloch angle a (projector
// (sin a, 0, cos a) with weight λ, antipode with weight 1−λ). No exact sampler.
ConditionalMixtureField expression_density(const std::string& marginal, const std::string& weight,
                                           const std::string& angle);

// A Hamiltonian together with the initial hybrid density it is run from.
struct Scenario {
  std::string name;
  OperatorField H;
  ConditionalMixtureField density;
};

// paper_hamiltonian + paper_initial_density.
Scenario paper_scenario();
// uncoupled_hamiltonian(r0) + paper_initial_density.
Scenario uncoupled_scenario(double r0 = 1.0);
// Harmonic H_0 with zero quantum part; Gaussian at `center`, width `sigma`,
// conditional state fixed at the north pole.
Scenario transport_scenario(ClassicalPoint center = {1.0, 0.0}, double sigma = 1.0);

}  // namespace hqc
