#pragma once

// Grid integration of the MaxEnt-closed first-moment equation and the
// comparison against a propagated Monte Carlo ensemble.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hqc/ensemble.hpp"
#include "hqc/hierarchy.hpp"
#include "hqc/maxent.hpp"

namespace hqc {

// {0, 0.01, 0.05, 0.1, 0.25, 0.5, 1} · t_end
std::vector<double> default_sample_times(double t_end);

struct EvolutionOptions {
  double t_end = 1.0;
  double dt = 1e-3;
  ClosureSpec closure;
  // 2nd-order centred differences with zero ghosts, flux form.
  Discretization disc{Stencil::kCentral2, BracketForm::kConservative};
  std::vector<double> sample_times;  // absolute times; empty selects the default schedule
  bool purity_projection = false;    // rescale over-pure conditional states after each step
};

struct Snapshot {
  double t;
  MomentField field;
  double probability;          // ∫ F_C dξ
  double positivity_fraction;  // share of defined nodes with conditional purity > 1/2 + 1e-8
};

struct EvolutionResult {
  std::vector<Snapshot> snapshots;
  std::size_t steps = 0;
  double max_probability_drift = 0.0;
  double max_positivity_fraction = 0.0;
  double cfl_limit = 0.0;  // spacing / (4 max speed)
  bool aborted = false;
  std::string message;
  std::vector<std::string> warnings;
};

// RK4 on the four coordinate fields. F_C is carried as 2 μ_0. A non-finite
// value stops the run; the last finite state is the final snapshot.
EvolutionResult evolve_effective(const MomentField& initial, const OperatorField& H,
                                 const EvolutionOptions& options = {});

// Columns t,R,P,F_C,mu1,mu2,mu3 for every snapshot.
void write_snapshots_csv(std::ostream& os, const EvolutionResult& r);

struct NamedObservable {
  std::string name;
  OperatorField A;
};
// σ1, σ3, R·I, P·I and Ĥ.
std::vector<NamedObservable> standard_observables(const OperatorField& H);

struct FieldError {
  double l2 = 0.0;
  double linf = 0.0;
};

struct ObservableComparison {
  std::string name;
  double effective;
  double ensemble;
  double ensemble_se;
  double error;  // |effective − ensemble|
};

struct ComparisonSample {
  double t;
  FieldError F;
  std::array<FieldError, 3> mu;
  std::vector<ObservableComparison> observables;
  // L2 norm of effective RHS(closure of the MC first moment) minus
  // first_moment_rhs(MC first, MC second): the closure error alone.
  double closure_control_l2;
  double probability;
  double positivity_fraction;
};

struct CompareOptions {
  EvolutionOptions evolution;
  double bandwidth = 0.0;  // <= 0: Silverman's rule at t = 0, kept fixed
  std::vector<NamedObservable> observables;  // empty: standard_observables(H)
};

struct ComparisonReport {
  std::string scenario;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  double bandwidth = 0.0;
  double t_end = 0.0;
  double dt = 0.0;
  std::vector<ComparisonSample> samples;
  std::vector<std::string> warnings;
  bool aborted = false;
};

ComparisonReport compare_to_ensemble(const Scenario& scenario, const PhaseGrid& grid, std::size_t N,
                                     double t_end, double dt, std::uint64_t seed,
                                     const CompareOptions& options = {});

// One row per (time, quantity).
void write_comparison_csv(std::ostream& os, const ComparisonReport& r);
std::string comparison_json(const ComparisonReport& r);

}  // namespace hqc
