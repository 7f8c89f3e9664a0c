#pragma once

// Ehrenfest dynamics of a single hybrid microstate (ξ, ρψ), ħ = 1:
//   Ṙ = ∂_P f_H,  Ṗ = −∂_R f_H,  ṅ = 2 h(ξ) × n,
// with f_H = Tr(ρψ Ĥ(ξ)) = H_0(ξ) + n·h(ξ) and h = (H_1, H_2, H_3).

#include <iosfwd>
#include <string>
#include <vector>

#include "hqc/pauli.hpp"
#include "hqc/scenario.hpp"

namespace hqc {

struct Microstate {
  ClassicalPoint xi;
  Vec3 n{0.0, 0.0, 1.0};  // Bloch vector, |n| = 1 along trajectories
  double t = 0.0;

  Microstate() = default;
  Microstate(ClassicalPoint xi_, const PureBlochState& psi, double t_ = 0.0)
      : xi(xi_), n(psi.n()), t(t_) {}
};

struct Tangent {
  double dR = 0.0;
  double dP = 0.0;
  Vec3 dn{};
};

Tangent microstate_rhs(const Microstate& s, const OperatorField& H);
double hybrid_energy(const Microstate& s, const OperatorField& H);

struct TrajectorySample {
  double t;
  double R;
  double P;
  Vec3 n;
  double f_H;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Microstate final_state;      // last good state
  double max_norm_drift = 0.0;  // max | |n| − 1 | before renormalization
  bool aborted = false;
  std::string message;
};

struct TrajectoryOptions {
  // Record every `stride`-th step (the first and last states are always kept).
  std::size_t stride = 1;
};

// Classic RK4 with the Bloch vector renormalized after every step. A
// non-finite state stops the run; `aborted` is set and `final_state` holds
// the last finite state.
Trajectory integrate_trajectory(const Microstate& s0, const OperatorField& H, double t_end,
                                double dt, const TrajectoryOptions& options = {});

// One RK4 step of size dt followed by renormalization. Returns the
// pre-renormalization norm drift.
double rk4_step(Microstate& s, const OperatorField& H, double dt);

// Advance to t_end without recording. Throws NumericalError on a non-finite
// state. Returns the max pre-renormalization drift.
double advance(Microstate& s, const OperatorField& H, double t_end, double dt);

// Columns t,R,P,nx,ny,nz,f_H.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace hqc
