#pragma once

// The exact moment hierarchy on a phase-space grid. In Pauli coordinates,
// with C_ab the second-moment coefficients and D_abc the third,
//
//   dμ_d  = [Ĥ, ρ̂]_d + 2 Σ_a {H_a, C_ad}_C
//   dC_bc = (K C + C Kᵀ)_bc + 2 Σ_a {H_a, D_abc}_C,   K_ja = [Ĥ, σ_a]_j
//   dF_C  = 2 dμ_0 = 2 Σ_a {H_a, μ_a}_C
//
// where {f, g}_C = ∂_R f ∂_P g − ∂_P f ∂_R g and [·,·] uses the −i convention.

#include <functional>
#include <vector>

#include "hqc/grid.hpp"
#include "hqc/moments.hpp"
#include "hqc/scenario.hpp"

namespace hqc {

enum class BracketForm {
  kAdvective,     // ∂_R H ∂_P f − ∂_P H ∂_R f with H partials taken analytically
  kConservative,  // ∂_P(f ∂_R H) − ∂_R(f ∂_P H); grid sums telescope exactly
};

struct Discretization {
  Stencil stencil = Stencil::kCentral4OneSided;
  BracketForm form = BracketForm::kAdvective;
};

// Hamiltonian coordinates and classical partials sampled at the grid nodes.
struct HamiltonianOnGrid {
  std::vector<PauliVector> H, dR, dP;
};
HamiltonianOnGrid sample_hamiltonian(const OperatorField& H, const PhaseGrid& grid);

// out[k] = Σ_a {H_a, X_a}_C at every node, X given as four node fields.
void bracket_sum(const PhaseGrid& grid, const HamiltonianOnGrid& h,
                 const std::array<std::vector<double>, 4>& X, std::vector<double>& out,
                 const Discretization& disc);

struct HierarchyRHS {
  PhaseGrid grid;
  std::vector<double> dF;
  std::vector<PauliVector> drho;
  std::vector<SymmetricTwoBody> drho2;  // k = 2 only

  explicit HierarchyRHS(const PhaseGrid& g) : grid(g), dF(g.size(), 0.0), drho(g.size()) {}
};

// Uses first.first and second.second. Rejects grid mismatches and second
// moments whose partial trace differs from the first moment by more than
// 1e-8 max F_C.
HierarchyRHS first_moment_rhs(const MomentField& first, const MomentField& second, const OperatorField& H,
                              const Discretization& disc = {});
HierarchyRHS first_moment_rhs(const MomentField& first, const MomentField& second,
                              const HamiltonianOnGrid& h, const Discretization& disc = {});

// k = 1: same as first_moment_rhs(f, f, H). k = 2: needs f.order >= 3 and
// fills drho2 (drho and dF are the traced k = 1 quantities).
HierarchyRHS kth_moment_rhs(int k, const MomentField& f, const OperatorField& H,
                            const Discretization& disc = {});

// Coordinates of the two-body commutator [Ĥ⊗I + I⊗Ĥ, T].
SymmetricTwoBody two_body_commutator(const PauliVector& H, const SymmetricTwoBody& T);

struct MarginalRHS {
  std::vector<double> dF;      // Tr {Ĥ, ρ̂}_C per node
  PauliVector drho_marginal;   // ∫ [Ĥ, ρ̂(ξ)] dξ
};
MarginalRHS marginal_rhs(const MomentField& first, const OperatorField& H, const Discretization& disc = {});

struct AverageRate {
  double value;        // ∫ Tr(ρ̇̂(ξ) Â(ξ)) dξ with ρ̇̂ from first_moment_rhs
  double moment_form;  // ∫ Tr(ρ̂ [Â, Ĥ]) + 4 Σ_ab C_ab {A_a, H_b}_C
  double scale;        // ∫ |Tr(ρ̇̂ Â)| dξ, for relative tolerances
};
// Â without partials gets centred-difference partials (h = 1e-4).
AverageRate average_rate(const OperatorField& A, const MomentField& first, const MomentField& second,
                         const OperatorField& H, const Discretization& disc = {});
AverageRate average_rate(const OperatorField& A, const HierarchyRHS& rhs, const MomentField& first,
                         const MomentField& second, const OperatorField& H);

// Pointwise first-moment RHS with the second moment given as a function of ξ
// and its partials taken by 5-point centred differences with step h.
PauliVector first_moment_rhs_at(const ClassicalPoint& xi, const PauliVector& first,
                                const std::function<SymmetricTwoBody(const ClassicalPoint&)>& second,
                                const OperatorField& H, double h = 1e-3);

struct ThetaDecomposition {
  double w1;
  Vec3 n1;
  double w2;
  Vec3 n2;
};
// Splits a strictly mixed conditional state r into projectors along
// n1 = (sin θ, 0, cos θ) and the second intersection n2 of the ray n1 → r
// with the Bloch sphere.
ThetaDecomposition theta_decomposition(const PauliVector& rho_cond, double theta);

// Second moment of the θ-family F^θ at ξ: F_C (w1 π1⊗π1 + w2 π2⊗π2), or
// F_C π⊗π where the conditional state is pure.
SymmetricTwoBody theta_second_moment(const ConditionalMixtureField& density, const ClassicalPoint& xi,
                                     double theta);

struct Fig1Options {
  double R_min = -3.0, R_max = 3.0;
  std::size_t nR = 121;
  double theta_min = 0.0, theta_max = 3.14159265358979323846;
  std::size_t ntheta = 121;
  double P_fixed = 0.0;
  double h = 1e-3;  // difference step for the classical bracket
};

struct Fig1Row {
  double R, theta, dmu1, dmu3;
  double first_deviation;  // max |ρ̂^θ(ξ) − ρ̂(ξ)| over the coordinates
  double noise;            // step-halving difference plus round-off estimate
};

std::vector<Fig1Row> fig1_scan(const ConditionalMixtureField& density, const OperatorField& H,
                               const Fig1Options& options = {});

}  // namespace hqc
