#pragma once

// MaxEnt closure of the first-moment level: given a conditional state ρ̂_ξ,
// choose the second moment ρ̂^⊗2_ξ of maximal entropy compatible with it.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "hqc/hierarchy.hpp"
#include "hqc/moments.hpp"
#include "hqc/pauli.hpp"

namespace hqc {

// Signed constraint residuals. Equalities are zero when satisfied;
// inequalities are written as slacks that are >= 0 when satisfied.
struct ConstraintReport {
  std::array<double, 3> trace_back{};     // 2 μ_0j − μ_j
  double norm_first = 0.0;                // μ_0 − 1/2
  double norm_second = 0.0;               // μ_00 − 1/4
  double purity_first = 0.0;              // 1/2 − Σ_{j=0..3} μ_j²
  double purity_second_printed = 0.0;     // 3/8 − (Σ_k μ_0k² + Σ_{i≤j} μ_ij²)
  double purity_second_exact = 0.0;       // 1/4 − Σ_ab μ_ab²  (Tr T² ≤ 1)
  std::array<double, 3> variance{};       // μ_jj − μ_j²
  double diagonal_sum = 0.0;              // Σ_{j=1..3} μ_jj − 1/4 (enforced)
  double diagonal_sum_printed = 0.0;      // Σ_{j=1..3} μ_jj − 1/2 (reported only)
  std::array<double, 3> cauchy_schwarz{}; // √(var_i var_j) − |μ_ij − μ_i μ_j|, pairs 12 13 23
  double psd_min_eigenvalue = 0.0;        // smallest eigenvalue of the 4×4 matrix

  // Largest |equality residual| (the printed diagonal sum is excluded).
  double max_equality_violation() const;
  // Smallest inequality slack, the printed two-body bound included.
  double min_inequality_slack() const;
  bool feasible(double tol) const;
};

ConstraintReport check_constraints(const PauliVector& first, const SymmetricTwoBody& second);

enum class ClosureMethod { kClosedForm, kNumeric };

enum class ClosedFormVariant {
  // μ_jk = μ_j μ_k + δ_jk (1/3)(1/2 − 𝒫): covariance isotropic, so the
  // two-body matrix is ρ⊗ρ + v(2 SWAP − I). Default.
  kIsotropic,
  // μ_jk = 0 for j ≠ k read literally. Not positive semidefinite for states
  // off the coordinate axes; kept for comparison.
  kLiteral,
};

inline constexpr int kExactEntropy = 0;

struct ClosureResult {
  SymmetricTwoBody second;
  double entropy_value = 0.0;  // linear entropy 1 − Tr T² (closed form) or the optimized functional
  ClosureMethod method = ClosureMethod::kClosedForm;
  int entropy_order = 1;  // kExactEntropy for the von Neumann entropy
  ConstraintReport residuals;
  bool converged = true;
  int iterations = 0;
  double gradient_norm = 0.0;
};

// Rejects μ_0 ≠ 1/2 and purity > 1/2 (tolerance 1e-10).
ClosureResult closure_closed_form(const PauliVector& first,
                                  ClosedFormVariant variant = ClosedFormVariant::kIsotropic);

struct NumericClosureOptions {
  int entropy_order = 1;  // Mercator order, or kExactEntropy
  double tol = 1e-8;
  int max_iterations = 10000;
};

// Projected gradient ascent over the covariance S = (μ_jk − μ_j μ_k) on the
// set {S ⪰ 0, tr S = 1/4 − |μ|²}, started from the closed form, with step
// halving until the objective increases and the 4×4 matrix stays PSD.
ClosureResult closure_numeric(const PauliVector& first, const NumericClosureOptions& options = {});

// Entropy functional of the two-body operator: Mercator truncation of the
// given order, or von Neumann for kExactEntropy.
double two_body_entropy(const SymmetricTwoBody& T, int entropy_order);

// Maximizer of the linear entropy 1 − Tr T² over the same feasible set, in
// closed form: variance max(0, (t − 2|μ|²)/3) along μ and the rest of
// t = 1/4 − |μ|² split evenly across the two perpendicular axes.
SymmetricTwoBody linear_entropy_optimum(const PauliVector& first);

struct ClosureSpec {
  ClosureMethod method = ClosureMethod::kClosedForm;
  ClosedFormVariant variant = ClosedFormVariant::kIsotropic;
  NumericClosureOptions numeric;
};

struct EffectiveDiagnostics {
  std::size_t undefined_nodes = 0;     // F_C below threshold, RHS set to zero
  std::size_t overpure_nodes = 0;      // conditional purity > 1/2 + 1e-8, closed at the radial projection
  std::size_t unconverged_nodes = 0;   // numeric closure did not converge
};

// Second-moment field built by closing each node's conditional state and
// rescaling by F_C. C_00 and C_0k come straight from the first moment so that
// the partial trace is exact.
MomentField closed_second_moment(const MomentField& first, const ClosureSpec& closure,
                                 EffectiveDiagnostics* diag = nullptr);

// First-moment RHS with the MaxEnt second moment in place of the true one.
// Nodes with F_C below the threshold get zero RHS.
HierarchyRHS effective_first_moment_rhs(const MomentField& first, const HamiltonianOnGrid& h,
                                        const ClosureSpec& closure, const Discretization& disc,
                                        EffectiveDiagnostics* diag = nullptr);
HierarchyRHS effective_first_moment_rhs(const MomentField& first, const OperatorField& H,
                                        const ClosureSpec& closure = {}, const Discretization& disc = {},
                                        EffectiveDiagnostics* diag = nullptr);

// Columns mu0..mu3, mu00..mu33, entropy, method, order, converged, followed
// by every constraint residual.
void write_closure_report_csv(std::ostream& os, const std::vector<PauliVector>& inputs,
                              const std::vector<ClosureResult>& results);

std::string to_string(ClosureMethod m);

}  // namespace hqc
