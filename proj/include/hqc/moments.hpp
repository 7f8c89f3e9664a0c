#pragma once

// Quantum moment fields on a phase-space grid: F_C(ξ), ρ̂(ξ), ρ̂^⊗2(ξ) and,
// for the k = 2 hierarchy level only, ρ̂^⊗3(ξ).

#include <array>
#include <iosfwd>
#include <vector>

#include "hqc/grid.hpp"
#include "hqc/pauli.hpp"
#include "hqc/scenario.hpp"

namespace hqc {

// Full 4×4×4 coefficient tensor D_abc of Σ D_abc σa⊗σb⊗σc, flat index
// 16a + 4b + c. Only fully symmetric tensors are produced.
using ThreeBody = std::array<double, 64>;
inline constexpr std::size_t three_index(std::size_t a, std::size_t b, std::size_t c) {
  return 16 * a + 4 * b + c;
}

// Conditional states ρ̂_ξ = ρ̂(ξ)/F_C(ξ) are undefined below this marginal.
inline constexpr double kUndefinedConditional = 1e-12;

struct MomentField {
  PhaseGrid grid;
  int order = 0;                          // highest moment carried (0..3)
  std::vector<double> F;                  // F_C = Tr ρ̂ at each node
  std::vector<PauliVector> first;         // order >= 1
  std::vector<SymmetricTwoBody> second;   // order >= 2
  std::vector<ThreeBody> third;           // order >= 3

  explicit MomentField(const PhaseGrid& g, int k = 0);
};

// Exact moments of a delta mixture, F_C Σ_k λ_k π_k^⊗m, at every node.
MomentField mixture_moment_field(const ConditionalMixtureField& density, const PhaseGrid& grid,
                                 int order);

// Σ_k λ_k π_k^⊗3 at one point, scaled by F_C.
ThreeBody mixture_third_moment(const ConditionalMixtureField& density, const ClassicalPoint& xi);

// Symmetric third moment of a single pure state with Pauli coordinates p.
ThreeBody cube(const PauliVector& p);

// Tr_1 of a three-body tensor: coefficients 2 D_0bc.
SymmetricTwoBody partial_trace_first(const ThreeBody& d);

// Columns R,P,F_C,mu1,mu2,mu3 and, when order >= 2, mu00,mu01,...,mu33.
void write_moment_field_csv(std::ostream& os, const MomentField& f);

}  // namespace hqc
