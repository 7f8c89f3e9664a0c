#pragma once

// Monte Carlo representation of a hybrid density: weighted microstates,
// propagation along Ehrenfest characteristics, kernel estimates of the
// moment fields, averages, factorization and hybrid entropy.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hqc/ehrenfest.hpp"
#include "hqc/moments.hpp"

namespace hqc {

struct WeightedMicrostate {
  double w;
  Microstate state;
};

struct Ensemble {
  std::vector<WeightedMicrostate> members;
  std::uint64_t rng_seed = 0;
  std::string origin;

  std::size_t size() const { return members.size(); }
};

// Bounding box for rejection sampling when the density has no exact sampler.
struct SamplingBox {
  double R_min = -8.0, R_max = 8.0, P_min = -8.0, P_max = 8.0;
};

// Member i draws from its own mt19937_64 stream seeded by stream_seed(seed, i),
// so the result does not depend on the thread count.
Ensemble sample_initial(const ConditionalMixtureField& density, std::size_t N, std::uint64_t seed,
                        std::string origin = {}, const SamplingBox& box = {});

Ensemble propagate(const Ensemble& e, const OperatorField& H, double t, double dt);

// σ N^{-1/6} with σ the pooled standard deviation of R and P (Silverman's
// rule for a 2D Gaussian kernel).
double silverman_bandwidth(const Ensemble& e);

// Candidate lookup for kernel sums: visits every point within `radius`
// (max norm) of a query, bin by bin, in a fixed order.
class NeighborIndex {
 public:
  NeighborIndex(std::span<const ClassicalPoint> points, double radius);

  template <class Fn>
  void for_each(const ClassicalPoint& q, Fn&& fn) const {
    const long bx = bin_coord(q.R, R0_);
    const long by = bin_coord(q.P, P0_);
    for (long x = std::max(0L, bx - 1); x <= std::min(nx_ - 1, bx + 1); ++x) {
      for (long y = std::max(0L, by - 1); y <= std::min(ny_ - 1, by + 1); ++y) {
        const std::size_t b = static_cast<std::size_t>(x * ny_ + y);
        for (std::size_t k = start_[b]; k < start_[b + 1]; ++k) fn(order_[k]);
      }
    }
  }

 private:
  long bin_coord(double v, double origin) const;

  double width_;
  double R0_, P0_;
  long nx_, ny_;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

// Gaussian kernel exp(−|d|²/2h²)/(2πh²), truncated beyond 8h.
inline constexpr double kKernelCutoff = 8.0;
double kernel(double dR, double dP, double h);

// Per-node standard errors of a kernel estimate.
struct MomentFieldErrors {
  std::vector<double> F;
  std::vector<PauliVector> first;
};

// Node value Σ_i w_i K(ξ − ξ_i) (ρψ_i)^⊗k, k = 0..3. bandwidth <= 0 selects
// Silverman's rule. Trace identities between the orders hold exactly.
MomentField estimate_moment_field(const Ensemble& e, const PhaseGrid& grid, int k,
                                  double bandwidth = 0.0, MomentFieldErrors* errors = nullptr);

struct Estimate {
  double value;
  double standard_error;
};

// Σ w_i Tr(ρψ_i Â(ξ_i)) with its Monte Carlo standard error.
Estimate ensemble_average(const OperatorField& A, const Ensemble& e);

double average_observable(const OperatorField& A, const Ensemble& e);
// ∫ Tr(ρ̂(ξ) Â(ξ)) dξ by midpoint quadrature.
double average_observable(const OperatorField& A, const MomentField& f);

double average_product(const OperatorField& A, const OperatorField& B, const Ensemble& e);
// ∫ Tr(ρ̂^⊗2(ξ) Â⊗B̂) dξ. Rejects fields without a second moment.
double average_product(const OperatorField& A, const OperatorField& B, const MomentField& f);

struct Factorization {
  std::vector<double> F;
  std::vector<PauliVector> conditional;  // ρ̂_ξ = ρ̂(ξ)/F_C(ξ); zero where undefined
  std::vector<bool> defined;             // F_C >= threshold
};
Factorization factorize(const MomentField& f, double threshold = kUndefinedConditional);

struct HybridEntropy {
  double total;      // −∫ Tr(ρ̂^⊗k log ρ̂^⊗k)
  double classical;  // −∫ F_C log F_C
  double quantum;    // ∫ F_C S(ρ̂^⊗k_ξ)
  std::size_t undefined_nodes;
};
// k = 0, 1 or 2. Throws InvalidArgument naming the node if a node operator has
// an eigenvalue below −1e-10 F_C.
HybridEntropy hybrid_entropy(const MomentField& f, int k);

// Columns w,R,P,nx,ny,nz.
void write_ensemble_csv(std::ostream& os, const Ensemble& e);

}  // namespace hqc
