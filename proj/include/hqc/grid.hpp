#pragma once

// Cell-centred rectangular grid on the classical phase space and the finite
// difference operators used by the hierarchy and the grid evolution.

#include <cstddef>
#include <span>
#include <vector>

#include "hqc/scenario.hpp"

namespace hqc {

class PhaseGrid {
 public:
  // Rejects nR, nP < 8 and empty or non-finite extents.
  PhaseGrid(double R_min, double R_max, double P_min, double P_max, std::size_t nR, std::size_t nP);
  static PhaseGrid square(double half_width, std::size_t n) {
    return PhaseGrid(-half_width, half_width, -half_width, half_width, n, n);
  }

  double R_min() const { return R_min_; }
  double R_max() const { return R_max_; }
  double P_min() const { return P_min_; }
  double P_max() const { return P_max_; }
  std::size_t nR() const { return nR_; }
  std::size_t nP() const { return nP_; }
  std::size_t size() const { return nR_ * nP_; }
  double dR() const { return dR_; }
  double dP() const { return dP_; }
  double cell_area() const { return dR_ * dP_; }

  double R(std::size_t i) const { return R_min_ + (static_cast<double>(i) + 0.5) * dR_; }
  double P(std::size_t j) const { return P_min_ + (static_cast<double>(j) + 0.5) * dP_; }
  // Nodes are stored R-major: index = i * nP + j.
  std::size_t index(std::size_t i, std::size_t j) const { return i * nP_ + j; }
  ClassicalPoint node(std::size_t k) const { return {R(k / nP_), P(k % nP_)}; }

  friend bool operator==(const PhaseGrid&, const PhaseGrid&) = default;

 private:
  double R_min_, R_max_, P_min_, P_max_;
  std::size_t nR_, nP_;
  double dR_, dP_;
};

enum class Stencil {
  kCentral2,           // (f[i+1] − f[i−1]) / 2h, zero outside the domain
  kCentral4,           // 5-point centred, zero outside the domain
  kCentral4OneSided,   // 5-point centred inside, 2nd-order one-sided at the edges
};

// ∂f/∂R and ∂f/∂P of a node field.
void derivative_R(const PhaseGrid& g, std::span<const double> f, std::span<double> out, Stencil s);
void derivative_P(const PhaseGrid& g, std::span<const double> f, std::span<double> out, Stencil s);

// Midpoint quadrature Σ f ΔR ΔP.
double integrate(const PhaseGrid& g, std::span<const double> f);

// Values of a function at the grid nodes.
std::vector<double> sample(const PhaseGrid& g, const std::function<double(const ClassicalPoint&)>& f);

}  // namespace hqc
