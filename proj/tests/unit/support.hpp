#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "hqc/pauli.hpp"

namespace testing {

using namespace hqc;

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (;;) {
    Vec3 v{g(rng), g(rng), g(rng)};
    const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (r > 1e-6) return {v[0] / r, v[1] / r, v[2] / r};
  }
}

// Density matrix coordinates with Bloch radius drawn uniformly in [0, rmax].
inline PauliVector random_state(std::mt19937_64& rng, double rmax = 1.0) {
  std::uniform_real_distribution<double> u(0.0, rmax);
  const Vec3 n = random_unit(rng);
  const double r = u(rng);
  return {0.5, 0.5 * r * n[0], 0.5 * r * n[1], 0.5 * r * n[2]};
}

inline PauliVector random_hermitian(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng), g(rng), g(rng)};
}

inline double max_abs_diff(const PauliVector& a, const PauliVector& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < 4; ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

inline double max_abs_diff(const SymmetricTwoBody& a, const SymmetricTwoBody& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < 10; ++j) m = std::max(m, std::abs(a.c[j] - b.c[j]));
  return m;
}

}  // namespace testing
