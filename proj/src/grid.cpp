#include "hqc/grid.hpp"

#include <cmath>
#include <sstream>

#include "hqc/errors.hpp"
#include "hqc/parallel.hpp"

namespace hqc {

PhaseGrid::PhaseGrid(double R_min, double R_max, double P_min, double P_max, std::size_t nR,
                     std::size_t nP)
    : R_min_(R_min), R_max_(R_max), P_min_(P_min), P_max_(P_max), nR_(nR), nP_(nP) {
  if (nR < 8 || nP < 8) {
    std::ostringstream os;
    os << "grid needs at least 8 nodes per axis (got nR = " << nR << ", nP = " << nP << ")";
    throw InvalidArgument(os.str());
  }
  if (!(std::isfinite(R_min) && std::isfinite(R_max) && R_max > R_min)) {
    throw InvalidArgument("grid R extent must satisfy R_min < R_max");
  }
  if (!(std::isfinite(P_min) && std::isfinite(P_max) && P_max > P_min)) {
    throw InvalidArgument("grid P extent must satisfy P_min < P_max");
  }
  dR_ = (R_max - R_min) / static_cast<double>(nR);
  dP_ = (P_max - P_min) / static_cast<double>(nP);
}

namespace {

// Derivative along one axis of a line of n values with the given stride.
void diff_line(const double* f, double* out, std::size_t n, std::size_t stride, double h, Stencil s) {
  auto at = [&](std::ptrdiff_t i) -> double {
    if (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) return 0.0;
    return f[static_cast<std::size_t>(i) * stride];
  };
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(n);
  const double inv2 = 1.0 / (2.0 * h);
  const double inv12 = 1.0 / (12.0 * h);
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    double d = 0.0;
    switch (s) {
      case Stencil::kCentral2:
        d = (at(i + 1) - at(i - 1)) * inv2;
        break;
      case Stencil::kCentral4:
        d = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) * inv12;
        break;
      case Stencil::kCentral4OneSided:
        if (i == 0) {
          d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2;
        } else if (i == m - 1) {
          d = (3.0 * at(m - 1) - 4.0 * at(m - 2) + at(m - 3)) * inv2;
        } else if (i == 1 || i == m - 2) {
          d = (at(i + 1) - at(i - 1)) * inv2;
        } else {
          d = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) * inv12;
        }
        break;
    }
    out[static_cast<std::size_t>(i) * stride] = d;
  }
}

void check_sizes(const PhaseGrid& g, std::span<const double> f, std::span<double> out) {
  if (f.size() != g.size() || out.size() != g.size()) {
    throw InvalidArgument("field size does not match the grid");
  }
}

}  // namespace

void derivative_R(const PhaseGrid& g, std::span<const double> f, std::span<double> out, Stencil s) {
  check_sizes(g, f, out);
  parallel_for(g.nP(), [&](std::size_t j) {
    diff_line(f.data() + j, out.data() + j, g.nR(), g.nP(), g.dR(), s);
  });
}

void derivative_P(const PhaseGrid& g, std::span<const double> f, std::span<double> out, Stencil s) {
  check_sizes(g, f, out);
  parallel_for(g.nR(), [&](std::size_t i) {
    diff_line(f.data() + i * g.nP(), out.data() + i * g.nP(), g.nP(), 1, g.dP(), s);
  });
}

double integrate(const PhaseGrid& g, std::span<const double> f) {
  if (f.size() != g.size()) throw InvalidArgument("field size does not match the grid");
  return sum(f) * g.cell_area();
}

std::vector<double> sample(const PhaseGrid& g, const std::function<double(const ClassicalPoint&)>& f) {
  std::vector<double> out(g.size());
  parallel_for(g.size(), [&](std::size_t k) { out[k] = f(g.node(k)); });
  return out;
}

}  // namespace hqc
