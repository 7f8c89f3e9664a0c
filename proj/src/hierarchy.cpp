#include "hqc/hierarchy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hqc/errors.hpp"
#include "hqc/parallel.hpp"

namespace hqc {

HamiltonianOnGrid sample_hamiltonian(const OperatorField& H, const PhaseGrid& grid) {
  HamiltonianOnGrid h;
  h.H.resize(grid.size());
  h.dR.resize(grid.size());
  h.dP.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const ClassicalPoint xi = grid.node(k);
    h.H[k] = H(xi);
    h.dR[k] = H.dR(xi);
    h.dP[k] = H.dP(xi);
  });
  return h;
}

namespace {

// Which Pauli coordinates of Ĥ have any classical dependence on this grid.
std::array<bool, 4> active_coordinates(const HamiltonianOnGrid& h) {
  std::array<bool, 4> act{};
  for (std::size_t k = 0; k < h.H.size(); ++k)
    for (std::size_t a = 0; a < 4; ++a)
      if (h.dR[k][a] != 0.0 || h.dP[k][a] != 0.0) act[a] = true;
  return act;
}

void require_same_grid(const PhaseGrid& a, const PhaseGrid& b, const char* who) {
  if (!(a == b)) throw InvalidArgument(std::string(who) + ": fields live on different grids");
}

}  // namespace

void bracket_sum(const PhaseGrid& grid, const HamiltonianOnGrid& h,
                 const std::array<std::vector<double>, 4>& X, std::vector<double>& out,
                 const Discretization& disc) {
  const std::size_t n = grid.size();
  out.assign(n, 0.0);
  const std::array<bool, 4> act = active_coordinates(h);
  std::vector<double> a(n), b(n);
  if (disc.form == BracketForm::kAdvective) {
    for (std::size_t c = 0; c < 4; ++c) {
      if (!act[c]) continue;
      derivative_R(grid, X[c], a, disc.stencil);
      derivative_P(grid, X[c], b, disc.stencil);
      for (std::size_t k = 0; k < n; ++k) out[k] += h.dR[k][c] * b[k] - h.dP[k][c] * a[k];
    }
    return;
  }
  std::vector<double> fluxP(n, 0.0), fluxR(n, 0.0);
  for (std::size_t c = 0; c < 4; ++c) {
    if (!act[c]) continue;
    for (std::size_t k = 0; k < n; ++k) {
      fluxP[k] += X[c][k] * h.dR[k][c];
      fluxR[k] += X[c][k] * h.dP[k][c];
    }
  }
  derivative_P(grid, fluxP, b, disc.stencil);
  derivative_R(grid, fluxR, a, disc.stencil);
  for (std::size_t k = 0; k < n; ++k) out[k] = b[k] - a[k];
}

HierarchyRHS first_moment_rhs(const MomentField& first, const MomentField& second, const OperatorField& H,
                              const Discretization& disc) {
  return first_moment_rhs(first, second, sample_hamiltonian(H, first.grid), disc);
}

HierarchyRHS first_moment_rhs(const MomentField& first, const MomentField& second,
                              const HamiltonianOnGrid& h, const Discretization& disc) {
  require_same_grid(first.grid, second.grid, "first_moment_rhs");
  if (first.order < 1) throw InvalidArgument("first_moment_rhs: first field carries no first moment");
  if (second.order < 2) throw InvalidArgument("first_moment_rhs: second field carries no second moment");
  const PhaseGrid& grid = first.grid;
  const std::size_t n = grid.size();
  if (h.H.size() != n) throw InvalidArgument("first_moment_rhs: Hamiltonian sampled on a different grid");

  double fmax = 0.0, mismatch = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    fmax = std::max(fmax, std::abs(first.F[k]));
    const PauliVector tr = partial_trace_first(second.second[k]);
    for (std::size_t a = 0; a < 4; ++a) mismatch = std::max(mismatch, std::abs(tr[a] - first.first[k][a]));
  }
  if (mismatch > 1e-8 * std::max(fmax, 1e-300)) {
    std::ostringstream os;
    os << "first_moment_rhs: Tr_1 of the second moment differs from the first moment by " << mismatch;
    throw InvalidArgument(os.str());
  }

  HierarchyRHS rhs(grid);
  std::array<std::vector<double>, 4> X;
  std::vector<double> br;
  for (std::size_t d = 0; d < 4; ++d) {
    for (std::size_t a = 0; a < 4; ++a) {
      X[a].resize(n);
      for (std::size_t k = 0; k < n; ++k) X[a][k] = second.second[k](a, d);
    }
    bracket_sum(grid, h, X, br, disc);
    for (std::size_t k = 0; k < n; ++k) rhs.drho[k][d] = 2.0 * br[k];
  }
  for (std::size_t k = 0; k < n; ++k) {
    rhs.drho[k] += commutator_coords(h.H[k], first.first[k]);
    rhs.dF[k] = 2.0 * rhs.drho[k][0];
  }
  return rhs;
}

SymmetricTwoBody two_body_commutator(const PauliVector& H, const SymmetricTwoBody& T) {
  const auto& sc = structure_constants();
  double K[4][4] = {};
  for (int j = 1; j < 4; ++j)
    for (int a = 1; a < 4; ++a)
      for (int k = 1; k < 4; ++k) K[j][a] += sc.c[j][k][a] * H[k];
  SymmetricTwoBody out;
  for (std::size_t b = 0; b < 4; ++b) {
    for (std::size_t c = b; c < 4; ++c) {
      double s = 0.0;
      for (std::size_t e = 0; e < 4; ++e) s += K[b][e] * T(e, c) + T(b, e) * K[c][e];
      out(b, c) = s;
    }
  }
  return out;
}

HierarchyRHS kth_moment_rhs(int k, const MomentField& f, const OperatorField& H, const Discretization& disc) {
  if (k == 1) return first_moment_rhs(f, f, H, disc);
  if (k != 2) throw InvalidArgument("kth_moment_rhs: only k = 1 and k = 2 are implemented");
  if (f.order < 3) throw InvalidArgument("kth_moment_rhs: k = 2 needs a third moment field");
  const PhaseGrid& grid = f.grid;
  const std::size_t n = grid.size();
  const HamiltonianOnGrid h = sample_hamiltonian(H, grid);
  for (std::size_t node = 0; node < n; ++node) {
    const SymmetricTwoBody tr = partial_trace_first(f.third[node]);
    for (std::size_t i = 0; i < tr.c.size(); ++i) {
      if (std::abs(tr.c[i] - f.second[node].c[i]) > 1e-8 * std::max(std::abs(f.F[node]), 1e-300) + 1e-300) {
        throw InvalidArgument("kth_moment_rhs: Tr_1 of the third moment differs from the second moment");
      }
    }
  }
  HierarchyRHS rhs = first_moment_rhs(f, f, h, disc);
  rhs.drho2.assign(n, SymmetricTwoBody{});
  std::array<std::vector<double>, 4> X;
  std::vector<double> br;
  for (std::size_t b = 0; b < 4; ++b) {
    for (std::size_t c = b; c < 4; ++c) {
      for (std::size_t a = 0; a < 4; ++a) {
        X[a].resize(n);
        for (std::size_t node = 0; node < n; ++node) X[a][node] = f.third[node][three_index(a, b, c)];
      }
      bracket_sum(grid, h, X, br, disc);
      for (std::size_t node = 0; node < n; ++node) rhs.drho2[node](b, c) = 2.0 * br[node];
    }
  }
  for (std::size_t node = 0; node < n; ++node) {
    rhs.drho2[node] += two_body_commutator(h.H[node], f.second[node]);
  }
  return rhs;
}

MarginalRHS marginal_rhs(const MomentField& first, const OperatorField& H, const Discretization& disc) {
  if (first.order < 1) throw InvalidArgument("marginal_rhs: field carries no first moment");
  const PhaseGrid& grid = first.grid;
  const std::size_t n = grid.size();
  const HamiltonianOnGrid h = sample_hamiltonian(H, grid);
  std::array<std::vector<double>, 4> X;
  for (std::size_t a = 0; a < 4; ++a) {
    X[a].resize(n);
    for (std::size_t k = 0; k < n; ++k) X[a][k] = first.first[k][a];
  }
  MarginalRHS out;
  bracket_sum(grid, h, X, out.dF, disc);
  for (double& v : out.dF) v *= 2.0;
  std::array<std::vector<double>, 4> comm;
  for (auto& c : comm) c.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const PauliVector c = commutator_coords(h.H[k], first.first[k]);
    for (std::size_t a = 0; a < 4; ++a) comm[a][k] = c[a];
  }
  for (std::size_t a = 0; a < 4; ++a) out.drho_marginal[a] = integrate(grid, comm[a]);
  return out;
}

AverageRate average_rate(const OperatorField& A, const MomentField& first, const MomentField& second,
                         const OperatorField& H, const Discretization& disc) {
  return average_rate(A, first_moment_rhs(first, second, H, disc), first, second, H);
}

AverageRate average_rate(const OperatorField& A, const HierarchyRHS& rhs, const MomentField& first,
                         const MomentField& second, const OperatorField& H) {
  require_same_grid(rhs.grid, first.grid, "average_rate");
  require_same_grid(first.grid, second.grid, "average_rate");
  const OperatorField Ad = A.has_partials() ? A : finite_difference_partials(A, kDefaultFiniteDifferenceStep);
  const PhaseGrid& grid = first.grid;
  const std::size_t n = grid.size();
  std::vector<double> route1(n), absval(n), route2(n);
  parallel_for(n, [&](std::size_t k) {
    const ClassicalPoint xi = grid.node(k);
    const PauliVector a = Ad(xi);
    const PauliVector& d = rhs.drho[k];
    double v = 0.0;
    for (std::size_t j = 0; j < 4; ++j) v += 2.0 * a[j] * d[j];
    route1[k] = v;
    absval[k] = std::abs(v);
    const PauliVector h = H(xi), hR = H.dR(xi), hP = H.dP(xi);
    const PauliVector aR = Ad.dR(xi), aP = Ad.dP(xi);
    const PauliVector comm = commutator_coords(a, h);
    double q = 0.0;
    for (std::size_t j = 0; j < 4; ++j) q += 2.0 * first.first[k][j] * comm[j];
    double c = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) c += second.second[k](i, j) * (aR[i] * hP[j] - aP[i] * hR[j]);
    route2[k] = q + 4.0 * c;
  });
  return {integrate(grid, route1), integrate(grid, route2), integrate(grid, absval)};
}

PauliVector first_moment_rhs_at(const ClassicalPoint& xi, const PauliVector& first,
                                const std::function<SymmetricTwoBody(const ClassicalPoint&)>& second,
                                const OperatorField& H, double h) {
  if (!(h > 0.0)) throw InvalidArgument("first_moment_rhs_at: step h must be > 0");
  auto diff = [&](double sR, double sP) {
    auto at = [&](double m) { return second({xi.R + m * sR, xi.P + m * sP}); };
    SymmetricTwoBody d = (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) * (1.0 / (12.0 * h));
    return d;
  };
  const SymmetricTwoBody CR = diff(h, 0.0);
  const SymmetricTwoBody CP = diff(0.0, h);
  const PauliVector hR = H.dR(xi), hP = H.dP(xi);
  PauliVector out = commutator_coords(H(xi), first);
  for (std::size_t d = 0; d < 4; ++d) {
    double s = 0.0;
    for (std::size_t a = 0; a < 4; ++a) s += hR[a] * CP(a, d) - hP[a] * CR(a, d);
    out[d] += 2.0 * s;
  }
  return out;
}

ThetaDecomposition theta_decomposition(const PauliVector& rho_cond, double theta) {
  if (std::abs(rho_cond[0] - 0.5) > 1e-10) {
    throw InvalidArgument("theta_decomposition: input is not a unit-trace state (mu0 != 1/2)");
  }
  const Vec3 r = rho_cond.bloch();
  const double rr = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  if (rr > 1.0 + 1e-10) throw InvalidArgument("theta_decomposition: Bloch vector longer than 1");
  if (rr >= 1.0 - 1e-12) {
    throw InvalidArgument("theta_decomposition: pure state has a unique decomposition, theta is not free");
  }
  const Vec3 n1{std::sin(theta), 0.0, std::cos(theta)};
  const Vec3 d{r[0] - n1[0], r[1] - n1[1], r[2] - n1[2]};
  const double dd = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
  if (dd < 1e-24) throw InvalidArgument("theta_decomposition: r coincides with n1 (degenerate ray)");
  const double s = -2.0 * (n1[0] * d[0] + n1[1] * d[1] + n1[2] * d[2]) / dd;
  Vec3 n2{n1[0] + s * d[0], n1[1] + s * d[1], n1[2] + s * d[2]};
  const double len = std::sqrt(n2[0] * n2[0] + n2[1] * n2[1] + n2[2] * n2[2]);
  for (double& c : n2) c /= len;
  return {1.0 - 1.0 / s, n1, 1.0 / s, n2};
}

SymmetricTwoBody theta_second_moment(const ConditionalMixtureField& density, const ClassicalPoint& xi,
                                     double theta) {
  const double F = density.marginal(xi);
  Vec3 r{};
  for (const auto& c : density.components(xi))
    for (int i = 0; i < 3; ++i) r[i] += c.weight * c.state.n()[i];
  const double rr = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  if (rr >= 1.0 - 1e-12) {
    const PauliVector p = projector_from_bloch(PureBlochState(r[0] / rr, r[1] / rr, r[2] / rr));
    return F * symmetric_product(p, p);
  }
  const ThetaDecomposition t = theta_decomposition({0.5, 0.5 * r[0], 0.5 * r[1], 0.5 * r[2]}, theta);
  const PauliVector p1 = projector_from_bloch(PureBlochState(t.n1));
  const PauliVector p2 = projector_from_bloch(PureBlochState(t.n2));
  return F * (t.w1 * symmetric_product(p1, p1) + t.w2 * symmetric_product(p2, p2));
}

namespace {

double linspace(double lo, double hi, std::size_t n, std::size_t i) {
  if (n == 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

std::vector<Fig1Row> fig1_scan(const ConditionalMixtureField& density, const OperatorField& H,
                               const Fig1Options& o) {
  if (o.nR < 1 || o.ntheta < 1) throw InvalidArgument("fig1_scan: empty scan range");
  if (!(o.h > 0.0)) throw InvalidArgument("fig1_scan: step h must be > 0");
  std::vector<Fig1Row> rows(o.nR * o.ntheta);
  const double eps = std::numeric_limits<double>::epsilon();
  parallel_for(rows.size(), [&](std::size_t idx) {
    const double R = linspace(o.R_min, o.R_max, o.nR, idx / o.ntheta);
    const double theta = linspace(o.theta_min, o.theta_max, o.ntheta, idx % o.ntheta);
    const ClassicalPoint xi{R, o.P_fixed};
    const PauliVector first = density.first_moment(xi);
    auto second = [&](const ClassicalPoint& p) { return theta_second_moment(density, p, theta); };
    const PauliVector d = first_moment_rhs_at(xi, first, second, H, o.h);
    const PauliVector d2 = first_moment_rhs_at(xi, first, second, H, 2.0 * o.h);
    const SymmetricTwoBody c = second(xi);
    const PauliVector traced = partial_trace_first(c);
    double dev = 0.0;
    for (std::size_t a = 0; a < 4; ++a) dev = std::max(dev, std::abs(traced[a] - first[a]));
    double cmax = 0.0;
    for (double v : c.c) cmax = std::max(cmax, std::abs(v));
    const PauliVector hR = H.dR(xi), hP = H.dP(xi);
    double hs = 0.0;
    for (std::size_t a = 0; a < 4; ++a) hs += std::abs(hR[a]) + std::abs(hP[a]);
    const double roundoff = 64.0 * eps * cmax * hs / o.h;
    const double trunc = std::max(std::abs(d[1] - d2[1]), std::abs(d[3] - d2[3]));
    rows[idx] = {R, theta, d[1], d[3], dev, trunc + roundoff};
  });
  return rows;
}

}  // namespace hqc
