#include "hqc/ensemble.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "hqc/errors.hpp"
#include "hqc/parallel.hpp"

namespace hqc {

namespace {

PureBlochState draw_state(const std::vector<MixtureComponent>& comps, double u) {
  double acc = 0.0;
  for (const auto& c : comps) {
    acc += c.weight;
    if (u < acc) return c.state;
  }
  // u landed in the rounding gap above the last cumulative weight
  for (auto it = comps.rbegin(); it != comps.rend(); ++it)
    if (it->weight > 0.0) return it->state;
  throw InvalidArgument("conditional mixture has no component with positive weight");
}

struct RejectionSampler {
  SamplingBox box;
  double bound;
};

RejectionSampler make_rejection_sampler(const ConditionalMixtureField& density, const SamplingBox& box) {
  const PhaseGrid g(box.R_min, box.R_max, box.P_min, box.P_max, 256, 256);
  std::vector<double> f = sample(g, [&](const ClassicalPoint& xi) { return density.marginal(xi); });
  double peak = 0.0;
  for (double v : f) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("classical marginal F_C is negative or non-finite on the sampling box");
    }
    peak = std::max(peak, v);
  }
  const double mass = integrate(g, f);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw InvalidArgument("classical marginal F_C is not normalizable on the sampling box");
  }
  return {box, 1.5 * peak};
}

}  // namespace

Ensemble sample_initial(const ConditionalMixtureField& density, std::size_t N, std::uint64_t seed,
                        std::string origin, const SamplingBox& box) {
  if (N < 1) throw InvalidArgument("ensemble size N must be >= 1");
  std::optional<RejectionSampler> rejection;
  if (!density.sampler()) rejection = make_rejection_sampler(density, box);

  Ensemble e;
  e.rng_seed = seed;
  e.origin = std::move(origin);
  e.members.resize(N);
  const double w = 1.0 / static_cast<double>(N);
  parallel_for(N, [&](std::size_t i) {
    std::mt19937_64 rng(stream_seed(seed, i));
    ClassicalPoint xi;
    if (density.sampler()) {
      xi = (*density.sampler())(rng);
    } else {
      std::uniform_real_distribution<double> uR(box.R_min, box.R_max);
      std::uniform_real_distribution<double> uP(box.P_min, box.P_max);
      std::uniform_real_distribution<double> uy(0.0, rejection->bound);
      for (;;) {
        xi = {uR(rng), uP(rng)};
        if (uy(rng) < density.marginal(xi)) break;
      }
    }
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const PureBlochState psi = draw_state(density.components(xi), u01(rng));
    e.members[i] = {w, Microstate(xi, psi, 0.0)};
  });
  return e;
}

Ensemble propagate(const Ensemble& e, const OperatorField& H, double t, double dt) {
  Ensemble out = e;
  std::vector<std::string> failures(e.size());
  parallel_for(e.size(), [&](std::size_t i) {
    Microstate& s = out.members[i].state;
    try {
      advance(s, H, s.t + t, dt);
    } catch (const NumericalError& err) {
      failures[i] = err.what();
    }
  });
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i].empty()) {
      throw NumericalError("member " + std::to_string(i) + ": " + failures[i]);
    }
  }
  return out;
}

double silverman_bandwidth(const Ensemble& e) {
  if (e.members.empty()) throw InvalidArgument("empty ensemble");
  double sw = 0.0, mR = 0.0, mP = 0.0;
  for (const auto& m : e.members) {
    sw += m.w;
    mR += m.w * m.state.xi.R;
    mP += m.w * m.state.xi.P;
  }
  mR /= sw;
  mP /= sw;
  double vR = 0.0, vP = 0.0, sw2 = 0.0;
  for (const auto& m : e.members) {
    vR += m.w * (m.state.xi.R - mR) * (m.state.xi.R - mR);
    vP += m.w * (m.state.xi.P - mP) * (m.state.xi.P - mP);
    sw2 += m.w * m.w;
  }
  const double sigma = std::sqrt(0.5 * (vR + vP) / sw);
  const double n_eff = sw * sw / sw2;
  if (!(sigma > 0.0)) throw InvalidArgument("ensemble has zero spread; give an explicit bandwidth");
  return sigma * std::pow(n_eff, -1.0 / 6.0);
}

NeighborIndex::NeighborIndex(std::span<const ClassicalPoint> points, double radius) : width_(radius) {
  if (!(radius > 0.0)) throw InvalidArgument("neighbor radius must be > 0");
  double rlo = 0.0, rhi = 0.0, plo = 0.0, phi = 0.0;
  if (!points.empty()) {
    rlo = rhi = points[0].R;
    plo = phi = points[0].P;
  }
  for (const auto& p : points) {
    if (!std::isfinite(p.R) || !std::isfinite(p.P)) throw InvalidArgument("non-finite sample point");
    rlo = std::min(rlo, p.R);
    rhi = std::max(rhi, p.R);
    plo = std::min(plo, p.P);
    phi = std::max(phi, p.P);
  }
  R0_ = rlo;
  P0_ = plo;
  nx_ = static_cast<long>((rhi - rlo) / width_) + 1;
  ny_ = static_cast<long>((phi - plo) / width_) + 1;
  const std::size_t nbins = static_cast<std::size_t>(nx_ * ny_);
  std::vector<std::size_t> count(nbins + 1, 0);
  std::vector<std::size_t> bin_of(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const long x = bin_coord(points[i].R, R0_);
    const long y = bin_coord(points[i].P, P0_);
    bin_of[i] = static_cast<std::size_t>(x * ny_ + y);
    ++count[bin_of[i] + 1];
  }
  for (std::size_t b = 0; b < nbins; ++b) count[b + 1] += count[b];
  start_ = count;
  order_.resize(points.size());
  std::vector<std::size_t> fill(count.begin(), count.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) order_[fill[bin_of[i]]++] = i;
}

long NeighborIndex::bin_coord(double v, double origin) const {
  const double x = std::floor((v - origin) / width_);
  // queries far outside the sample box map to a bin beyond the edge
  if (x < -2.0) return -2;
  if (x > static_cast<double>(std::max(nx_, ny_)) + 2.0) return std::max(nx_, ny_) + 2;
  return static_cast<long>(x);
}

double kernel(double dR, double dP, double h) {
  const double r2 = (dR * dR + dP * dP) / (h * h);
  if (r2 > kKernelCutoff * kKernelCutoff) return 0.0;
  return std::exp(-0.5 * r2) / (2.0 * std::numbers::pi * h * h);
}

MomentField estimate_moment_field(const Ensemble& e, const PhaseGrid& grid, int k, double bandwidth,
                                  MomentFieldErrors* errors) {
  if (e.members.empty()) throw InvalidArgument("estimate_moment_field: empty ensemble");
  if (k < 0 || k > 3) throw InvalidArgument("estimate_moment_field: k must be 0, 1, 2 or 3");
  const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(e);

  std::vector<ClassicalPoint> pts(e.size());
  std::vector<PauliVector> proj(e.size());
  double sw2 = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    pts[i] = e.members[i].state.xi;
    const Vec3& n = e.members[i].state.n;
    proj[i] = {0.5, 0.5 * n[0], 0.5 * n[1], 0.5 * n[2]};
    sw2 += e.members[i].w * e.members[i].w;
  }
  const NeighborIndex index(pts, kKernelCutoff * h);

  MomentField out(grid, k);
  if (errors) {
    errors->F.assign(grid.size(), 0.0);
    errors->first.assign(grid.size(), PauliVector{});
  }
  parallel_for(grid.size(), [&](std::size_t node) {
    const ClassicalPoint q = grid.node(node);
    double F = 0.0;
    PauliVector m1;
    SymmetricTwoBody m2;
    ThreeBody m3{};
    double F_sq = 0.0;
    PauliVector m1_sq;
    index.for_each(q, [&](std::size_t i) {
      const double wk = e.members[i].w * kernel(q.R - pts[i].R, q.P - pts[i].P, h);
      if (wk == 0.0) return;
      const PauliVector& p = proj[i];
      F += wk;
      if (errors) {
        // w_i K_i² summed; the per-sample value is K_i p_a
        const double kk = wk * (wk / e.members[i].w);
        F_sq += kk;
        for (std::size_t a = 0; a < 4; ++a) m1_sq[a] += kk * p[a] * p[a];
      }
      if (k < 1) return;
      PauliVector wp;
      for (std::size_t a = 0; a < 4; ++a) wp[a] = wk * p[a];
      m1 += wp;
      if (k < 2) return;
      // products ordered (w K p_a) p_b with a the smallest index so that the
      // σ0 slices are exact powers of two times the lower moments
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a; b < 4; ++b) m2(a, b) += wp[a] * p[b];
      if (k < 3) return;
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a; b < 4; ++b)
          for (std::size_t c = b; c < 4; ++c) m3[three_index(a, b, c)] += wp[a] * p[b] * p[c];
    });
    out.F[node] = F;
    if (k >= 1) out.first[node] = m1;
    if (k >= 2) out.second[node] = m2;
    if (k >= 3) {
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a; b < 4; ++b)
          for (std::size_t c = b; c < 4; ++c) {
            const double v = m3[three_index(a, b, c)];
            m3[three_index(a, c, b)] = v;
            m3[three_index(b, a, c)] = v;
            m3[three_index(b, c, a)] = v;
            m3[three_index(c, a, b)] = v;
            m3[three_index(c, b, a)] = v;
          }
      out.third[node] = m3;
    }
    if (errors) {
      // Var(Σ w_i X_i) ≈ Σ w_i² (X_i − mean)² for normalized weights
      errors->F[node] = std::sqrt(std::max(0.0, sw2 * (F_sq - F * F)));
      for (std::size_t a = 0; a < 4; ++a) {
        const double mean = k >= 1 ? m1[a] : F * (a == 0 ? 0.5 : 0.0);
        errors->first[node][a] = std::sqrt(std::max(0.0, sw2 * (m1_sq[a] - mean * mean)));
      }
    }
  });
  return out;
}

Estimate ensemble_average(const OperatorField& A, const Ensemble& e) {
  if (e.members.empty()) throw InvalidArgument("ensemble_average: empty ensemble");
  std::vector<double> vals(e.size());
  parallel_for(e.size(), [&](std::size_t i) {
    vals[i] = hybrid_energy(e.members[i].state, A);  // Tr(ρψ Â(ξ))
  });
  double sw = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    sw += e.members[i].w;
    mean += e.members[i].w * vals[i];
  }
  double var = 0.0, sw2 = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double d = vals[i] - mean / sw;
    var += e.members[i].w * d * d;
    sw2 += e.members[i].w * e.members[i].w;
  }
  var /= sw;
  return {mean, std::sqrt(var * sw2 / (sw * sw))};
}

double average_observable(const OperatorField& A, const Ensemble& e) {
  return ensemble_average(A, e).value;
}

double average_observable(const OperatorField& A, const MomentField& f) {
  if (f.order < 1) throw InvalidArgument("average_observable: field carries no first moment");
  std::vector<double> vals(f.grid.size());
  parallel_for(f.grid.size(), [&](std::size_t k) {
    const PauliVector a = A(f.grid.node(k));
    const PauliVector& m = f.first[k];
    vals[k] = 2.0 * (m[0] * a[0] + m[1] * a[1] + m[2] * a[2] + m[3] * a[3]);
  });
  return integrate(f.grid, vals);
}

double average_product(const OperatorField& A, const OperatorField& B, const Ensemble& e) {
  std::vector<double> vals(e.size());
  parallel_for(e.size(), [&](std::size_t i) {
    vals[i] = e.members[i].w * hybrid_energy(e.members[i].state, A) *
              hybrid_energy(e.members[i].state, B);
  });
  return sum(vals);
}

double average_product(const OperatorField& A, const OperatorField& B, const MomentField& f) {
  if (f.order < 2) throw InvalidArgument("average_product: field carries no second moment");
  std::vector<double> vals(f.grid.size());
  parallel_for(f.grid.size(), [&](std::size_t k) {
    const ClassicalPoint xi = f.grid.node(k);
    const PauliVector a = A(xi);
    const PauliVector b = B(xi);
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) s += f.second[k](i, j) * a[i] * b[j];
    vals[k] = 4.0 * s;
  });
  return integrate(f.grid, vals);
}

Factorization factorize(const MomentField& f, double threshold) {
  if (f.order < 1) throw InvalidArgument("factorize: field carries no first moment");
  Factorization out;
  out.F = f.F;
  out.conditional.assign(f.grid.size(), PauliVector{});
  out.defined.assign(f.grid.size(), false);
  for (std::size_t k = 0; k < f.grid.size(); ++k) {
    if (f.F[k] >= threshold) {
      out.defined[k] = true;
      out.conditional[k] = f.first[k] * (1.0 / f.F[k]);
    }
  }
  return out;
}

namespace {

void reject_node(const MomentField& f, std::size_t k, double ev) {
  const ClassicalPoint xi = f.grid.node(k);
  std::ostringstream os;
  os << "hybrid_entropy: node " << k << " (R = " << xi.R << ", P = " << xi.P
     << ") has negative eigenvalue " << ev;
  throw InvalidArgument(os.str());
}

}  // namespace

HybridEntropy hybrid_entropy(const MomentField& f, int k) {
  if (k < 0 || k > 2 || k > f.order) throw InvalidArgument("hybrid_entropy: moment order not available");
  std::vector<double> classical(f.grid.size(), 0.0), quantum(f.grid.size(), 0.0);
  std::size_t undefined = 0;
  for (std::size_t node = 0; node < f.grid.size(); ++node) {
    const double F = f.F[node];
    if (F < kUndefinedConditional) {
      ++undefined;
      continue;
    }
    classical[node] = -F * std::log(F);
    if (k == 0) continue;
    Eigen::VectorXd ev;
    if (k == 1) {
      Eigen::SelfAdjointEigenSolver<Matrix2c> es(from_pauli(f.first[node]), Eigen::EigenvaluesOnly);
      ev = es.eigenvalues();
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix4c> es(to_matrix(f.second[node]), Eigen::EigenvaluesOnly);
      ev = es.eigenvalues();
    }
    if (ev.minCoeff() < -1e-10 * F) reject_node(f, node, ev.minCoeff());
    std::vector<double> cond(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) cond[i] = std::max(0.0, ev[i]) / F;
    quantum[node] = F * entropy_of_spectrum(cond);
  }
  HybridEntropy out;
  out.classical = integrate(f.grid, classical);
  out.quantum = integrate(f.grid, quantum);
  out.total = out.classical + out.quantum;
  out.undefined_nodes = undefined;
  return out;
}

void write_ensemble_csv(std::ostream& os, const Ensemble& e) {
  os << "w,R,P,nx,ny,nz\n" << std::setprecision(17);
  for (const auto& m : e.members) {
    const auto& s = m.state;
    os << m.w << ',' << s.xi.R << ',' << s.xi.P << ',' << s.n[0] << ',' << s.n[1] << ',' << s.n[2]
       << '\n';
  }
}

}  // namespace hqc
