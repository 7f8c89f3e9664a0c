#include "hqc/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hqc/errors.hpp"
#include "hqc/parallel.hpp"

namespace hqc {

std::vector<double> default_sample_times(double t_end) {
  std::vector<double> out;
  for (double f : {0.0, 0.01, 0.05, 0.1, 0.25, 0.5, 1.0}) out.push_back(f * t_end);
  return out;
}

namespace {

constexpr double kOverpure = 0.5 + 1e-8;

// Index of the first node holding a non-finite value, or size() if none.
std::size_t first_nonfinite(const MomentField& f) {
  for (std::size_t k = 0; k < f.F.size(); ++k) {
    if (!std::isfinite(f.F[k])) return k;
    for (std::size_t a = 0; a < 4; ++a)
      if (!std::isfinite(f.first[k][a])) return k;
  }
  return f.F.size();
}

double overpure_fraction(const MomentField& f) {
  std::size_t defined = 0, over = 0;
  for (std::size_t k = 0; k < f.F.size(); ++k) {
    if (!(f.F[k] >= kUndefinedConditional)) continue;
    ++defined;
    const PauliVector c = f.first[k] * (1.0 / f.F[k]);
    double p = 0.0;
    for (std::size_t a = 0; a < 4; ++a) p += c[a] * c[a];
    if (p > kOverpure) ++over;
  }
  return defined == 0 ? 0.0 : static_cast<double>(over) / static_cast<double>(defined);
}

void project_purity(MomentField& f) {
  for (std::size_t k = 0; k < f.F.size(); ++k) {
    if (!(f.F[k] >= kUndefinedConditional)) continue;
    PauliVector& m = f.first[k];
    const double r = std::sqrt(m[1] * m[1] + m[2] * m[2] + m[3] * m[3]);
    const double rmax = 0.5 * f.F[k];
    if (r > rmax) {
      const double s = rmax / r;
      for (std::size_t a = 1; a < 4; ++a) m[a] *= s;
    }
  }
}

double max_speed(const HamiltonianOnGrid& h) {
  double v = 0.0;
  for (std::size_t k = 0; k < h.H.size(); ++k)
    for (std::size_t a = 0; a < 4; ++a) v = std::max(v, std::hypot(h.dR[k][a], h.dP[k][a]));
  return v;
}

// u + s·du on the first-moment coordinates, F kept equal to 2 μ_0.
MomentField axpy(const MomentField& u, double s, const std::vector<PauliVector>& du) {
  MomentField out = u;
  for (std::size_t k = 0; k < du.size(); ++k) {
    out.first[k] += du[k] * s;
    out.F[k] = 2.0 * out.first[k][0];
  }
  return out;
}

Snapshot snapshot(double t, const MomentField& f) {
  return Snapshot{t, f, integrate(f.grid, f.F), overpure_fraction(f)};
}

}  // namespace

EvolutionResult evolve_effective(const MomentField& initial, const OperatorField& H,
                                 const EvolutionOptions& opt) {
  if (initial.order < 1) throw InvalidArgument("evolve_effective: initial field carries no first moment");
  if (!(opt.dt > 0.0) || !std::isfinite(opt.dt)) throw InvalidArgument("evolve_effective: dt must be positive");
  if (!(opt.t_end >= 0.0) || !std::isfinite(opt.t_end))
    throw InvalidArgument("evolve_effective: t_end must be finite and nonnegative");

  const PhaseGrid& grid = initial.grid;
  MomentField u(grid, 1);
  u.first = initial.first;
  for (std::size_t k = 0; k < grid.size(); ++k) u.F[k] = 2.0 * u.first[k][0];

  const HamiltonianOnGrid h = sample_hamiltonian(H, grid);
  EvolutionResult res;
  const double speed = max_speed(h);
  res.cfl_limit = speed > 0.0 ? std::min(grid.dR(), grid.dP()) / (4.0 * speed)
                              : std::numeric_limits<double>::infinity();
  if (opt.dt > res.cfl_limit) {
    std::ostringstream os;
    os << "dt = " << opt.dt << " exceeds the CFL sanity bound " << res.cfl_limit;
    res.warnings.push_back(os.str());
  }

  std::vector<double> stops = opt.sample_times.empty() ? default_sample_times(opt.t_end) : opt.sample_times;
  for (double& s : stops) s = std::clamp(s, 0.0, opt.t_end);
  stops.push_back(opt.t_end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  std::vector<bool> sampled(stops.size(), opt.sample_times.empty());
  for (std::size_t i = 0; i < stops.size(); ++i)
    for (double s : opt.sample_times)
      if (std::clamp(s, 0.0, opt.t_end) == stops[i]) sampled[i] = true;
  sampled.back() = true;

  const double p0 = integrate(grid, u.F);
  std::size_t unconverged = 0;
  auto rhs = [&](const MomentField& f) {
    EffectiveDiagnostics diag;
    auto d = effective_first_moment_rhs(f, h, opt.closure, opt.disc, &diag).drho;
    unconverged += diag.unconverged_nodes;
    return d;
  };
  bool drift_warned = false;
  auto monitor = [&](const MomentField& f) {
    const double drift = std::abs(integrate(grid, f.F) - p0);
    res.max_probability_drift = std::max(res.max_probability_drift, drift);
    res.max_positivity_fraction = std::max(res.max_positivity_fraction, overpure_fraction(f));
    if (drift > 1e-3 && !drift_warned) {
      drift_warned = true;
      res.warnings.push_back("probability drift exceeded 1e-3");
    }
  };
  monitor(u);

  double t = 0.0;
  for (std::size_t s = 0; s < stops.size(); ++s) {
    const double span = stops[s] - t;
    if (span > 0.0) {
      const auto n = static_cast<std::size_t>(std::ceil(span / opt.dt - 1e-9));
      const double dt = span / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto k1 = rhs(u);
        const auto k2 = rhs(axpy(u, 0.5 * dt, k1));
        const auto k3 = rhs(axpy(u, 0.5 * dt, k2));
        const auto k4 = rhs(axpy(u, dt, k3));
        MomentField next = u;
        for (std::size_t k = 0; k < grid.size(); ++k) {
          next.first[k] += (k1[k] + k2[k] * 2.0 + k3[k] * 2.0 + k4[k]) * (dt / 6.0);
          next.F[k] = 2.0 * next.first[k][0];
        }
        if (opt.purity_projection) project_purity(next);
        const double tn = (i + 1 == n) ? stops[s] : t + static_cast<double>(i + 1) * dt;
        if (const std::size_t bad = first_nonfinite(next); bad < grid.size()) {
          const ClassicalPoint x = grid.node(bad);
          std::ostringstream os;
          os << "non-finite field value at node " << bad << " (R = " << x.R << ", P = " << x.P
             << ") at t = " << tn << "; last finite state at t = "
             << (i == 0 ? t : t + static_cast<double>(i) * dt);
          res.aborted = true;
          res.message = os.str();
          res.snapshots.push_back(snapshot(i == 0 ? t : t + static_cast<double>(i) * dt, u));
          return res;
        }
        u = std::move(next);
        ++res.steps;
        monitor(u);
      }
      t = stops[s];
    }
    if (sampled[s]) res.snapshots.push_back(snapshot(stops[s], u));
  }
  if (unconverged > 0)
    res.warnings.push_back("numeric closure did not converge at " + std::to_string(unconverged) +
                           " node evaluations");
  return res;
}

void write_snapshots_csv(std::ostream& os, const EvolutionResult& r) {
  os << "t,R,P,F_C,mu1,mu2,mu3\n" << std::setprecision(17);
  for (const auto& s : r.snapshots) {
    const PhaseGrid& g = s.field.grid;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const ClassicalPoint xi = g.node(k);
      const PauliVector& m = s.field.first[k];
      os << s.t << ',' << xi.R << ',' << xi.P << ',' << s.field.F[k] << ',' << m[1] << ',' << m[2] << ','
         << m[3] << '\n';
    }
  }
}

std::vector<NamedObservable> standard_observables(const OperatorField& H) {
  auto sigma = [](std::size_t j) {
    PauliVector v;
    v[j] = 1.0;
    return OperatorField::constant(v);
  };
  const PauliVector e0 = [] {
    PauliVector v;
    v[0] = 1.0;
    return v;
  }();
  OperatorField R([=](const ClassicalPoint& x) { return e0 * x.R; },
                  [=](const ClassicalPoint&) { return e0; },
                  [](const ClassicalPoint&) { return PauliVector{}; });
  OperatorField P([=](const ClassicalPoint& x) { return e0 * x.P; },
                  [](const ClassicalPoint&) { return PauliVector{}; },
                  [=](const ClassicalPoint&) { return e0; });
  return {{"sigma1", sigma(1)}, {"sigma3", sigma(3)}, {"R", R}, {"P", P}, {"H", H}};
}

namespace {

FieldError field_error(const PhaseGrid& g, const std::vector<double>& a, const std::vector<double>& b) {
  FieldError e;
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = std::abs(a[k] - b[k]);
    s += d * d;
    e.linf = std::max(e.linf, d);
  }
  e.l2 = std::sqrt(s * g.cell_area());
  return e;
}

std::vector<double> coordinate(const MomentField& f, std::size_t a) {
  std::vector<double> out(f.grid.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = f.first[k][a];
  return out;
}

}  // namespace

ComparisonReport compare_to_ensemble(const Scenario& scenario, const PhaseGrid& grid, std::size_t N,
                                     double t_end, double dt, std::uint64_t seed,
                                     const CompareOptions& options) {
  if (N == 0) throw InvalidArgument("compare_to_ensemble: N must be positive");
  ComparisonReport rep;
  rep.scenario = scenario.name;
  rep.N = N;
  rep.seed = seed;
  rep.t_end = t_end;
  rep.dt = dt;

  EvolutionOptions eo = options.evolution;
  eo.t_end = t_end;
  eo.dt = dt;
  if (eo.sample_times.empty()) eo.sample_times = default_sample_times(t_end);

  const MomentField init = mixture_moment_field(scenario.density, grid, 1);
  const EvolutionResult ev = evolve_effective(init, scenario.H, eo);
  rep.warnings = ev.warnings;
  rep.aborted = ev.aborted;
  if (ev.aborted) rep.warnings.push_back(ev.message);

  Ensemble e = sample_initial(scenario.density, N, seed, scenario.name);
  rep.bandwidth = options.bandwidth > 0.0 ? options.bandwidth : silverman_bandwidth(e);
  const std::vector<NamedObservable> obs =
      options.observables.empty() ? standard_observables(scenario.H) : options.observables;
  const HamiltonianOnGrid h = sample_hamiltonian(scenario.H, grid);

  double t = 0.0;
  for (const Snapshot& snap : ev.snapshots) {
    if (snap.t > t) {
      e = propagate(e, scenario.H, snap.t - t, dt);
      t = snap.t;
    }
    const MomentField mc = estimate_moment_field(e, grid, 2, rep.bandwidth);
    ComparisonSample cs;
    cs.t = snap.t;
    cs.F = field_error(grid, snap.field.F, mc.F);
    for (std::size_t j = 0; j < 3; ++j)
      cs.mu[j] = field_error(grid, coordinate(snap.field, j + 1), coordinate(mc, j + 1));
    for (const auto& o : obs) {
      const Estimate est = ensemble_average(o.A, e);
      const double eff = average_observable(o.A, snap.field);
      cs.observables.push_back({o.name, eff, est.value, est.standard_error, std::abs(eff - est.value)});
    }
    const HierarchyRHS closed = effective_first_moment_rhs(mc, h, eo.closure, eo.disc);
    const HierarchyRHS exact = first_moment_rhs(mc, mc, h, eo.disc);
    // same undefined-node mask on both sides, so only the closure differs
    double s = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      for (std::size_t a = 0; a < 4; ++a) {
        if (!(mc.F[k] >= kUndefinedConditional)) continue;
        const double d = closed.drho[k][a] - exact.drho[k][a];
        s += d * d;
      }
    cs.closure_control_l2 = std::sqrt(s * grid.cell_area());
    cs.probability = snap.probability;
    cs.positivity_fraction = snap.positivity_fraction;
    rep.samples.push_back(std::move(cs));
  }
  return rep;
}

void write_comparison_csv(std::ostream& os, const ComparisonReport& r) {
  os << "t,quantity,effective,ensemble,ensemble_se,error_l2,error_linf\n" << std::setprecision(17);
  const char* names[3] = {"mu1", "mu2", "mu3"};
  for (const auto& s : r.samples) {
    os << s.t << ",F_C,,,," << s.F.l2 << ',' << s.F.linf << '\n';
    for (std::size_t j = 0; j < 3; ++j) os << s.t << ',' << names[j] << ",,,," << s.mu[j].l2 << ',' << s.mu[j].linf << '\n';
    for (const auto& o : s.observables)
      os << s.t << ",<" << o.name << ">," << o.effective << ',' << o.ensemble << ',' << o.ensemble_se << ','
         << o.error << ',' << o.error << '\n';
    os << s.t << ",closure_control,,,," << s.closure_control_l2 << ",\n";
    os << s.t << ",probability," << s.probability << ",,,,\n";
    os << s.t << ",overpure_fraction," << s.positivity_fraction << ",,,,\n";
  }
}

std::string comparison_json(const ComparisonReport& r) {
  using nlohmann::json;
  json j;
  j["scenario"] = r.scenario;
  j["N"] = r.N;
  j["seed"] = r.seed;
  j["bandwidth"] = r.bandwidth;
  j["t_end"] = r.t_end;
  j["dt"] = r.dt;
  j["aborted"] = r.aborted;
  j["warnings"] = r.warnings;
  json samples = json::array();
  for (const auto& s : r.samples) {
    json js;
    js["t"] = s.t;
    js["F_C"] = {{"l2", s.F.l2}, {"linf", s.F.linf}};
    for (std::size_t k = 0; k < 3; ++k)
      js["mu" + std::to_string(k + 1)] = {{"l2", s.mu[k].l2}, {"linf", s.mu[k].linf}};
    json jo = json::object();
    for (const auto& o : s.observables)
      jo[o.name] = {{"effective", o.effective}, {"ensemble", o.ensemble}, {"ensemble_se", o.ensemble_se},
                    {"error", o.error}};
    js["observables"] = jo;
    js["closure_control_l2"] = s.closure_control_l2;
    js["probability"] = s.probability;
    js["overpure_fraction"] = s.positivity_fraction;
    samples.push_back(js);
  }
  j["samples"] = samples;
  return j.dump(2);
}

}  // namespace hqc
