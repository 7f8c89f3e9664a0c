#include "hqc/run.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hqc/config.hpp"
#include "hqc/ehrenfest.hpp"
#include "hqc/ensemble.hpp"
#include "hqc/errors.hpp"
#include "hqc/evolution.hpp"
#include "hqc/hierarchy.hpp"
#include "hqc/maxent.hpp"
#include "hqc/moments.hpp"
#include "hqc/parallel.hpp"

#ifndef HQC_VERSION
#define HQC_VERSION "0.0.0"
#endif

namespace hqc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Context {
  const RunConfig& config;
  fs::path out;
  std::uint64_t seed;
  std::ostream& log;
  json outputs = json::array();
  json summary = json::object();

  std::ofstream open(const std::string& name) {
    std::ofstream f(out / name);
    if (!f) throw ConfigError("output.directory", "cannot write '" + (out / name).string() + "'");
    outputs.push_back(name);
    return f;
  }
  void write_json(const std::string& name, const json& j) {
    auto f = open(name);
    f << j.dump(2) << '\n';
  }
};

std::vector<double> sample_times(const RunConfig& c, double t_end) {
  std::vector<double> t = c.output.sample_times.empty() ? default_sample_times(t_end) : c.output.sample_times;
  for (double x : t)
    if (x > t_end) throw ConfigError("output.sample_times", "sample time " + std::to_string(x) + " exceeds t_end");
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

int run_trajectory(Context& cx) {
  const RunConfig& c = *(&cx.config);
  const Scenario sc = build_scenario(*c.scenario);
  const Microstate s0(c.trajectory->xi, PureBlochState(c.trajectory->bloch));
  const Trajectory tr = integrate_trajectory(s0, sc.H, c.integrator->t_end, c.integrator->dt,
                                             {c.trajectory->stride});
  {
    auto f = cx.open("trajectory.csv");
    write_trajectory_csv(f, tr);
  }
  const double f0 = tr.samples.front().f_H;
  double drift = 0.0;
  for (const auto& s : tr.samples) drift = std::max(drift, std::abs(s.f_H - f0) / std::max(std::abs(f0), 1e-300));
  cx.summary = {{"samples", tr.samples.size()},
                {"max_norm_drift", tr.max_norm_drift},
                {"max_relative_energy_drift", drift},
                {"aborted", tr.aborted},
                {"message", tr.message}};
  cx.log << "trajectory: " << tr.samples.size() << " samples, energy drift " << drift << ", norm drift "
         << tr.max_norm_drift << '\n';
  if (tr.aborted) throw NumericalError(tr.message);
  return kExitOk;
}

int run_ensemble(Context& cx) {
  const RunConfig& c = cx.config;
  const Scenario sc = build_scenario(*c.scenario);
  const PhaseGrid grid = c.grid->grid();
  const double t_end = c.integrator->t_end, dt = c.integrator->dt;
  Ensemble e = sample_initial(sc.density, c.ensemble->N, cx.seed, sc.name);
  const double h = c.ensemble->bandwidth > 0.0 ? c.ensemble->bandwidth : silverman_bandwidth(e);
  {
    auto f = cx.open("ensemble_initial.csv");
    write_ensemble_csv(f, e);
  }
  const auto obs = standard_observables(sc.H);
  auto of = cx.open("observables.csv");
  of << "t,observable,value,standard_error\n" << std::setprecision(17);
  json snaps = json::array();
  double t_prev = 0.0;
  const auto times = sample_times(c, t_end);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] > t_prev) e = propagate(e, sc.H, times[i] - t_prev, dt);
    t_prev = times[i];
    const MomentField f = estimate_moment_field(e, grid, 2, h);
    std::ostringstream name;
    name << "moments_" << std::setw(3) << std::setfill('0') << i << ".csv";
    {
      auto mf = cx.open(name.str());
      write_moment_field_csv(mf, f);
    }
    for (const auto& a : obs) {
      const Estimate est = ensemble_average(a.A, e);
      of << times[i] << ',' << a.name << ',' << est.value << ',' << est.standard_error << '\n';
    }
    snaps.push_back({{"t", times[i]}, {"file", name.str()}});
    cx.log << "ensemble: t = " << times[i] << " -> " << name.str() << '\n';
  }
  {
    auto f = cx.open("ensemble_final.csv");
    write_ensemble_csv(f, e);
  }
  cx.summary = {{"N", e.size()}, {"bandwidth", h}, {"snapshots", snaps}};
  return kExitOk;
}

int run_fig1(Context& cx) {
  const RunConfig& c = cx.config;
  const Scenario sc = build_scenario(*c.scenario);
  const auto rows = fig1_scan(sc.density, sc.H, c.fig1);
  auto f = cx.open("fig1.csv");
  auto d = cx.open("fig1_diagnostics.csv");
  f << "R,theta,dmu1,dmu3\n" << std::setprecision(17);
  d << "R,theta,first_deviation,noise\n" << std::setprecision(17);
  double dev = 0.0;
  for (const auto& r : rows) {
    f << r.R << ',' << r.theta << ',' << r.dmu1 << ',' << r.dmu3 << '\n';
    d << r.R << ',' << r.theta << ',' << r.first_deviation << ',' << r.noise << '\n';
    dev = std::max(dev, r.first_deviation);
  }
  cx.summary = {{"rows", rows.size()}, {"max_first_deviation", dev}, {"P_fixed", c.fig1.P_fixed}};
  cx.log << "fig1: " << rows.size() << " rows, max first-moment deviation " << dev << '\n';
  return kExitOk;
}

int run_maxent(Context& cx) {
  const RunConfig& c = cx.config;
  std::vector<PauliVector> inputs = c.maxent->first_moments;
  std::mt19937_64 rng(cx.seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < c.maxent->random; ++i) {
    const double x = g(rng), y = g(rng), z = g(rng);
    const double n = std::sqrt(x * x + y * y + z * z);
    const double r = 0.5 * std::cbrt(u(rng));  // uniform in the ball
    inputs.push_back({0.5, r * x / n, r * y / n, r * z / n});
  }
  std::vector<ClosureResult> results(inputs.size());
  parallel_for(inputs.size(), [&](std::size_t i) {
    results[i] = c.closure.method == ClosureMethod::kNumeric ? closure_numeric(inputs[i], c.closure.numeric)
                                                             : closure_closed_form(inputs[i], c.closure.variant);
  });
  {
    auto f = cx.open("closure_report.csv");
    write_closure_report_csv(f, inputs, results);
  }
  std::size_t infeasible = 0, unconverged = 0;
  double worst_eq = 0.0, min_slack = INFINITY;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.residuals.feasible(1e-10)) ++infeasible;
    if (!r.converged) ++unconverged;
    worst_eq = std::max(worst_eq, r.residuals.max_equality_violation());
    min_slack = std::min(min_slack, r.residuals.min_inequality_slack());
    if (i < 10) {
      cx.log << "maxent: mu = (" << inputs[i][0] << ", " << inputs[i][1] << ", " << inputs[i][2] << ", "
             << inputs[i][3] << ") -> mu11 " << r.second(1, 1) << ", mu22 " << r.second(2, 2) << ", mu33 "
             << r.second(3, 3) << ", entropy " << r.entropy_value
             << (r.residuals.feasible(1e-10) ? "" : " (infeasible)") << '\n';
    }
  }
  cx.summary = {{"inputs", inputs.size()},
                {"method", to_string(c.closure.method)},
                {"infeasible", infeasible},
                {"unconverged", unconverged},
                {"max_equality_violation", worst_eq},
                {"min_inequality_slack", min_slack}};
  return kExitOk;
}

EvolutionOptions evolution_options(const RunConfig& c) {
  EvolutionOptions o;
  o.t_end = c.integrator->t_end;
  o.dt = c.integrator->dt;
  o.closure = c.closure;
  o.disc = c.evolution.disc;
  o.sample_times = sample_times(c, o.t_end);
  o.purity_projection = c.evolution.purity_projection;
  return o;
}

int run_evolve(Context& cx) {
  const RunConfig& c = cx.config;
  const Scenario sc = build_scenario(*c.scenario);
  const PhaseGrid grid = c.grid->grid();
  const EvolutionResult r = evolve_effective(mixture_moment_field(sc.density, grid, 1), sc.H, evolution_options(c));
  {
    auto f = cx.open("snapshots.csv");
    write_snapshots_csv(f, r);
  }
  json snaps = json::array();
  for (const auto& s : r.snapshots)
    snaps.push_back({{"t", s.t}, {"probability", s.probability}, {"positivity_fraction", s.positivity_fraction}});
  json j = {{"steps", r.steps},
            {"cfl_limit", r.cfl_limit},
            {"max_probability_drift", r.max_probability_drift},
            {"max_positivity_fraction", r.max_positivity_fraction},
            {"snapshots", snaps},
            {"warnings", r.warnings},
            {"aborted", r.aborted},
            {"message", r.message}};
  cx.write_json("evolution.json", j);
  cx.summary = j;
  for (const auto& w : r.warnings) cx.log << "warning: " << w << '\n';
  cx.log << "evolve-effective: " << r.steps << " steps, probability drift " << r.max_probability_drift
         << ", max positivity fraction " << r.max_positivity_fraction << '\n';
  if (r.aborted) throw NumericalError(r.message);
  return kExitOk;
}

int run_compare(Context& cx) {
  const RunConfig& c = cx.config;
  const Scenario sc = build_scenario(*c.scenario);
  CompareOptions o;
  o.evolution = evolution_options(c);
  o.bandwidth = c.ensemble->bandwidth;
  const ComparisonReport r = compare_to_ensemble(sc, c.grid->grid(), c.ensemble->N, c.integrator->t_end,
                                                 c.integrator->dt, cx.seed, o);
  {
    auto f = cx.open("comparison.csv");
    write_comparison_csv(f, r);
  }
  {
    auto f = cx.open("comparison.json");
    f << comparison_json(r) << '\n';
  }
  for (const auto& w : r.warnings) cx.log << "warning: " << w << '\n';
  for (const auto& s : r.samples) {
    cx.log << "compare: t = " << s.t << ", F_C L2 error " << s.F.l2 << ", closure control " << s.closure_control_l2
           << '\n';
  }
  cx.summary = {{"samples", r.samples.size()}, {"bandwidth", r.bandwidth}, {"aborted", r.aborted}};
  if (r.aborted) throw NumericalError("effective evolution aborted; see comparison.json warnings");
  return kExitOk;
}

// Trace identities, level consistency, marginal equations and conservation
// rates on the exact mixture moments, plus a Monte Carlo oracle at t = 0.
int run_hierarchy_check(Context& cx) {
  const RunConfig& c = cx.config;
  const Scenario sc = build_scenario(*c.scenario);
  const PhaseGrid grid = c.grid->grid();
  json checks = json::array();
  bool all_ok = true;
  auto record = [&](const std::string& name, double value, double tol) {
    const bool ok = std::abs(value) <= tol;
    all_ok = all_ok && ok;
    checks.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", ok}});
    cx.log << (ok ? "PASS " : "FAIL ") << name << ": " << value << " (tol " << tol << ")\n";
  };
  auto trace_identities = [&](const MomentField& f, const std::string& tag) {
    double fmax = 0.0, tr = 0.0, p1 = 0.0, p2 = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      fmax = std::max(fmax, std::abs(f.F[k]));
      tr = std::max(tr, std::abs(2.0 * f.first[k][0] - f.F[k]));
      const PauliVector a = partial_trace_first(f.second[k]);
      for (std::size_t j = 0; j < 4; ++j) p1 = std::max(p1, std::abs(a[j] - f.first[k][j]));
      const SymmetricTwoBody b = partial_trace_first(f.third[k]);
      for (std::size_t j = 0; j < b.c.size(); ++j) p2 = std::max(p2, std::abs(b.c[j] - f.second[k].c[j]));
    }
    const double tol = 1e-13 * std::max(fmax, 1e-300);
    record(tag + ": max |Tr rho - F_C|", tr, tol);
    record(tag + ": max |Tr_1 rho2 - rho|", p1, tol);
    record(tag + ": max |Tr_1 rho3 - rho2|", p2, tol);
  };

  const MomentField exact = mixture_moment_field(sc.density, grid, 3);
  trace_identities(exact, "exact moments");

  const Ensemble e = sample_initial(sc.density, c.ensemble->N, cx.seed, sc.name);
  const MomentField est = estimate_moment_field(e, grid, 3, c.ensemble->bandwidth);
  trace_identities(est, "kernel estimate");

  // the k = 2 level traces back to the k = 1 level
  const HierarchyRHS r1 = first_moment_rhs(exact, exact, sc.H);
  const HierarchyRHS r2 = kth_moment_rhs(2, exact, sc.H);
  double lvl = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const PauliVector t = partial_trace_first(r2.drho2[k]);
    for (std::size_t j = 0; j < 4; ++j) {
      lvl = std::max(lvl, std::abs(t[j] - r1.drho[k][j]));
      scale = std::max(scale, std::abs(r1.drho[k][j]));
    }
  }
  record("max |Tr_1 d(rho2)/dt - d(rho)/dt|", lvl, 1e-12 * std::max(scale, 1.0));

  // marginal equations
  const MarginalRHS m = marginal_rhs(exact, sc.H);
  double dfm = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) dfm = std::max(dfm, std::abs(m.dF[k] - 2.0 * r1.drho[k][0]));
  record("max |dF_C - 2 d(mu0)| per node", dfm, 1e-12 * std::max(scale, 1.0));
  const double h2 = std::max(grid.dR() * grid.dR(), grid.dP() * grid.dP());
  double absdf = 0.0;
  for (double v : m.dF) absdf += std::abs(v) * grid.cell_area();
  record("probability rate Int dF_C", integrate(grid, m.dF), h2 * std::max(absdf, 1e-300));
  PauliVector total{};
  for (std::size_t k = 0; k < grid.size(); ++k) total += r1.drho[k] * grid.cell_area();
  double comm = 0.0;
  for (std::size_t j = 0; j < 4; ++j) comm = std::max(comm, std::abs(total[j] - m.drho_marginal[j]));
  record("max |Int d(rho)/dt - Int [H, rho]|", comm, h2 * std::max(absdf, 1e-300));

  for (const auto& [name, A] : {std::pair{std::string("identity"), OperatorField::constant({1.0, 0, 0, 0})},
                                std::pair{std::string("H"), sc.H}}) {
    const AverageRate a = average_rate(A, exact, exact, sc.H);
    record("average_rate(" + name + ")", a.value, h2 * std::max(a.scale, 1e-300));
    checks.back()["moment_form"] = a.moment_form;
    checks.back()["scale"] = a.scale;
  }

  // Monte Carlo oracle: ensemble averages against quadrature of the exact moments
  for (const auto& o : standard_observables(sc.H)) {
    const Estimate mc = ensemble_average(o.A, e);
    const double q = average_observable(o.A, exact);
    const double z = (mc.value - q) / std::max(mc.standard_error, 1e-300);
    record("MC vs quadrature <" + o.name + "> in standard errors", z, 4.0);
    checks.back()["mc"] = mc.value;
    checks.back()["quadrature"] = q;
  }
  cx.write_json("hierarchy_check.json", {{"checks", checks}, {"pass", all_ok}});
  cx.summary = {{"checks", checks.size()}, {"pass", all_ok}};
  if (!all_ok) throw NumericalError("hierarchy-check: residuals above tolerance, see hierarchy_check.json");
  return kExitOk;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string library_version() { return HQC_VERSION; }

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {"trajectory",       "ensemble", "fig1",           "maxent-check",
                                                 "evolve-effective", "compare",  "hierarchy-check"};
  return names;
}

int run(const RunOptions& opt, std::ostream& log, std::ostream& err) {
  json manifest = {{"manifest_version", 1},
                   {"subcommand", opt.subcommand},
                   {"config_path", opt.config_path},
                   {"threads", opt.threads},
                   {"reproducible", opt.reproducible},
                   {"started_utc", utc_now()}};
  json versions = {{"hqc", library_version()},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__},
                   {"cplusplus", __cplusplus}};
  for (const auto& [k, v] : opt.extra_versions) versions[k] = v;
  manifest["versions"] = versions;

  fs::path out = opt.out_dir;
  int status = kExitOk;
  std::optional<RunConfig> config;
  try {
    if (std::find(subcommand_names().begin(), subcommand_names().end(), opt.subcommand) == subcommand_names().end())
      throw ConfigError("subcommand", "unknown subcommand '" + opt.subcommand + "'");
    config = load_config(opt.config_path);
    if (opt.seed && config->ensemble) override_seed(*config, *opt.seed);
    if (out.empty()) out = config->output.directory;
    if (out.empty()) throw ConfigError("output.directory", "no output directory (set it or pass --out)");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("output.directory", "cannot create '" + out.string() + "': " + ec.message());
    manifest["config"] = json::parse(config->canonical);
    manifest["config_hash"] = fnv1a_hex(config->canonical);
    require_blocks(*config, opt.subcommand);

    const std::uint64_t seed =
        opt.seed ? *opt.seed : (config->ensemble ? config->ensemble->seed : 0);
    manifest["seed"] = seed;
    set_thread_count(opt.threads);
    set_reproducible(opt.reproducible);

    Context cx{*config, out, seed, log};
    try {
      const std::string& s = opt.subcommand;
      if (s == "trajectory") status = run_trajectory(cx);
      else if (s == "ensemble") status = run_ensemble(cx);
      else if (s == "fig1") status = run_fig1(cx);
      else if (s == "maxent-check") status = run_maxent(cx);
      else if (s == "evolve-effective") status = run_evolve(cx);
      else if (s == "compare") status = run_compare(cx);
      else status = run_hierarchy_check(cx);
    } catch (...) {
      manifest["outputs"] = cx.outputs;
      manifest["summary"] = cx.summary;
      throw;
    }
    manifest["outputs"] = cx.outputs;
    manifest["summary"] = cx.summary;
  } catch (const ConfigError& e) {
    status = kExitConfig;
    manifest["error"] = {{"kind", "config"}, {"key", e.key()}, {"message", e.what()}};
    err << "config error: " << e.what() << '\n';
  } catch (const InvalidArgument& e) {
    status = kExitConfig;
    manifest["error"] = {{"kind", "config"}, {"message", e.what()}};
    err << "config error: " << e.what() << '\n';
  } catch (const NumericalError& e) {
    status = kExitNumerical;
    manifest["error"] = {{"kind", "numerical"}, {"message", e.what()}};
    err << "numerical error: " << e.what() << '\n';
  }
  manifest["exit_status"] = status;
  if (!out.empty() && fs::is_directory(out)) {
    std::ofstream m(out / "manifest.json");
    if (m) m << manifest.dump(2) << '\n';
  }
  return status;
}

}  // namespace hqc
