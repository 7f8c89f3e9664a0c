#include "hqc/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hqc/errors.hpp"
#include "hqc/expression.hpp"

namespace hqc {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed so that typos
// surface as errors instead of silently falling back to defaults.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  const json* find(const std::string& k) {
    seen_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& k, double def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_number()) throw ConfigError(key(k), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(key(k), "must be finite");
    return x;
  }

  std::size_t count(const std::string& k, std::size_t def, std::size_t lo) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_number_integer() && !v->is_number_unsigned()) throw ConfigError(key(k), "expected an integer");
    const long long x = v->get<long long>();
    if (x < static_cast<long long>(lo)) throw ConfigError(key(k), "must be >= " + std::to_string(lo));
    return static_cast<std::size_t>(x);
  }

  std::uint64_t seed(const std::string& k, std::uint64_t def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
      throw ConfigError(key(k), "expected a non-negative integer");
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& k, bool def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_boolean()) throw ConfigError(key(k), "expected true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& k, const std::string& def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_string()) throw ConfigError(key(k), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& k) {
    const json* v = find(k);
    if (!v) return {};
    if (!v->is_array()) throw ConfigError(key(k), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      if (!e.is_number() || !std::isfinite(e.get<double>()))
        throw ConfigError(key(k) + "[" + std::to_string(i) + "]", "expected a finite number");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Block sub(const std::string& k) {
    seen_.insert(k);
    return Block(j_.at(k), key(k));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(key(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

ScenarioConfig read_scenario(Block b) {
  ScenarioConfig s;
  const bool custom = b.has("hamiltonian");
  s.name = b.text("name", custom ? "custom" : "paper_example");
  const std::set<std::string> known = {"paper_example", "uncoupled", "transport", "custom"};
  require(known.count(s.name) > 0, b.key("name"),
          "unknown scenario '" + s.name + "' (paper_example, uncoupled, transport, custom)");
  if (s.name == "uncoupled") s.r0 = b.number("r0", s.r0);
  if (s.name == "transport") {
    const auto c = b.numbers("center");
    if (!c.empty()) {
      require(c.size() == 2, b.key("center"), "expected [R, P]");
      s.center = {c[0], c[1]};
    }
    s.sigma = b.number("sigma", s.sigma);
    require(s.sigma > 0.0, b.key("sigma"), "must be > 0");
  }
  if (s.name == "custom") {
    const json* h = b.find("hamiltonian");
    require(h && h->is_array() && h->size() == 4 &&
                std::all_of(h->begin(), h->end(), [](const json& e) { return e.is_string(); }),
            b.key("hamiltonian"), "expected four expression strings H_0..H_3");
    for (std::size_t i = 0; i < 4; ++i) {
      s.hamiltonian[i] = (*h)[i].get<std::string>();
      try {
        Expression::parse(s.hamiltonian[i]);
      } catch (const InvalidArgument& e) {
        throw ConfigError(b.key("hamiltonian") + "[" + std::to_string(i) + "]", e.what());
      }
    }
    require(b.has("density"), b.key("density"), "custom scenarios need a density block");
    Block d = b.sub("density");
    s.marginal = d.text("marginal", "");
    s.weight = d.text("weight", "1");
    s.angle = d.text("angle", "0");
    for (const auto& [k, v] : {std::pair{"marginal", &s.marginal}, {"weight", &s.weight}, {"angle", &s.angle}}) {
      try {
        Expression::parse(*v);
      } catch (const InvalidArgument& e) {
        throw ConfigError(d.key(k), e.what());
      }
    }
    d.finish();
    s.fd_step = b.number("fd_step", s.fd_step);
    require(s.fd_step > 0.0, b.key("fd_step"), "must be > 0");
  }
  b.finish();
  return s;
}

GridConfig read_grid(Block b) {
  GridConfig g;
  g.R_min = b.number("R_min", g.R_min);
  g.R_max = b.number("R_max", g.R_max);
  g.P_min = b.number("P_min", g.P_min);
  g.P_max = b.number("P_max", g.P_max);
  g.nR = b.count("nR", g.nR, 8);
  g.nP = b.count("nP", g.nP, 8);
  require(g.R_max > g.R_min, b.key("R_max"), "must exceed R_min");
  require(g.P_max > g.P_min, b.key("P_max"), "must exceed P_min");
  b.finish();
  return g;
}

IntegratorConfig read_integrator(Block b) {
  IntegratorConfig i;
  i.dt = b.number("dt", i.dt);
  i.t_end = b.number("t_end", i.t_end);
  require(i.dt > 0.0, b.key("dt"), "must be > 0");
  require(i.t_end >= 0.0, b.key("t_end"), "must be >= 0");
  b.finish();
  return i;
}

EnsembleConfig read_ensemble(Block b) {
  EnsembleConfig e;
  e.N = b.count("N", e.N, 2);
  e.seed = b.seed("seed", e.seed);
  e.bandwidth = b.number("bandwidth", e.bandwidth);
  require(e.bandwidth >= 0.0, b.key("bandwidth"), "must be >= 0 (0 selects Silverman's rule)");
  b.finish();
  return e;
}

ClosureSpec read_closure(Block b) {
  ClosureSpec c;
  const std::string m = b.text("method", "closed_form");
  if (m == "closed_form") {
    c.method = ClosureMethod::kClosedForm;
  } else if (m == "numeric") {
    c.method = ClosureMethod::kNumeric;
  } else {
    throw ConfigError(b.key("method"), "expected closed_form or numeric");
  }
  const std::string v = b.text("variant", "isotropic");
  if (v == "isotropic") {
    c.variant = ClosedFormVariant::kIsotropic;
  } else if (v == "literal") {
    c.variant = ClosedFormVariant::kLiteral;
  } else {
    throw ConfigError(b.key("variant"), "expected isotropic or literal");
  }
  if (const json* o = b.find("entropy_order")) {
    if (o->is_string() && o->get<std::string>() == "exact") {
      c.numeric.entropy_order = kExactEntropy;
    } else if (o->is_number_integer() && o->get<long long>() >= 1 && o->get<long long>() <= 1000) {
      c.numeric.entropy_order = static_cast<int>(o->get<long long>());
    } else {
      throw ConfigError(b.key("entropy_order"), "expected an integer in [1, 1000] or \"exact\"");
    }
  }
  c.numeric.tol = b.number("tol", c.numeric.tol);
  require(c.numeric.tol > 0.0, b.key("tol"), "must be > 0");
  c.numeric.max_iterations = static_cast<int>(b.count("max_iterations", c.numeric.max_iterations, 1));
  b.finish();
  return c;
}

OutputConfig read_output(Block b) {
  OutputConfig o;
  o.directory = b.text("directory", "");
  o.sample_times = b.numbers("sample_times");
  for (std::size_t i = 0; i < o.sample_times.size(); ++i)
    require(o.sample_times[i] >= 0.0, b.key("sample_times") + "[" + std::to_string(i) + "]", "must be >= 0");
  b.finish();
  return o;
}

Fig1Options read_fig1(Block b) {
  Fig1Options f;
  f.R_min = b.number("R_min", f.R_min);
  f.R_max = b.number("R_max", f.R_max);
  f.nR = b.count("nR", f.nR, 1);
  f.theta_min = b.number("theta_min", f.theta_min);
  f.theta_max = b.number("theta_max", f.theta_max);
  f.ntheta = b.count("ntheta", f.ntheta, 1);
  f.P_fixed = b.number("P_fixed", f.P_fixed);
  f.h = b.number("h", f.h);
  require(f.R_max >= f.R_min, b.key("R_max"), "must be >= R_min");
  require(f.theta_max >= f.theta_min, b.key("theta_max"), "must be >= theta_min");
  require(f.h > 0.0, b.key("h"), "must be > 0");
  b.finish();
  return f;
}

TrajectoryConfig read_trajectory(Block b) {
  TrajectoryConfig t;
  t.xi.R = b.number("R", t.xi.R);
  t.xi.P = b.number("P", t.xi.P);
  const auto n = b.numbers("bloch");
  if (!n.empty()) {
    require(n.size() == 3, b.key("bloch"), "expected [x, y, z]");
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    require(std::abs(len - 1.0) <= 1e-10, b.key("bloch"), "must be a unit vector");
    t.bloch = {n[0], n[1], n[2]};
  }
  t.stride = b.count("stride", t.stride, 1);
  b.finish();
  return t;
}

MaxentConfig read_maxent(Block b) {
  MaxentConfig m;
  if (const json* rows = b.find("first_moments")) {
    require(rows->is_array(), b.key("first_moments"), "expected an array of [mu0, mu1, mu2, mu3]");
    for (std::size_t i = 0; i < rows->size(); ++i) {
      const json& r = (*rows)[i];
      const std::string k = b.key("first_moments") + "[" + std::to_string(i) + "]";
      require(r.is_array() && r.size() == 4 &&
                  std::all_of(r.begin(), r.end(), [](const json& e) { return e.is_number(); }),
              k, "expected [mu0, mu1, mu2, mu3]");
      const PauliVector p{r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()};
      require(std::abs(p[0] - 0.5) <= 1e-10, k, "mu0 must be 1/2");
      require(purity(p) <= 0.5 + 1e-10, k, "purity exceeds 1/2 (outside the Bloch ball)");
      m.first_moments.push_back(p);
    }
  }
  m.random = b.count("random", 0, 0);
  require(!m.first_moments.empty() || m.random > 0, b.key("first_moments"),
          "give first_moments or a positive random count");
  b.finish();
  return m;
}

EvolutionConfig read_evolution(Block b) {
  EvolutionConfig e;
  const std::string s = b.text("stencil", "central2");
  if (s == "central2") {
    e.disc.stencil = Stencil::kCentral2;
  } else if (s == "central4") {
    e.disc.stencil = Stencil::kCentral4;
  } else if (s == "central4_one_sided") {
    e.disc.stencil = Stencil::kCentral4OneSided;
  } else {
    throw ConfigError(b.key("stencil"), "expected central2, central4 or central4_one_sided");
  }
  const std::string f = b.text("form", "conservative");
  if (f == "conservative") {
    e.disc.form = BracketForm::kConservative;
  } else if (f == "advective") {
    e.disc.form = BracketForm::kAdvective;
  } else {
    throw ConfigError(b.key("form"), "expected conservative or advective");
  }
  e.purity_projection = b.boolean("purity_projection", false);
  b.finish();
  return e;
}

RunConfig parse_tree(const json& root) {
  RunConfig c;
  Block top(root, "");
  if (top.has("scenario")) c.scenario = read_scenario(top.sub("scenario"));
  if (top.has("grid")) c.grid = read_grid(top.sub("grid"));
  if (top.has("integrator")) c.integrator = read_integrator(top.sub("integrator"));
  if (top.has("ensemble")) c.ensemble = read_ensemble(top.sub("ensemble"));
  if (top.has("closure")) c.closure = read_closure(top.sub("closure"));
  if (top.has("output")) c.output = read_output(top.sub("output"));
  if (top.has("fig1")) c.fig1 = read_fig1(top.sub("fig1"));
  if (top.has("trajectory")) c.trajectory = read_trajectory(top.sub("trajectory"));
  if (top.has("maxent")) c.maxent = read_maxent(top.sub("maxent"));
  if (top.has("evolution")) c.evolution = read_evolution(top.sub("evolution"));
  top.finish();
  c.canonical = root.dump();
  return c;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  if (root.is_object() && root.contains("manifest_version")) {
    if (!root.contains("config")) throw ConfigError("config", "manifest has no config member");
    root = root.at("config");
  }
  if (!root.is_object()) throw ConfigError("config", "top level must be an object");
  return parse_tree(root);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void override_seed(RunConfig& c, std::uint64_t seed) {
  json root = json::parse(c.canonical);
  if (c.ensemble) {
    c.ensemble->seed = seed;
    root["ensemble"]["seed"] = seed;
  }
  c.canonical = root.dump();
}

Scenario build_scenario(const ScenarioConfig& s) {
  if (s.name == "paper_example") return paper_scenario();
  if (s.name == "uncoupled") return uncoupled_scenario(s.r0);
  if (s.name == "transport") return transport_scenario(s.center, s.sigma);
  Scenario out{"custom", expression_hamiltonian(s.hamiltonian, s.fd_step),
               expression_density(s.marginal, s.weight, s.angle)};
  return out;
}

void require_blocks(const RunConfig& c, const std::string& sub) {
  auto need = [&](bool present, const char* key) {
    if (!present) throw ConfigError(key, "block required by '" + sub + "' is missing");
  };
  if (sub == "trajectory") {
    need(c.scenario.has_value(), "scenario");
    need(c.integrator.has_value(), "integrator");
    need(c.trajectory.has_value(), "trajectory");
  } else if (sub == "ensemble" || sub == "compare") {
    need(c.scenario.has_value(), "scenario");
    need(c.grid.has_value(), "grid");
    need(c.integrator.has_value(), "integrator");
    need(c.ensemble.has_value(), "ensemble");
  } else if (sub == "fig1") {
    need(c.scenario.has_value(), "scenario");
  } else if (sub == "maxent-check") {
    need(c.maxent.has_value(), "maxent");
  } else if (sub == "evolve-effective") {
    need(c.scenario.has_value(), "scenario");
    need(c.grid.has_value(), "grid");
    need(c.integrator.has_value(), "integrator");
  } else if (sub == "hierarchy-check") {
    need(c.scenario.has_value(), "scenario");
    need(c.grid.has_value(), "grid");
    need(c.ensemble.has_value(), "ensemble");
  } else {
    throw ConfigError("subcommand", "unknown subcommand '" + sub + "'");
  }
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hqc
