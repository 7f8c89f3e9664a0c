// Python bindings. Node fields come back as numpy arrays shaped (nR, nP, ...).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hqc/config.hpp"
#include "hqc/ehrenfest.hpp"
#include "hqc/ensemble.hpp"
#include "hqc/errors.hpp"
#include "hqc/evolution.hpp"
#include "hqc/hierarchy.hpp"
#include "hqc/maxent.hpp"
#include "hqc/moments.hpp"
#include "hqc/parallel.hpp"
#include "hqc/run.hpp"

namespace py = pybind11;
using namespace hqc;

namespace {

py::array_t<double> node_array(const PhaseGrid& g, std::vector<py::ssize_t> tail) {
  std::vector<py::ssize_t> shape = {static_cast<py::ssize_t>(g.nR()), static_cast<py::ssize_t>(g.nP())};
  shape.insert(shape.end(), tail.begin(), tail.end());
  return py::array_t<double>(shape);
}

py::array_t<double> F_array(const MomentField& f) {
  auto a = node_array(f.grid, {});
  std::copy(f.F.begin(), f.F.end(), a.mutable_data());
  return a;
}

py::array_t<double> first_array(const MomentField& f) {
  if (f.order < 1) throw InvalidArgument("field carries no first moments");
  auto a = node_array(f.grid, {4});
  double* p = a.mutable_data();
  for (const auto& v : f.first)
    for (std::size_t j = 0; j < 4; ++j) *p++ = v[j];
  return a;
}

py::array_t<double> second_array(const MomentField& f) {
  if (f.order < 2) throw InvalidArgument("field carries no second moments");
  auto a = node_array(f.grid, {4, 4});
  double* p = a.mutable_data();
  for (const auto& t : f.second)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) *p++ = t(i, j);
  return a;
}

py::array_t<double> two_body_matrix(const SymmetricTwoBody& t) {
  py::array_t<double> a({4, 4});
  auto m = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = t(i, j);
  return a;
}

PauliVector pauli(const std::array<double, 4>& v) { return {v[0], v[1], v[2], v[3]}; }
std::array<double, 4> arr(const PauliVector& v) { return v.mu; }

ClosureSpec closure_spec(const std::string& method, const std::string& variant, py::object order) {
  ClosureSpec c;
  if (method == "closed_form") c.method = ClosureMethod::kClosedForm;
  else if (method == "numeric") c.method = ClosureMethod::kNumeric;
  else throw InvalidArgument("method must be 'closed_form' or 'numeric'");
  if (variant == "isotropic") c.variant = ClosedFormVariant::kIsotropic;
  else if (variant == "literal") c.variant = ClosedFormVariant::kLiteral;
  else throw InvalidArgument("variant must be 'isotropic' or 'literal'");
  if (py::isinstance<py::str>(order)) {
    if (order.cast<std::string>() != "exact") throw InvalidArgument("entropy_order must be an int or 'exact'");
    c.numeric.entropy_order = kExactEntropy;
  } else {
    c.numeric.entropy_order = order.cast<int>();
  }
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hybrid quantum-classical moment hierarchy";
  m.attr("__version__") = library_version();

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("set_threads", &set_thread_count, py::arg("n"));
  m.def("set_reproducible", &set_reproducible, py::arg("on"));

  // Pauli algebra
  m.def("commutator", [](std::array<double, 4> a, std::array<double, 4> b) {
    return arr(commutator_coords(pauli(a), pauli(b)));
  });
  m.def("purity", [](std::array<double, 4> r) { return purity(pauli(r)); });
  m.def("von_neumann_entropy", [](py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw InvalidArgument("expected a square matrix");
    Eigen::MatrixXcd M(a.shape(0), a.shape(1));
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
      for (py::ssize_t j = 0; j < a.shape(1); ++j) M(i, j) = a.at(i, j);
    return von_neumann_entropy(M);
  });

  py::class_<PhaseGrid>(m, "PhaseGrid")
      .def(py::init<double, double, double, double, std::size_t, std::size_t>(), py::arg("R_min"),
           py::arg("R_max"), py::arg("P_min"), py::arg("P_max"), py::arg("nR"), py::arg("nP"))
      .def_property_readonly("nR", &PhaseGrid::nR)
      .def_property_readonly("nP", &PhaseGrid::nP)
      .def_property_readonly("R", [](const PhaseGrid& g) {
        py::array_t<double> a(static_cast<py::ssize_t>(g.nR()));
        for (std::size_t i = 0; i < g.nR(); ++i) a.mutable_at(i) = g.R(i);
        return a;
      })
      .def_property_readonly("P", [](const PhaseGrid& g) {
        py::array_t<double> a(static_cast<py::ssize_t>(g.nP()));
        for (std::size_t i = 0; i < g.nP(); ++i) a.mutable_at(i) = g.P(i);
        return a;
      });

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def("hamiltonian", [](const Scenario& s, double R, double P) { return arr(s.H({R, P})); })
      .def("marginal", [](const Scenario& s, double R, double P) { return s.density.marginal({R, P}); });
  m.def(
      "scenario",
      [](const std::string& name, double r0, std::array<double, 2> center, double sigma) {
        ScenarioConfig c;
        c.name = name;
        c.r0 = r0;
        c.center = {center[0], center[1]};
        c.sigma = sigma;
        if (name != "paper_example" && name != "uncoupled" && name != "transport")
          throw InvalidArgument("unknown scenario '" + name + "'");
        return build_scenario(c);
      },
      py::arg("name") = "paper_example", py::arg("r0") = 1.0, py::arg("center") = std::array<double, 2>{1.0, 0.0},
      py::arg("sigma") = 1.0);

  py::class_<MomentField>(m, "MomentField")
      .def_readonly("order", &MomentField::order)
      .def_readonly("grid", &MomentField::grid)
      .def_property_readonly("F", &F_array)
      .def_property_readonly("first", &first_array)
      .def_property_readonly("second", &second_array);
  m.def(
      "mixture_moments",
      [](const Scenario& s, const PhaseGrid& g, int order) { return mixture_moment_field(s.density, g, order); },
      py::arg("scenario"), py::arg("grid"), py::arg("order") = 1);

  m.def(
      "trajectory",
      [](const Scenario& s, double R, double P, std::array<double, 3> bloch, double t_end, double dt,
         std::size_t stride) {
        const Trajectory tr =
            integrate_trajectory(Microstate({R, P}, PureBlochState(Vec3{bloch[0], bloch[1], bloch[2]})), s.H, t_end,
                                 dt, {stride});
        const auto n = static_cast<py::ssize_t>(tr.samples.size());
        py::array_t<double> t(n), r(n), p(n), e(n), b({n, py::ssize_t{3}});
        auto bb = b.mutable_unchecked<2>();
        for (py::ssize_t i = 0; i < n; ++i) {
          const auto& x = tr.samples[static_cast<std::size_t>(i)];
          t.mutable_at(i) = x.t;
          r.mutable_at(i) = x.R;
          p.mutable_at(i) = x.P;
          e.mutable_at(i) = x.f_H;
          for (int k = 0; k < 3; ++k) bb(i, k) = x.n[k];
        }
        py::dict d;
        d["t"] = t;
        d["R"] = r;
        d["P"] = p;
        d["bloch"] = b;
        d["energy"] = e;
        d["max_norm_drift"] = tr.max_norm_drift;
        d["aborted"] = tr.aborted;
        d["message"] = tr.message;
        return d;
      },
      py::arg("scenario"), py::arg("R"), py::arg("P"), py::arg("bloch"), py::arg("t_end"), py::arg("dt") = 1e-3,
      py::arg("stride") = 1);

  py::class_<Ensemble>(m, "Ensemble")
      .def("__len__", &Ensemble::size)
      .def_property_readonly("weights", [](const Ensemble& e) {
        py::array_t<double> w(static_cast<py::ssize_t>(e.size()));
        for (std::size_t i = 0; i < e.size(); ++i) w.mutable_at(i) = e.members[i].w;
        return w;
      })
      .def_property_readonly("states", [](const Ensemble& e) {
        // columns R, P, n1, n2, n3
        py::array_t<double> a({static_cast<py::ssize_t>(e.size()), py::ssize_t{5}});
        auto v = a.mutable_unchecked<2>();
        for (std::size_t i = 0; i < e.size(); ++i) {
          const Microstate& s = e.members[i].state;
          v(i, 0) = s.xi.R;
          v(i, 1) = s.xi.P;
          for (int k = 0; k < 3; ++k) v(i, 2 + k) = s.n[k];
        }
        return a;
      });
  m.def(
      "sample_ensemble",
      [](const Scenario& s, std::size_t N, std::uint64_t seed) { return sample_initial(s.density, N, seed, s.name); },
      py::arg("scenario"), py::arg("N"), py::arg("seed") = 0);
  m.def(
      "propagate", [](const Ensemble& e, const Scenario& s, double t, double dt) { return propagate(e, s.H, t, dt); },
      py::arg("ensemble"), py::arg("scenario"), py::arg("t"), py::arg("dt") = 1e-3,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "estimate_moments",
      [](const Ensemble& e, const PhaseGrid& g, int k, double bandwidth) {
        return estimate_moment_field(e, g, k, bandwidth);
      },
      py::arg("ensemble"), py::arg("grid"), py::arg("order") = 1, py::arg("bandwidth") = 0.0,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "ensemble_average",
      [](const Ensemble& e, const Scenario& s, const std::string& name) {
        for (const auto& o : standard_observables(s.H))
          if (o.name == name) {
            const Estimate est = ensemble_average(o.A, e);
            return py::make_tuple(est.value, est.standard_error);
          }
        throw InvalidArgument("unknown observable '" + name + "'");
      },
      py::arg("ensemble"), py::arg("scenario"), py::arg("observable"));

  m.def(
      "closure",
      [](std::array<double, 4> first, const std::string& method, const std::string& variant, py::object order) {
        const ClosureSpec c = closure_spec(method, variant, order);
        const ClosureResult r = c.method == ClosureMethod::kNumeric ? closure_numeric(pauli(first), c.numeric)
                                                                    : closure_closed_form(pauli(first), c.variant);
        py::dict d;
        d["second"] = two_body_matrix(r.second);
        d["entropy"] = r.entropy_value;
        d["converged"] = r.converged;
        d["iterations"] = r.iterations;
        d["feasible"] = r.residuals.feasible(1e-10);
        return d;
      },
      py::arg("first"), py::arg("method") = "closed_form", py::arg("variant") = "isotropic",
      py::arg("entropy_order") = 1);

  m.def(
      "fig1_scan",
      [](const Scenario& s, double P_fixed, std::size_t nR, std::size_t ntheta) {
        Fig1Options o;
        o.P_fixed = P_fixed;
        o.nR = nR;
        o.ntheta = ntheta;
        const auto rows = fig1_scan(s.density, s.H, o);
        py::array_t<double> a({static_cast<py::ssize_t>(rows.size()), py::ssize_t{4}});
        auto v = a.mutable_unchecked<2>();
        for (std::size_t i = 0; i < rows.size(); ++i) {
          v(i, 0) = rows[i].R;
          v(i, 1) = rows[i].theta;
          v(i, 2) = rows[i].dmu1;
          v(i, 3) = rows[i].dmu3;
        }
        return a;
      },
      py::arg("scenario"), py::arg("P_fixed") = 0.0, py::arg("nR") = 121, py::arg("ntheta") = 121);

  m.def(
      "evolve_effective",
      [](const MomentField& initial, const Scenario& s, double t_end, double dt, std::vector<double> sample_times,
         const std::string& method, py::object order) {
        EvolutionOptions o;
        o.t_end = t_end;
        o.dt = dt;
        o.sample_times = std::move(sample_times);
        o.closure = closure_spec(method, "isotropic", order);
        EvolutionResult r;
        {
          py::gil_scoped_release release;
          r = evolve_effective(initial, s.H, o);
        }
        py::list snaps;
        for (const auto& x : r.snapshots) snaps.append(py::make_tuple(x.t, x.field));
        py::dict d;
        d["snapshots"] = snaps;
        d["steps"] = r.steps;
        d["max_probability_drift"] = r.max_probability_drift;
        d["max_positivity_fraction"] = r.max_positivity_fraction;
        d["warnings"] = r.warnings;
        d["aborted"] = r.aborted;
        d["message"] = r.message;
        return d;
      },
      py::arg("initial"), py::arg("scenario"), py::arg("t_end") = 1.0, py::arg("dt") = 1e-3,
      py::arg("sample_times") = std::vector<double>{}, py::arg("closure") = "closed_form",
      py::arg("entropy_order") = 1);

  m.def(
      "run",
      [](const std::string& subcommand, const std::string& config, const std::string& out,
         std::optional<std::uint64_t> seed, int threads, bool reproducible) {
        RunOptions o;
        o.subcommand = subcommand;
        o.config_path = config;
        o.out_dir = out;
        o.seed = seed;
        o.threads = threads;
        o.reproducible = reproducible;
        std::ostringstream log, err;
        const int status = run(o, log, err);
        return py::make_tuple(status, log.str(), err.str());
      },
      py::arg("subcommand"), py::arg("config"), py::arg("out") = "", py::arg("seed") = py::none(),
      py::arg("threads") = 0, py::arg("reproducible") = false);
}
