#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "quadnls/config.hpp"
#include "quadnls/io.hpp"
#include "quadnls/log.hpp"
#include "quadnls/plots.hpp"

namespace py = pybind11;
using namespace quadnls;

namespace {

PyObject* error_type = nullptr;

using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_numpy(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }
ComplexArray to_numpy(const RadialField& f) { return ComplexArray(f.size(), f.values.data()); }

RadialField from_numpy(const Grid& g, const ComplexArray& a, const char* name) {
  if (a.ndim() != 1 || a.shape(0) != g->nodes)
    throw Error(ErrorKind::GridMismatch, std::string(name) + " must be a 1-d array with one sample per node");
  return RadialField(g, std::vector<Complex>(a.data(), a.data() + a.size()));
}

// Reports travel as the same JSON documents the CLI writes.
py::object as_python(const Json& doc) { return py::module_::import("json").attr("loads")(doc.dump()); }

EvolveConfig evolve_config(const py::dict& kw) {
  EvolveConfig c;
  for (const auto& [key, value] : kw) {
    const auto k = key.cast<std::string>();
    if (k == "kappa") c.kappa = value.cast<double>();
    else if (k == "t_max") c.t_max = value.cast<double>();
    else if (k == "dt_init") c.dt_init = value.cast<double>();
    else if (k == "dt_min") c.dt_min = value.cast<double>();
    else if (k == "cfl_safety") c.cfl_safety = value.cast<double>();
    else if (k == "blowup_kinetic_ratio") c.blowup_kinetic_ratio = value.cast<double>();
    else if (k == "sponge_enabled") c.sponge_enabled = value.cast<bool>();
    else if (k == "sponge_width") c.sponge_width = value.cast<double>();
    else if (k == "sample_every") c.sample_every = value.cast<int>();
    else throw Error(ErrorKind::Config, "unknown evolve option " + k);
  }
  return c;
}

GroundStateConfig ground_config(double omega, const Grid& grid, int max_iters, double residual_tol) {
  GroundStateConfig c;
  c.omega = omega;
  c.grid = grid;
  c.max_iters = max_iters;
  c.residual_tol = residual_tol;
  return c;
}

py::dict trace_columns(const EvolutionTrace& tr) {
  std::vector<double> cols[9];
  for (const auto& r : tr.rows) {
    const double row[9] = {r.t, r.dt, r.mass, r.energy, r.kinetic, r.interaction, r.virial_q, r.second_moment,
                           r.max_amplitude};
    for (int k = 0; k < 9; ++k) cols[k].push_back(row[k]);
  }
  static const char* names[9] = {"t", "dt", "mass", "energy", "kinetic", "interaction", "virial_q", "second_moment",
                                 "max_amplitude"};
  py::dict d;
  for (int k = 0; k < 9; ++k) d[names[k]] = to_numpy(cols[k]);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Radial ground states and dynamics of a quadratic two-component Schrodinger system";
  configure_logging();

  // the module keeps the type alive, so a borrowed pointer is enough here
  error_type = py::exception<Error>(m, "QuadnlsError", PyExc_RuntimeError).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::class_<GridSpec, std::shared_ptr<GridSpec>>(m, "Grid")
      .def(py::init([](int dim, double radius, int nodes) {
             return std::const_pointer_cast<GridSpec>(make_grid(dim, radius, nodes));
           }),
           py::arg("dim") = 5, py::arg("radius") = 30.0, py::arg("nodes") = 4096)
      .def_readonly("dim", &GridSpec::dim)
      .def_readonly("radius", &GridSpec::radius)
      .def_readonly("nodes", &GridSpec::nodes)
      .def_readonly("spacing", &GridSpec::spacing)
      .def_property_readonly("r", [](const GridSpec& g) { return to_numpy(g.r); })
      .def_property_readonly("weight", [](const GridSpec& g) { return to_numpy(g.weight); })
      .def("integrate", [](const GridSpec& g, py::array_t<double, py::array::c_style | py::array::forcecast> f) {
        return integrate(g, std::span<const double>(f.data(), f.size()));
      });

  py::class_<PairState>(m, "PairState")
      .def(py::init([](std::shared_ptr<GridSpec> g, const ComplexArray& u, const ComplexArray& v) {
             const Grid grid = g;
             return PairState(from_numpy(grid, u, "u"), from_numpy(grid, v, "v"));
           }),
           py::arg("grid"), py::arg("u"), py::arg("v"))
      .def_property_readonly("grid", [](const PairState& s) { return std::const_pointer_cast<GridSpec>(s.grid()); })
      .def_property_readonly("u", [](const PairState& s) { return to_numpy(s.u); })
      .def_property_readonly("v", [](const PairState& s) { return to_numpy(s.v); });

  py::class_<GroundStateResult>(m, "GroundState")
      .def_readonly("state", &GroundStateResult::state)
      .def_readonly("omega", &GroundStateResult::omega)
      .def_readonly("d_omega", &GroundStateResult::d_omega)
      .def_readonly("residual", &GroundStateResult::residual)
      .def_readonly("iterations", &GroundStateResult::iterations)
      .def_property_readonly("pohozaev", [](const GroundStateResult& r) {
        return py::dict(py::arg("kinetic") = r.pohozaev.kinetic, py::arg("mass") = r.pohozaev.mass,
                        py::arg("combined") = r.pohozaev.combined);
      })
      .def("to_dict", [](const GroundStateResult& r) { return as_python(to_json(r)); });

  m.def("report", [](const PairState& s, double omega) {
    const auto f = report(s, omega);
    return py::dict(py::arg("mass") = f.mass, py::arg("kinetic") = f.kinetic, py::arg("interaction") = f.interaction,
                    py::arg("energy") = f.energy, py::arg("action") = f.action, py::arg("nehari") = f.nehari,
                    py::arg("h_omega") = f.h_omega, py::arg("virial_q") = f.virial_q);
  }, py::arg("state"), py::arg("omega") = 1.0, "Conserved and variational functionals of a state.");
  m.def("scale", &scale, py::arg("state"), py::arg("gamma"), "Mass-invariant dilation.");
  m.def("nehari_project", [](const PairState& s, double omega) { return nehari_project(s, omega).state; },
        py::arg("state"), py::arg("omega") = 1.0);
  m.def("second_moment", &second_moment);

  m.def("solve_ground_state",
        [](double omega, std::shared_ptr<GridSpec> grid, int max_iters, double residual_tol) {
          py::gil_scoped_release release;
          return solve_ground_state(ground_config(omega, grid ? Grid(grid) : make_grid(5, 30.0, 4096), max_iters,
                                                  residual_tol));
        },
        py::arg("omega") = 1.0, py::arg("grid") = nullptr, py::arg("max_iters") = 50000,
        py::arg("residual_tol") = 1e-10);
  m.def("certify_ground_state",
        [](double omega, std::shared_ptr<GridSpec> grid, int trials) {
          CertificationReport rep;
          {
            py::gil_scoped_release release;
            rep = certify_ground_state(ground_config(omega, grid ? Grid(grid) : make_grid(5, 30.0, 4096), 50000,
                                                     1e-10),
                                       20240517, trials);
          }
          return as_python(to_json(rep));
        },
        py::arg("omega") = 1.0, py::arg("grid") = nullptr, py::arg("trials") = 20,
        "Solve and verify; returns the certification document as a dict.");

  m.def("evolve",
        [](const PairState& s, const py::kwargs& kw) {
          const auto cfg = evolve_config(kw);
          EvolveResult run;
          {
            py::gil_scoped_release release;
            run = evolve(s, cfg);
          }
          const auto& o = run.trace.outcome;
          py::dict outcome(py::arg("kind") = to_string(o.kind),
                           py::arg("t_star") = o.kind == OutcomeKind::BlowupDetected ? py::cast(o.t_star) : py::none(),
                           py::arg("reason") = o.kind == OutcomeKind::Aborted ? py::cast(o.reason) : py::none());
          py::dict trace = trace_columns(run.trace);
          double virial = std::nan("");
          if (o.kind == OutcomeKind::Completed && run.trace.rows.size() >= 5) virial = virial_residual(run.trace);
          return py::dict(py::arg("state") = run.state, py::arg("trace") = trace, py::arg("outcome") = outcome,
                          py::arg("steps") = run.trace.steps, py::arg("virial_residual") = virial,
                          py::arg("trace_csv") = trace_csv(run.trace));
        },
        py::arg("state"),
        "Evolve a state; keyword options as in the [evolve] config section. Returns state, trace columns and outcome.");
  m.def("standing_wave_error", &standing_wave_error, py::arg("state"), py::arg("ground"), py::arg("t"));

  m.def("run_omega_study",
        [](const std::vector<double>& omegas, std::shared_ptr<GridSpec> grid) {
          OmegaStudyReport rep;
          {
            py::gil_scoped_release release;
            rep = run_omega_study(omegas, ground_config(1.0, grid ? Grid(grid) : make_grid(5, 30.0, 4096), 50000, 1e-10));
          }
          return as_python(to_json(rep));
        },
        py::arg("omegas"), py::arg("grid") = nullptr);
  m.def("run_instability",
        [](const std::vector<double>& gammas, double horizon, double omega, std::shared_ptr<GridSpec> grid,
           int sample_every) {
          InstabilityReport rep;
          {
            py::gil_scoped_release release;
            EvolveConfig ecfg;
            ecfg.sample_every = sample_every;
            rep = run_instability(omega, gammas, horizon,
                                  ground_config(omega, grid ? Grid(grid) : make_grid(5, 30.0, 4096), 50000, 1e-10), ecfg);
          }
          return as_python(to_json(rep));
        },
        py::arg("gammas"), py::arg("horizon") = 20.0, py::arg("omega") = 1.0, py::arg("grid") = nullptr,
        py::arg("sample_every") = 10);

  m.def("default_config", [] { return serialize_config(CliConfig{}); }, "Default configuration file text.");
  m.def("normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
        "Parse and validate config text, returning it with every key spelled out.");
  m.def("emit_plot_script", [](const std::string& path) {
    std::vector<std::string> out;
    for (const auto& p : emit_plot_script(path)) out.push_back(p.string());
    return out;
  });
  m.attr("__version__") = QUADNLS_VERSION;
}
