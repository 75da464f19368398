#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "vlab/bifurcation.hpp"
#include "vlab/cli.hpp"
#include "vlab/dynamics.hpp"
#include "vlab/equilibrium.hpp"
#include "vlab/errors.hpp"
#include "vlab/field.hpp"
#include "vlab/topology.hpp"

namespace py = pybind11;
using namespace vlab;

namespace {

StreetParams params(double a, double b, double h, double gamma, int n) {
  StreetParams p{a, b, h, gamma, n};
  p.validate();
  return p;
}

py::dict to_dict(const StagnationPoint& s) {
  py::dict d;
  d["position"] = s.position;
  d["kind"] = to_string(s.kind);
  d["psi"] = s.psi;
  d["residual"] = s.residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Staggered vortex-street arrays: fields, equilibria, topology, bifurcations, dynamics.";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<SingularPointError>(m, "SingularPointError", numerical.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", numerical.ptr());
  py::register_exception<CollisionError>(m, "CollisionError", numerical.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", numerical.ptr());
  py::register_exception<InvalidBracketError>(m, "InvalidBracketError", numerical.ptr());

  py::class_<StreetParams>(m, "StreetParams")
      .def(py::init(&params), py::arg("a") = 1.0, py::arg("b") = 0.2805, py::arg("h") = 1.2,
           py::arg("gamma") = 1.0, py::arg("big_n") = 150)
      .def_readwrite("a", &StreetParams::a)
      .def_readwrite("b", &StreetParams::b)
      .def_readwrite("h", &StreetParams::h)
      .def_readwrite("gamma", &StreetParams::gamma)
      .def_readwrite("big_n", &StreetParams::big_n)
      .def("__repr__", [](const StreetParams& p) {
        std::ostringstream os;
        os << "StreetParams(a=" << p.a << ", b=" << p.b << ", h=" << p.h << ", gamma=" << p.gamma
           << ", big_n=" << p.big_n << ")";
        return os.str();
      });

  m.def("array_potential", &array_potential, py::arg("z"), py::arg("params"));
  m.def("array_velocity", &array_velocity, py::arg("z"), py::arg("params"),
        "Conjugate velocity u - i v of the array at z.");
  m.def(
      "stream_function",
      [](py::array_t<double> x, py::array_t<double> y, const StreetParams& p, double u_frame) {
        return py::vectorize([&p, u_frame](double xi, double yi) {
          return relative_stream_function({xi, yi}, p, u_frame);
        })(x, y);
      },
      py::arg("x"), py::arg("y"), py::arg("params"), py::arg("u_frame") = 0.0,
      "Stream function in the frame moving at u_frame, broadcast over x and y.");

  m.def("street_speed", &street_speed, py::arg("params"));
  m.def("array_speed", [](const StreetParams& p) { return array_speed(p).u; }, py::arg("params"));
  m.def(
      "equilibrium_residual", [](const StreetParams& p) { return verify_equilibrium(p).residual; },
      py::arg("params"));

  m.def(
      "stagnation_points",
      [](const StreetParams& p, double y_min, double y_max) {
        py::list out;
        for (const auto& s : find_stagnation_points(p, y_min, y_max)) out.append(to_dict(s));
        return out;
      },
      py::arg("params"), py::arg("y_min"), py::arg("y_max"));
  m.def(
      "topology_class",
      [](const StreetParams& p) {
        TopologyClass t;
        {
          py::gil_scoped_release release;
          t = topology_class(p);
        }
        py::dict d;
        d["k"] = t.k;
        d["level_k"] = t.level_k;
        d["region_label"] = t.region_label;
        d["level_drift"] = t.levels.drift;
        return d;
      },
      py::arg("params"));

  m.def(
      "find_bifurcation",
      [](double b, int k, double lo, double hi) { return find_bifurcation(b, k, {lo, hi}).h; }, py::arg("b"),
      py::arg("k"), py::arg("h_lo"), py::arg("h_hi"));
  m.def(
      "bifurcation_sequence", [](double b, int k_max) { return bifurcation_sequence(b, k_max).h_values; },
      py::arg("b"), py::arg("k_max"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "fit_scaling",
      [](const std::vector<double>& h_values, std::pair<int, int> window) {
        if (h_values.empty()) throw ValidationError("empty sequence");
        const auto fit = fit_scaling(h_values, h_values.back(), window);
        py::dict d;
        d["h_inf_proxy"] = fit.h_inf_proxy;
        d["c"] = fit.c;
        d["delta"] = fit.delta;
        d["rms_residual"] = fit.rms_residual;
        return d;
      },
      py::arg("h_values"), py::arg("window") = kDefaultFitWindow,
      "Scaling fit with the last entry as the limit proxy.");

  m.def(
      "finite_array",
      [](const StreetParams& p, int n_streets, int per_row) {
        const auto set = build_finite_array(p, {n_streets, per_row});
        return py::make_tuple(set.positions, set.strengths);
      },
      py::arg("params"), py::arg("n_streets") = 11, py::arg("vortices_per_row") = 10);
  m.def(
      "evolve",
      [](const std::vector<Complex>& positions, const std::vector<double>& strengths, double t_end,
         const std::string& scheme, double dt, double tol) {
        VortexSet set{positions, strengths, std::vector<VortexLabel>(positions.size())};
        for (std::size_t k = 0; k < set.labels.size(); ++k) set.labels[k] = {static_cast<int>(2 * k), 0};
        IntegrateOptions opts;
        opts.scheme = parse_scheme(scheme);
        opts.dt = dt;
        opts.abs_tol = tol;
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = integrate({0.0, set}, t_end, opts);
        }
        const auto& q0 = traj.conserved.front();
        const auto& q1 = traj.conserved.back();
        py::dict d;
        d["positions"] = traj.last_state.vortices.positions;
        d["time"] = traj.last_state.time;
        d["completed"] = traj.completed;
        d["message"] = traj.message;
        d["hamiltonian"] = py::make_tuple(q0.hamiltonian, q1.hamiltonian);
        d["impulse"] = py::make_tuple(q0.impulse, q1.impulse);
        return d;
      },
      py::arg("positions"), py::arg("strengths"), py::arg("t_end"), py::arg("scheme") = "rk45-adaptive",
      py::arg("dt") = 1e-2, py::arg("tol") = 1e-10);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a vlab subcommand in process; returns (exit_code, stdout, stderr).");
}
