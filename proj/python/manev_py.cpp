#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "manev/coords.hpp"
#include "manev/dynamics.hpp"
#include "manev/error.hpp"
#include "manev/homographic.hpp"
#include "manev/manifold.hpp"
#include "manev/potentials.hpp"
#include "manev/report.hpp"

namespace py = pybind11;
using namespace manev;

namespace {

// Reports are built as JSON on the C++ side and handed over as dicts.
py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

PhysicalParams params(double G, double M, double m, double gamma0, double gamma) {
  return validate(RawParams{G, M, m, gamma0, gamma});
}

#define MANEV_PARAM_ARGS                                                                              \
  py::arg("G") = 1.0, py::arg("M") = 10.0, py::arg("m") = 1.0, py::arg("gamma0") = 1.0, \
      py::arg("gamma") = 3.0

}  // namespace

PYBIND11_MODULE(_manev, m) {
  m.doc() = "Manev isosceles three-body problem: collision manifold, equilibria, homographic motion.";

  static py::exception<Error> manev_error(m, "ManevError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = manev_error;
      py::object inst = exc(std::string(to_string(e.kind())) + ": " + e.what());
      inst.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(manev_error.ptr(), inst.ptr());
    }
  });

  m.def(
      "params",
      [](double G, double M, double m_, double g0, double g) { return to_py(report::params_json(params(G, M, m_, g0, g))); },
      MANEV_PARAM_ARGS, "Validated parameters with the derived mass ratio mu.");

  m.def(
      "potentials",
      [](double theta, double G, double M, double m_, double g0, double g) {
        const auto e = eval_potentials(params(G, M, m_, g0, g), theta);
        py::dict d;
        d["theta"] = e.theta;
        d["V"] = e.V;
        d["W"] = e.W;
        d["U"] = e.U;
        d["dV"] = e.dV;
        d["dW"] = e.dW;
        d["dU"] = e.dU;
        return d;
      },
      py::arg("theta"), MANEV_PARAM_ARGS);

  m.def(
      "critical_points",
      [](double G, double M, double m_, double g0, double g) {
        const auto c = critical_points(params(G, M, m_, g0, g));
        py::dict d;
        d["theta_v"] = c.theta_v;
        d["theta_w"] = c.theta_w;
        d["u_min"] = c.u_min;
        d["u_max"] = c.u_max;
        return d;
      },
      MANEV_PARAM_ARGS);

  m.def(
      "to_mcgehee",
      [](double R, double Z, double P_R, double P_Z, double C, double G, double M, double m_, double g0, double g) {
        return to_py(report::to_json(to_mcgehee(params(G, M, m_, g0, g), CylState{R, Z, P_R, P_Z, C})));
      },
      py::arg("R"), py::arg("Z"), py::arg("P_R"), py::arg("P_Z"), py::arg("C") = 0.0, MANEV_PARAM_ARGS);

  m.def(
      "from_mcgehee",
      [](double r, double v, double theta, double w, double C, double G, double M, double m_, double g0, double g) {
        McGeheeState s;
        s.r = r;
        s.v = v;
        s.theta = theta;
        s.w = w;
        return to_py(report::to_json(from_mcgehee(params(G, M, m_, g0, g), s, C)));
      },
      py::arg("r"), py::arg("v"), py::arg("theta"), py::arg("w"), py::arg("C") = 0.0, MANEV_PARAM_ARGS);

  m.def(
      "reduced_energy",
      [](double R, double Z, double P_R, double P_Z, double C, double G, double M, double m_, double g0, double g) {
        return reduced_energy(params(G, M, m_, g0, g), CylState{R, Z, P_R, P_Z, C});
      },
      py::arg("R"), py::arg("Z"), py::arg("P_R"), py::arg("P_Z"), py::arg("C") = 0.0, MANEV_PARAM_ARGS);

  m.def(
      "classify",
      [](double C, double G, double M, double m_, double g0, double g) {
        return to_py(report::to_json(classify(params(G, M, m_, g0, g), C)));
      },
      py::arg("C") = 0.0, MANEV_PARAM_ARGS);

  m.def(
      "equilibria",
      [](double C, double h, double G, double M, double m_, double g0, double g) {
        const auto p = params(G, M, m_, g0, g);
        nlohmann::json list = nlohmann::json::array();
        for (const auto& e : equilibria(p, C)) {
          list.push_back(report::to_json(e.kind == EquilibriumKind::BoundaryLine ? e : restricted_spectrum(p, e, h, C)));
        }
        return to_py(list);
      },
      py::arg("C") = 0.0, py::arg("h") = -1.0, MANEV_PARAM_ARGS);

  m.def(
      "section",
      [](double v0, double C, int n, double G, double M, double m_, double g0, double g) {
        std::vector<std::pair<double, double>> out;
        for (const auto& s : section_curve(params(G, M, m_, g0, g), v0, C, n)) out.emplace_back(s.theta, s.w);
        return out;
      },
      py::arg("v0"), py::arg("C") = 0.0, py::arg("n") = 400, MANEV_PARAM_ARGS);

  m.def(
      "homographic",
      [](double h, double C, std::optional<double> r_start, double G, double M, double m_, double g0, double g) {
        return to_py(report::to_json(analyze(params(G, M, m_, g0, g), h, C, r_start)));
      },
      py::arg("h") = -1.0, py::arg("C") = 0.0, py::arg("r_start") = py::none(), MANEV_PARAM_ARGS);

  m.def(
      "integrate",
      [](const std::string& field, std::vector<double> start, double h, double C, double sigma_max, double G,
         double M, double m_, double g0, double g) {
        const auto kind = parse_field_kind(field);
        if (!kind || *kind == FieldKind::Cylindrical) throw py::value_error("unknown or unsupported field '" + field + "'");
        if (start.size() != 4) throw py::value_error("start must be (r, v, theta, w)");
        McGeheeState s;
        s.r = start[0];
        s.v = start[1];
        s.theta = start[2];
        s.w = start[3];
        const auto traj = integrate(params(G, M, m_, g0, g), *kind, s, h, C, {}, sigma_max);
        py::dict d;
        std::vector<double> sigma, r, v, theta, w, residual;
        for (const auto& smp : traj.samples) {
          sigma.push_back(smp.sigma);
          r.push_back(smp.state.r);
          v.push_back(smp.state.v);
          theta.push_back(smp.state.theta);
          w.push_back(smp.state.w);
          residual.push_back(smp.residual);
        }
        d["sigma"] = sigma;
        d["r"] = r;
        d["v"] = v;
        d["theta"] = theta;
        d["w"] = w;
        d["residual"] = residual;
        d["termination"] = std::string(to_string(traj.termination));
        d["max_residual"] = traj.max_residual;
        return d;
      },
      py::arg("field"), py::arg("start"), py::arg("h") = -1.0, py::arg("C") = 0.0, py::arg("sigma_max") = 5.0,
      MANEV_PARAM_ARGS);
}
