#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "funcbell/discrete.hpp"
#include "funcbell/functional.hpp"
#include "funcbell/lhv.hpp"
#include "funcbell/quantum.hpp"
#include "funcbell/simulate.hpp"
#include "funcbell/sphere.hpp"

namespace py = pybind11;
using namespace funcbell;

namespace {

py::dict report_dict(const InequalityReport& r) {
  py::dict d;
  d["geometry"] = to_string(r.geometry);
  d["v"] = r.v;
  d["quantum_value"] = r.quantum_value;
  d["lhv_bound"] = r.lhv_bound;
  d["lhv_best_found"] = r.lhv_best_found ? py::object(py::float_(*r.lhv_best_found)) : py::object(py::none());
  d["margin"] = r.margin;
  d["margin_ratio"] = r.margin_ratio;
  d["threshold_v"] = r.threshold_v;
  d["grid_order"] = py::make_tuple(r.grid_order.n_theta, r.grid_order.n_phi);
  d["quad_error_estimate"] = r.quad_error_estimate;
  d["violated"] = r.violated;
  return d;
}

SettingEnsemble quadrature_ensemble(int n_theta, int n_phi) {
  return SettingEnsemble::from_grid(build_grid(n_theta, n_phi));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Functional Bell inequality: quantum norms, LHV bounds, thresholds, finite settings, Monte Carlo.";

  m.attr("FULL_SPHERE_THRESHOLD") = thresholds::kFullSphere;
  m.attr("COPLANAR_THRESHOLD") = thresholds::kCoplanar;
  m.attr("GISIN_THRESHOLD") = thresholds::kGisin;
  m.attr("CHAINED_LIMIT") = thresholds::kChainedLimit;

  py::class_<Direction>(m, "Direction")
      .def(py::init<double, double>(), py::arg("theta"), py::arg("phi"))
      .def_property_readonly("theta", &Direction::theta)
      .def_property_readonly("phi", &Direction::phi)
      .def_property_readonly("cartesian", [](const Direction& d) {
        const auto& n = d.cartesian();
        return py::make_tuple(n[0], n[1], n[2]);
      })
      .def("__repr__", [](const Direction& d) {
        return "Direction(theta=" + std::to_string(d.theta()) + ", phi=" + std::to_string(d.phi()) + ")";
      });

  py::class_<QuadratureGrid>(m, "QuadratureGrid")
      .def_property_readonly("size", &QuadratureGrid::size)
      .def_property_readonly("label", &QuadratureGrid::label)
      .def_property_readonly("weights", &QuadratureGrid::weights)
      .def_property_readonly("nodes", &QuadratureGrid::nodes);

  m.def(
      "build_grid",
      [](int n_theta, int n_phi, const std::string& rule) {
        return build_grid(n_theta, n_phi, parse_quadrature_rule(rule));
      },
      py::arg("n_theta"), py::arg("n_phi"), py::arg("rule") = "split-gauss-legendre");

  m.def("p_qm", [](int m_a, int m_b, const Direction& a, const Direction& b, double v) {
    return p_qm(m_a, m_b, a, b, Visibility(v));
  }, py::arg("m"), py::arg("m_prime"), py::arg("a"), py::arg("b"), py::arg("v"));
  m.def("correlation_qm", [](const Direction& a, const Direction& b, double v) {
    return correlation_qm(a, b, Visibility(v));
  });
  m.def("norm_sq_qm_analytic", [](double v) { return norm_sq_qm_analytic(Visibility(v)); });
  m.def("norm_sq_qm_numeric", [](double v, const QuadratureGrid& g) { return norm_sq_qm_numeric(Visibility(v), g); });

  m.def("projection_norm_bound", &projection_norm_bound);
  m.def("project_hemisphere", [](const Direction& axis, const QuadratureGrid& g) {
    return project(ResponseStrategy::hemisphere(axis), g).alpha;
  });
  m.def("project_linear", [](const Direction& axis, const QuadratureGrid& g) {
    return project(ResponseStrategy::linear(axis), g).alpha;
  });
  m.def("lhv_bound_analytic", [](double v) { return lhv_bound_analytic(Visibility(v)); });
  m.def(
      "optimize_hemisphere_pair",
      [](double v, int n_theta, int n_phi, int budget, std::uint64_t seed) {
        const auto r = optimize_lhv(Visibility(v), StrategyFamily::hemisphere_pair(), build_grid(n_theta, n_phi),
                                    budget, seed);
        py::dict d;
        d["value"] = r.value;
        d["evaluations"] = r.evaluations;
        d["final_simplex_size"] = r.final_simplex_size;
        d["converged"] = r.converged;
        return d;
      },
      py::arg("v"), py::arg("n_theta") = 8, py::arg("n_phi") = 16, py::arg("budget") = 2000, py::arg("seed") = 1);

  m.def("threshold_visibility", [](const std::string& g) { return threshold_visibility(parse_geometry(g)); });
  m.def(
      "evaluate_inequality",
      [](const std::string& g, double v, int n_theta, int n_phi) {
        return report_dict(evaluate_inequality(parse_geometry(g), Visibility(v), {n_theta, n_phi}));
      },
      py::arg("geometry"), py::arg("v"), py::arg("n_theta") = 16, py::arg("n_phi") = 32);
  m.def(
      "evaluate_coplanar", [](double v, int n_phi) { return report_dict(evaluate_coplanar(Visibility(v), n_phi)); },
      py::arg("v"), py::arg("n_phi") = 64);

  m.def(
      "discrete_quantum_value",
      [](int n_theta, int n_phi, double v) {
        const auto e = quadrature_ensemble(n_theta, n_phi);
        return discrete_quantum_value(e, e, Visibility(v));
      },
      "Discrete quantum value on a quadrature ensemble used on both sides.");
  m.def(
      "discrete_lhv_max",
      [](int n_theta, int n_phi, double v) {
        const auto e = quadrature_ensemble(n_theta, n_phi);
        return discrete_lhv_max(e, e, Visibility(v), LhvMethod::alternating).value;
      },
      "Alternating-maximization LHV value on a quadrature ensemble used on both sides.");
  m.def(
      "discrete_threshold",
      [](int n_theta, int n_phi) {
        const auto e = quadrature_ensemble(n_theta, n_phi);
        return discrete_threshold(e, e).threshold;
      },
      "Threshold visibility on a quadrature ensemble (inf when nothing violates).");

  m.def(
      "simulate",
      [](const std::string& source, double source_v, double v_assumed, std::uint64_t n, std::uint64_t seed) {
        EventSource src = QuantumSource{Visibility(source_v)};
        if (source == "lhv") {
          src = LhvSource{LhvModel::single(ResponseStrategy::hemisphere(Direction(0, 0)),
                                           ResponseStrategy::hemisphere(Direction(3.141592653589793, 0)))};
        } else if (source != "quantum") {
          throw std::invalid_argument("source must be 'quantum' or 'lhv'");
        }
        const auto stream = generate_events(src, UniformSphereSampler{}, n, seed);
        const auto r = estimate_functional(stream, Visibility(v_assumed));
        py::dict d;
        d["n_events"] = r.n_events;
        d["functional_estimate"] = r.functional_estimate;
        d["std_error"] = r.std_error;
        d["lhv_bound"] = r.lhv_bound;
        d["significance"] = r.significance;
        d["verdict"] = to_string(r.verdict);
        return d;
      },
      py::arg("source") = "quantum", py::arg("source_v") = 1.0, py::arg("v_assumed") = 1.0, py::arg("n") = 100000,
      py::arg("seed") = 1);
}
