// Python bindings for the isodyn core.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "isodyn/analysis.hpp"
#include "isodyn/commands.hpp"
#include "isodyn/conservation.hpp"
#include "isodyn/errors.hpp"
#include "isodyn/kaluza_klein.hpp"

namespace py = pybind11;
using namespace isodyn;

namespace {

// Trajectory samples as an (n, 10) array: t, x, pi, Q.
Eigen::MatrixXd samplesArray(const Trajectory& traj) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(traj.samples.size()), 10);
  for (Eigen::Index k = 0; k < out.rows(); ++k) {
    const auto& s = traj.samples[static_cast<std::size_t>(k)];
    out.row(k) << s.t, s.x.transpose(), s.pi.transpose(), s.Q.transpose();
  }
  return out;
}

py::object toPython(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kerner-Wong dynamics of isospin particles in static gauge fields";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<SingularPoint>(m, "SingularPoint", PyExc_ArithmeticError);
  py::register_exception<DegenerateCharge>(m, "DegenerateCharge", PyExc_ArithmeticError);

  // su(2) / SU(2)
  m.def("bracket", &su2::bracket, "Lie bracket in su(2) (cross product)");
  m.def("inner", &su2::inner, "Trace metric (dot product)");
  m.def("exp_rotation", [](const Vec3& a) { return su2::expMap(a).rotation(); },
        "Adjoint matrix of expMap(a): rotation about a by |a|");
  m.def("adjoint", [](const Vec3& phi, const Vec3& a) { return su2::adjoint(su2::expMap(phi), a); },
        py::arg("phi"), py::arg("a"), "adjoint(expMap(phi), a)");

  // Gauge fields
  py::class_<GaugeFunction>(m, "GaugeFunction")
      .def_static("identity", &GaugeFunction::identity)
      .def_static("constant", &GaugeFunction::constant)
      .def_static("fixed_axis", &GaugeFunction::fixedAxis, py::arg("axis"), py::arg("gradient"),
                  py::arg("curvature") = 0.0)
      .def_static("random", &GaugeFunction::random, py::arg("seed"), py::arg("amplitude") = 0.3)
      .def_property_readonly("name", &GaugeFunction::name)
      .def("rotation", &GaugeFunction::rotation)
      .def("connection", &GaugeFunction::connection);

  py::class_<GaugeField>(m, "GaugeField")
      .def_static("vacuum", &GaugeField::vacuum)
      .def_static("wu_yang", &GaugeField::wuYang)
      .def_static("diatomic", &GaugeField::diatomic, py::arg("kappa"))
      .def_static("pure_gauge", &GaugeField::pureGauge)
      .def_static("dirac_monopole", &GaugeField::diracMonopole, py::arg("strength") = 1.0)
      .def_static("uniform_magnetic", &GaugeField::uniformMagnetic, py::arg("strength") = 1.0)
      .def("transformed", &GaugeField::transformed)
      .def_property_readonly("name", &GaugeField::name)
      .def_property_readonly("kappa", &GaugeField::kappa)
      .def("potential", &GaugeField::potentialAt, "A(i, a) = A_i^a")
      .def("field_strength",
           [](const GaugeField& f, const Vec3& x) {
             const FieldStrength s = f.fieldStrengthAt(x);
             return std::vector<Mat3>(s.component.begin(), s.component.end());
           },
           "[F^1, F^2, F^3] with F^a(i, j) = F_ij^a")
      .def("magnetic_field", &GaugeField::magneticFieldAt)
      .def("radial_charge", &GaugeField::radialCharge);

  m.def("check_f_from_a", &checkFfromA, py::arg("field"), py::arg("x"), py::arg("h"));

  py::class_<ScalarPotential>(m, "ScalarPotential")
      .def(py::init([](double q, double alpha, double beta) { return ScalarPotential{q, alpha, beta}; }),
           py::arg("q_param") = 0.0, py::arg("alpha") = 0.0, py::arg("beta") = 0.0)
      .def_readwrite("q_param", &ScalarPotential::qParam)
      .def_readwrite("alpha", &ScalarPotential::alpha)
      .def_readwrite("beta", &ScalarPotential::beta)
      .def("value", &ScalarPotential::valueAt);

  // Dynamics
  py::class_<ParticleState>(m, "ParticleState")
      .def(py::init([](const Vec3& x, const Vec3& pi, const Vec3& Q, double t) { return ParticleState{t, x, pi, Q}; }),
           py::arg("x"), py::arg("pi"), py::arg("Q"), py::arg("t") = 0.0)
      .def_readwrite("t", &ParticleState::t)
      .def_readwrite("x", &ParticleState::x)
      .def_readwrite("pi", &ParticleState::pi)
      .def_readwrite("Q", &ParticleState::Q);

  py::class_<IntegratorConfig>(m, "IntegratorConfig")
      .def(py::init([](const std::string& method, double h, double tEnd, int sampleEvery, double tol) {
             IntegratorConfig c;
             if (method == "rk4")
               c.method = Method::RK4;
             else if (method == "rk45")
               c.method = Method::RK45;
             else
               throw ValidationError("method must be rk4 or rk45");
             c.step = h;
             c.tEnd = tEnd;
             c.sampleEvery = sampleEvery;
             c.tolAbs = c.tolRel = tol;
             c.validate();
             return c;
           }),
           py::arg("method") = "rk4", py::arg("h") = 1e-3, py::arg("t_end") = 10.0, py::arg("sample_every") = 1,
           py::arg("tol") = 1e-10);

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("samples", &samplesArray, "(n, 10) array of t, x, pi, Q")
      .def_property_readonly("termination", [](const Trajectory& t) { return toString(t.termination); })
      .def_property_readonly("completed", &Trajectory::completed)
      .def("drift_report",
           [](const Trajectory& t, double tol) { return toPython(toJson(evaluateStandardSet(t, tol))); },
           py::arg("tolerance") = 1e-7)
      .def("cone", [](const Trajectory& t) { return toPython(toJson(coneCheck(t))); })
      .def("conic", [](const Trajectory& t) { return toPython(toJson(planeAndConic(t))); })
      .def("covariant_residual", [](const Trajectory& t) {
        double worst = 0.0;
        for (const auto& r : covariantDerivativeQ(t)) worst = std::max(worst, r.value.norm());
        return worst;
      });

  m.def("integrate", &integrate, py::arg("initial"), py::arg("field"), py::arg("potential") = std::nullopt,
        py::arg("config") = IntegratorConfig{}, py::call_guard<py::gil_scoped_release>());

  m.def(
      "gauge_covariance",
      [](const ParticleState& s, const GaugeField& f, const std::optional<ScalarPotential>& v,
         const IntegratorConfig& c, const GaugeFunction& g) {
        return toPython(toJson(gaugeCovarianceExperiment(s, f, v, c, g)));
      },
      py::arg("initial"), py::arg("field"), py::arg("potential"), py::arg("config"), py::arg("gauge"));

  // Conservation
  m.def(
      "poisson_bracket",
      [](const std::function<double(const ParticleState&)>& f, const std::function<double(const ParticleState&)>& g,
         const ParticleState& s, const GaugeField& field) { return poissonBracket(f, g, s, field); },
      py::arg("f"), py::arg("g"), py::arg("state"), py::arg("field"));

  m.def(
      "van_holten",
      [](const std::string& name, std::function<double(const Vec3&, const Vec3&)> scalar,
         std::function<Vec3(const Vec3&, const Vec3&)> vector, std::function<Mat3(const Vec3&, const Vec3&)> tensor,
         const GaugeField& field, std::function<double(const Vec3&, const Vec3&)> potential, int samples) {
        const CoefficientAnsatz c{name, std::move(scalar), std::move(vector), std::move(tensor)};
        const auto points = shellSamples(samples);
        return toPython(toJson(vanHoltenCheck(c, field, potential ? potential : noPotential(), points)));
      },
      py::arg("name"), py::arg("scalar") = nullptr, py::arg("vector") = nullptr, py::arg("tensor") = nullptr,
      py::arg("field"), py::arg("potential") = nullptr, py::arg("samples") = 64,
      "van Holten ladder for a user ansatz given as Python callables of (x, Q)");

  m.def(
      "builtin_ansatz",
      [](const std::string& name, const GaugeField& field, const Vec3& axis, double alpha,
         const std::string& potential) {
        AnsatzSpec spec;
        spec.name = name;
        spec.axis = axis;
        spec.alpha = alpha;
        spec.potential = potential;
        return toPython(toJson(runAnsatz(spec, field)));
      },
      py::arg("name"), py::arg("field"), py::arg("axis") = Vec3::UnitZ(), py::arg("alpha") = -1.0,
      py::arg("potential") = "correlated");

  // Kaluza-Klein
  m.def(
      "kk_compare",
      [](const std::string& potential, double strength, double charge, const Vec3& x, const Vec3& v, double tauEnd,
         double step) {
        KKSpec spec;
        spec.potential = potential;
        spec.strength = strength;
        spec.charge = charge;
        const kk::FiveMetric metric(spec.build());
        kk::GeodesicConfig cfg;
        cfg.tauEnd = tauEnd;
        cfg.step = step;
        const auto cmp = kk::lorentzCompare(metric, kk::initialState(metric, x, v, charge), cfg);
        py::dict d;
        d["charge"] = cmp.charge;
        d["maxDeviation"] = cmp.maxDeviation;
        d["qDrift"] = cmp.qDrift;
        d["normDrift"] = cmp.normDrift;
        return d;
      },
      py::arg("potential"), py::arg("strength"), py::arg("charge"), py::arg("x"), py::arg("v"),
      py::arg("tau_end") = 20.0, py::arg("step") = 1e-3);

  // Scenario-level entry points (return the CLI exit code).
  m.def(
      "simulate",
      [](const std::filesystem::path& scenario, const std::filesystem::path& out) {
        CommandOptions o;
        o.out = out;
        return cmdSimulate(scenario, o);
      },
      py::arg("scenario"), py::arg("out") = ".", py::call_guard<py::gil_scoped_release>());
}
