#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <memory>
#include <optional>
#include <sstream>

#include "abphase/cli.hpp"
#include "abphase/em_config.hpp"
#include "abphase/errors.hpp"
#include "abphase/holonomy.hpp"
#include "abphase/scenarios.hpp"
#include "abphase/spacetime.hpp"
#include "abphase/verify.hpp"

namespace py = pybind11;
using namespace abphase;

namespace {

// Python callables stored in configurations may be invoked, copied or
// destroyed while the GIL is released, so both calls and the final
// release reacquire it.
std::shared_ptr<py::function> hold(py::function f) {
  return {new py::function(std::move(f)), [](py::function* p) {
            py::gil_scoped_acquire gil;
            delete p;
          }};
}

GaugeFunction python_gauge(py::function chi, std::optional<py::function> gradient) {
  GaugeFunction g;
  auto f = hold(std::move(chi));
  g.chi = [f](const Event& e) {
    py::gil_scoped_acquire gil;
    return (*f)(e).cast<double>();
  };
  if (gradient) {
    auto d = hold(std::move(*gradient));
    g.gradient = [d](const Event& e) {
      py::gil_scoped_acquire gil;
      const auto v = (*d)(e).cast<std::array<double, 4>>();
      return Tangent4{v[0], {v[1], v[2], v[3]}};
    };
  }
  return g;
}

template <class T>
std::string repr(const T& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Aharonov-Bohm phase by potential holonomy and by spacetime flux";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<NonMonotoneTime>(m, "NonMonotoneTime", base.ptr());
  py::register_exception<FieldOnPath>(m, "FieldOnPath", base.ptr());
  py::register_exception<ToleranceNotMet>(m, "ToleranceNotMet", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.attr("c_SI") = si::speed_of_light;

  py::class_<Vec3>(m, "Vec3")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"), py::arg("z"))
      .def_readwrite("x", &Vec3::x)
      .def_readwrite("y", &Vec3::y)
      .def_readwrite("z", &Vec3::z)
      .def("norm", &Vec3::norm)
      .def("tolist", [](const Vec3& v) { return std::vector<double>{v.x, v.y, v.z}; })
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self == py::self)
      .def("__repr__", [](const Vec3& v) { return "Vec3" + repr(v); });

  py::class_<Event>(m, "Event")
      .def(py::init<>())
      .def(py::init([](double t, const Vec3& pos) { return Event{t, pos}; }), py::arg("t"), py::arg("pos"))
      .def_readwrite("t", &Event::t)
      .def_readwrite("pos", &Event::pos)
      .def("__repr__", [](const Event& e) { return "Event" + repr(e); });

  py::class_<Boost>(m, "Boost")
      .def(py::init<>())
      .def(py::init<const Vec3&, double>(), py::arg("velocity"), py::arg("c") = si::speed_of_light)
      .def_static("along_x", &Boost::along_x, py::arg("beta"), py::arg("c") = si::speed_of_light)
      .def_property_readonly("velocity", &Boost::velocity)
      .def_property_readonly("c", &Boost::c)
      .def_property_readonly("gamma", &Boost::gamma)
      .def("inverse", &Boost::inverse);

  m.def("boost_event", &boost_event, py::arg("event"), py::arg("boost"));

  py::class_<FieldSample>(m, "FieldSample")
      .def(py::init([](const Vec3& E, const Vec3& B) { return FieldSample{E, B}; }), py::arg("E"), py::arg("B"))
      .def_readwrite("E", &FieldSample::E)
      .def_readwrite("B", &FieldSample::B);
  py::class_<PotentialSample>(m, "PotentialSample")
      .def(py::init([](double V, const Vec3& A) { return PotentialSample{V, A}; }), py::arg("V"), py::arg("A"))
      .def_readwrite("V", &PotentialSample::V)
      .def_readwrite("A", &PotentialSample::A);
  m.def("boost_field", &boost_field, py::arg("field"), py::arg("boost"));
  m.def("boost_potential", &boost_potential, py::arg("potential"), py::arg("boost"));

  py::class_<Coupling>(m, "Coupling")
      .def(py::init([](double charge, double hbar) { return Coupling{charge, hbar}; }), py::arg("charge"),
           py::arg("hbar"))
      .def_static("unit", &Coupling::unit)
      .def_static("electron", &Coupling::electron)
      .def_readwrite("charge", &Coupling::charge)
      .def_readwrite("hbar", &Coupling::hbar)
      .def_property_readonly("q_over_hbar", &Coupling::q_over_hbar);

  py::class_<QuadratureSpec>(m, "QuadratureSpec")
      .def(py::init<>())
      .def_readwrite("base_order", &QuadratureSpec::base_order)
      .def_readwrite("initial_panels_u", &QuadratureSpec::initial_panels_u)
      .def_readwrite("initial_panels_s", &QuadratureSpec::initial_panels_s)
      .def_readwrite("tol", &QuadratureSpec::tol)
      .def_readwrite("max_depth", &QuadratureSpec::max_depth)
      .def_readwrite("max_panels", &QuadratureSpec::max_panels);

  py::class_<Worldline>(m, "Worldline")
      .def(py::init<std::vector<Event>>(), py::arg("knots"))
      .def_property_readonly("knots", &Worldline::knots)
      .def("at", &Worldline::at, py::arg("tau"));
  py::class_<WorldlinePair>(m, "WorldlinePair")
      .def(py::init<Worldline, Worldline>(), py::arg("a"), py::arg("b"))
      .def_property_readonly("a", &WorldlinePair::a)
      .def_property_readonly("b", &WorldlinePair::b)
      .def("swapped", &WorldlinePair::swapped);
  m.def("boost_pair", &boost_pair, py::arg("pair"), py::arg("boost"));

  py::class_<SpacetimeSurface>(m, "SpacetimeSurface")
      .def("__call__", &SpacetimeSurface::operator(), py::arg("u"), py::arg("s"));
  m.def("ruled_surface_equal_time", &ruled_surface_equal_time, py::arg("pair"));
  m.def(
      "bulged_surface",
      [](const SpacetimeSurface& base, double dt, const Vec3& dpos) { return bulged_surface(base, {dt, dpos}); },
      py::arg("base"), py::arg("dt"), py::arg("dpos"));

  py::class_<EmConfiguration>(m, "EmConfiguration")
      .def("field", [](const EmConfiguration& c, const Event& e) { return c.field(e); }, py::arg("event"))
      .def("potential", [](const EmConfiguration& c, const Event& e) { return c.potential(e); }, py::arg("event"));
  m.def("boosted_configuration", &boosted_configuration, py::arg("config"), py::arg("boost"));

  py::class_<SolenoidConfig>(m, "SolenoidConfig")
      .def(py::init<>())
      .def_readwrite("B0", &SolenoidConfig::B0)
      .def_readwrite("radius", &SolenoidConfig::radius)
      .def_readwrite("axis_point", &SolenoidConfig::axis_point)
      .def_readwrite("axis_direction", &SolenoidConfig::axis_direction);
  py::class_<CapacitorConfig>(m, "CapacitorConfig")
      .def(py::init<>())
      .def_static("from_chord", &CapacitorConfig::from_chord, py::arg("E_mag"), py::arg("theta"),
                  py::arg("chord_length"), py::arg("t_I"), py::arg("duration"), py::arg("center") = Vec3{})
      .def_readwrite("E_mag", &CapacitorConfig::E_mag)
      .def_readwrite("theta", &CapacitorConfig::theta)
      .def_readwrite("gap", &CapacitorConfig::gap)
      .def_readwrite("t_I", &CapacitorConfig::t_I)
      .def_readwrite("duration", &CapacitorConfig::duration)
      .def_readwrite("chord_length", &CapacitorConfig::chord_length)
      .def_readwrite("ramp_width", &CapacitorConfig::ramp_width);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("pair", &Scenario::pair)
      .def_readonly("config", &Scenario::config)
      .def_readonly("c", &Scenario::c);
  m.def("boosted", &boosted, py::arg("scenario"), py::arg("boost"));

  py::class_<SolenoidScenario>(m, "SolenoidScenario")
      .def(py::init<>())
      .def_readwrite("solenoid", &SolenoidScenario::solenoid)
      .def_readwrite("half_side", &SolenoidScenario::half_side)
      .def_readwrite("packet_speed", &SolenoidScenario::packet_speed)
      .def_readwrite("offset", &SolenoidScenario::offset)
      .def_readwrite("c", &SolenoidScenario::c)
      .def_readwrite("coupling", &SolenoidScenario::coupling);
  py::class_<CapacitorScenario>(m, "CapacitorScenario")
      .def(py::init<>())
      .def_readwrite("capacitor", &CapacitorScenario::capacitor)
      .def_readwrite("standoff", &CapacitorScenario::standoff)
      .def_readwrite("drift_speed", &CapacitorScenario::drift_speed)
      .def_readwrite("c", &CapacitorScenario::c)
      .def_readwrite("coupling", &CapacitorScenario::coupling);

  py::class_<ReferenceValues>(m, "ReferenceValues")
      .def_readonly("phi_S", &ReferenceValues::phi_S)
      .def_readonly("phi_Sprime", &ReferenceValues::phi_Sprime)
      .def_readonly("phi_magnetic_Sprime", &ReferenceValues::phi_magnetic_Sprime)
      .def_readonly("phi_electric_Sprime", &ReferenceValues::phi_electric_Sprime)
      .def_readonly("phi_electric_crossing", &ReferenceValues::phi_electric_crossing)
      .def_readonly("delta_t_prime", &ReferenceValues::delta_t_prime)
      .def_readonly("E_prime_0", &ReferenceValues::E_prime_0)
      .def_readonly("B_prime", &ReferenceValues::B_prime)
      .def_readonly("v_null_electric", &ReferenceValues::v_null_electric)
      .def_readonly("parallelogram_area", &ReferenceValues::parallelogram_area)
      .def_readonly("E_dot_L_prime", &ReferenceValues::E_dot_L_prime);

  m.def("build_solenoid_scenario", &build_solenoid_scenario, py::arg("scenario"));
  m.def("solenoid_special_frame", &solenoid_special_frame, py::arg("scenario"));
  m.def("solenoid_references", &solenoid_references, py::arg("scenario"), py::arg("boost"));
  m.def("build_capacitor_scenario", &build_capacitor_scenario, py::arg("scenario"));
  m.def("capacitor_null_electric_boost", &capacitor_null_electric_boost, py::arg("scenario"));
  m.def("capacitor_references", &capacitor_references, py::arg("scenario"), py::arg("boost"));

  py::class_<QuadratureStats>(m, "QuadratureStats")
      .def_readonly("panels", &QuadratureStats::panels)
      .def_readonly("max_depth", &QuadratureStats::max_depth)
      .def_readonly("error_estimate", &QuadratureStats::error_estimate);
  py::class_<PhaseDecomposition>(m, "PhaseDecomposition")
      .def_readonly("magnetic", &PhaseDecomposition::magnetic)
      .def_readonly("electric", &PhaseDecomposition::electric)
      .def_readonly("total", &PhaseDecomposition::total)
      .def_readonly("reduced_flux", &PhaseDecomposition::reduced_flux)
      .def_readonly("charge", &PhaseDecomposition::charge)
      .def_readonly("stats", &PhaseDecomposition::stats);
  py::class_<StokesReport>(m, "StokesReport")
      .def_readonly("loop_value", &StokesReport::loop_value)
      .def_readonly("surface_value", &StokesReport::surface_value)
      .def_readonly("abs_err", &StokesReport::abs_err)
      .def_readonly("rel_err", &StokesReport::rel_err)
      .def_readonly("panels_used", &StokesReport::panels_used);

  m.def(
      "potential_phase",
      [](const WorldlinePair& pair, const EmConfiguration& cfg, const Coupling& coupling, double c, bool strict,
         const QuadratureSpec& spec) {
        PotentialPhaseOptions opts;
        opts.strict = strict;
        opts.quadrature = spec;
        return potential_phase(pair, cfg, coupling, opts, c);
      },
      py::arg("pair"), py::arg("config"), py::arg("coupling"), py::arg("c") = si::speed_of_light,
      py::arg("strict") = false, py::arg("spec") = QuadratureSpec{});
  m.def("flux_phase", &flux_phase, py::arg("surface"), py::arg("config"), py::arg("coupling"),
        py::arg("spec") = QuadratureSpec{}, py::call_guard<py::gil_scoped_release>());
  m.def("stokes_check", &stokes_check, py::arg("surface"), py::arg("config"), py::arg("spec") = QuadratureSpec{},
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "gauge_shift",
      [](const EmConfiguration& cfg, py::function chi, std::optional<py::function> gradient, double dt, double dx) {
        return gauge_shift(cfg, python_gauge(std::move(chi), std::move(gradient)), DifferenceSteps{dt, dx});
      },
      py::arg("config"), py::arg("chi"), py::arg("gradient") = py::none(), py::arg("dt") = DifferenceSteps{}.dt,
      py::arg("dx") = DifferenceSteps{}.dx,
      "V -> V - dchi/dt, A -> A + grad chi. chi(event) -> float; gradient(event) -> (dt, dx, dy, dz).");

  py::class_<CaseResult>(m, "CaseResult")
      .def_readonly("name", &CaseResult::name)
      .def_readonly("residual", &CaseResult::residual)
      .def_readonly("tolerance", &CaseResult::tolerance)
      .def_readonly("passed", &CaseResult::passed)
      .def_readonly("detail", &CaseResult::detail);
  py::class_<SuiteReport>(m, "SuiteReport")
      .def_readonly("suite", &SuiteReport::suite)
      .def_readonly("cases", &SuiteReport::cases)
      .def_property_readonly("passed", &SuiteReport::passed)
      .def_property_readonly("max_residual", &SuiteReport::max_residual);
  m.def("run_suite", &run_suite, py::arg("suite"), py::arg("seed") = 1, py::arg("count") = 20,
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "run_config",
      [](const std::string& text, bool timing) { return format_json(cmd_run(parse_run_config(text), timing)); },
      py::arg("config_json"), py::arg("timing") = false,
      "Run a JSON configuration and return the JSON report as a string.");
  m.def(
      "sweep_config",
      [](const std::string& text, double from, double to, int steps) {
        return format_json(cmd_sweep(parse_run_config(text), from, to, steps));
      },
      py::arg("config_json"), py::arg("v_from") = 0.0, py::arg("v_to") = 0.9, py::arg("steps") = 10);

#ifdef ABPHASE_VERSION
  m.attr("__version__") = ABPHASE_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
