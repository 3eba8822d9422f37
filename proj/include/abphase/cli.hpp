#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "abphase/constants.hpp"
#include "abphase/em_config.hpp"
#include "abphase/holonomy.hpp"
#include "abphase/quadrature.hpp"
#include "abphase/scenarios.hpp"
#include "abphase/spacetime.hpp"
#include "abphase/verify.hpp"

namespace abphase {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum class ScenarioKind { Solenoid, Capacitor, CustomGauge };
enum class SurfaceKind { EqualTimeRuled, Bulged, Mesh };
enum class OutputFormat { Csv, Json };

struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::EqualTimeRuled;
  Tangent4 amplitude;  // bulged: peak displacement at the centre of the parameter square
  std::size_t nu = 0;  // mesh: lattice cells along u and s
  std::size_t ns = 0;
  std::vector<Tangent4> displacements;  // mesh: (nu + 1) x (ns + 1), row-major in u
};

/// A boost given as beta = v/c, or the scenario's special frame.
struct BoostSpec {
  Vec3 beta;
  bool special = false;
};

/// Polynomial gauge between two explicit worldlines.
struct CustomGaugeScenario {
  PolynomialGauge gauge;
  std::vector<Event> a;
  std::vector<Event> b;
};

struct RunConfig {
  ScenarioKind kind = ScenarioKind::Solenoid;
  SolenoidScenario solenoid;
  CapacitorScenario capacitor;
  CustomGaugeScenario custom;
  double c = si::speed_of_light;
  Coupling coupling{};
  std::vector<BoostSpec> boosts;  // empty means the rest frame only
  SurfaceSpec surface;
  QuadratureSpec quadrature;
  int potential_samples = 8;
  std::string output_path;  // empty writes to standard output
  OutputFormat format = OutputFormat::Csv;
  bool strict = false;
  std::string echo;  // the parsed configuration, re-serialized
};

/// Parses a JSON run configuration. Unknown keys, wrong types and invalid
/// values throw ConfigError naming the offending field.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

struct SweepRow {
  double v_over_c = 0.0;
  double gamma = 1.0;
  double phase_magnetic = 0.0;
  double phase_electric = 0.0;
  double phase_total = 0.0;
  double analytic_total = 0.0;
  double abs_err = 0.0;
  long panels_used = 0;
  double wall_time_ms = 0.0;
  double phase_total_mod_2pi = 0.0;
  double phase_potential = 0.0;
};

struct RunReport {
  std::string config_echo;
  std::vector<SweepRow> rows;
  double max_invariance_residual = 0.0;  // relative to the rest-frame flux total
  double max_route_residual = 0.0;       // |flux total - potential phase|, rad
};

Scenario make_scenario(const RunConfig& cfg);
Boost make_boost(const RunConfig& cfg, const BoostSpec& spec);
SpacetimeSurface make_surface(const RunConfig& cfg, const WorldlinePair& pair);
/// Closed-form rest-frame phase; the potential route for custom gauges.
double analytic_total(const RunConfig& cfg);

/// One row per configured boost, or a single rest-frame row.
RunReport cmd_run(const RunConfig& cfg, bool timing = false);
/// `steps` boosts along x with v/c evenly spaced from `from` to `to` inclusive.
RunReport cmd_sweep(const RunConfig& cfg, double from, double to, int steps, bool timing = false);

std::string csv_header();
std::string format_csv(const RunReport& report);
std::string format_json(const RunReport& report);
std::string format_csv(const SuiteReport& report);
std::string format_json(const SuiteReport& report);

}  // namespace abphase
