#include "abphase/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "abphase/errors.hpp"
#include "json.hpp"

namespace abphase {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Typed access to one JSON object that records which keys were read, so that
// anything left over can be reported as unknown.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  [[nodiscard]] bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  [[nodiscard]] const json& at(const std::string& key) {
    if (!has(key)) throw ConfigError(sub(key), "required field is missing");
    return j_.at(key);
  }

  [[nodiscard]] std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key, double fallback) { return has(key) ? as_number(at(key), sub(key)) : fallback; }

  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(sub(key), "expected an integer");
    return v.get<long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(sub(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(sub(key), "expected a string");
    return v.get<std::string>();
  }

  Vec3 vec3(const std::string& key, const Vec3& fallback) { return has(key) ? as_vec3(at(key), sub(key)) : fallback; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError(sub(key), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
  }

  static Vec3 as_vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(path, "expected an array of 3 numbers");
    return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]"), as_number(v[2], path + "[2]")};
  }

  static std::array<double, 4> as_four(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 4) throw ConfigError(path, "expected an array of 4 numbers [t, x, y, z]");
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) out[i] = as_number(v[i], path + "[" + std::to_string(i) + "]");
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Tangent4 as_tangent(const json& v, const std::string& path) {
  const auto a = Fields::as_four(v, path);
  return {a[0], {a[1], a[2], a[3]}};
}

Event as_event(const json& v, const std::string& path) {
  const auto a = Fields::as_four(v, path);
  return {a[0], {a[1], a[2], a[3]}};
}

// Runs a validating constructor and reports its failure against the given path.
template <class F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

void parse_solenoid(Fields& f, RunConfig& cfg) {
  SolenoidScenario& s = cfg.solenoid;
  s.solenoid.B0 = f.number("B0", s.solenoid.B0);
  s.solenoid.radius = f.number("radius", s.solenoid.radius);
  s.solenoid.axis_point = f.vec3("axis_point", s.solenoid.axis_point);
  s.solenoid.axis_direction = f.vec3("axis_direction", s.solenoid.axis_direction);
  s.half_side = f.number("half_side", s.half_side);
  s.offset = f.vec3("offset", s.offset);
  const double beta = f.number("packet_beta", 0.5);
  s.c = cfg.c;
  s.packet_speed = beta * cfg.c;
  s.coupling = cfg.coupling;
  checked(f.sub("kind"), [&] { s.validate(); });
}

void parse_capacitor(Fields& f, RunConfig& cfg) {
  CapacitorScenario& s = cfg.capacitor;
  const double E = f.number("E", 1.0);
  double theta = std::numbers::pi / 6.0;
  const bool rad = f.has("theta");
  const bool deg = f.has("theta_deg");
  if (rad && deg) throw ConfigError(f.sub("theta"), "give theta or theta_deg, not both");
  if (rad) theta = f.number("theta", theta);
  if (deg) theta = f.number("theta_deg", 30.0) * std::numbers::pi / 180.0;
  const double L = f.number("chord_length", 1.0);
  const double T = f.number("duration", 1.0);
  const double tI = f.number("t_I", -0.5 * T);
  const Vec3 center = f.vec3("center", {});
  const double ramp = f.number("ramp_width", 0.0);
  checked(f.sub("kind"), [&] {
    s.capacitor = CapacitorConfig::from_chord(E, theta, L, tI, T, center);
    s.capacitor.ramp_width = ramp;
  });
  s.standoff = f.number("standoff", s.standoff);
  s.travel_time = f.number("travel_time", s.travel_time);
  s.hold_margin = f.number("hold_margin", s.hold_margin);
  s.drift_speed = f.number("drift_speed", s.drift_speed);
  s.c = cfg.c;
  s.coupling = cfg.coupling;
  checked(f.sub("kind"), [&] { s.validate(); });
}

Polynomial4 parse_polynomial(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of terms");
  std::vector<Polynomial4::Term> terms;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    Fields t(v[i], p);
    Polynomial4::Term term;
    term.coef = Fields::as_number(t.at("coef"), t.sub("coef"));
    const json& e = t.at("exps");
    if (!e.is_array() || e.size() != 4) throw ConfigError(t.sub("exps"), "expected 4 exponents [t, x, y, z]");
    for (std::size_t k = 0; k < 4; ++k) {
      if (!e[k].is_number_unsigned() || e[k].get<unsigned>() > 16) {
        throw ConfigError(t.sub("exps"), "exponents must be integers in [0, 16]");
      }
      term.exps[k] = static_cast<std::uint8_t>(e[k].get<unsigned>());
    }
    t.finish();
    terms.push_back(term);
  }
  return Polynomial4(std::move(terms));
}

std::vector<Event> parse_worldline(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() < 2) throw ConfigError(path, "expected at least two [t, x, y, z] knots");
  std::vector<Event> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_event(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

void parse_custom(Fields& f, RunConfig& cfg) {
  CustomGaugeScenario& s = cfg.custom;
  Fields g(f.at("gauge"), f.sub("gauge"));
  if (g.has("random")) {
    Fields r(g.at("random"), g.sub("random"));
    const long seed = r.integer("seed", 1);
    const long degree = r.integer("degree", 2);
    const double scale = r.number("scale", 1.0);
    if (degree < 0 || degree > 6) throw ConfigError(r.sub("degree"), "must be in [0, 6]");
    r.finish();
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    s.gauge = PolynomialGauge::random(rng, static_cast<int>(degree), scale);
  } else {
    s.gauge.V = parse_polynomial(g.at("V"), g.sub("V"));
    const json& A = g.at("A");
    if (!A.is_array() || A.size() != 3) throw ConfigError(g.sub("A"), "expected three polynomials");
    for (std::size_t i = 0; i < 3; ++i) s.gauge.A[i] = parse_polynomial(A[i], g.sub("A") + "[" + std::to_string(i) + "]");
  }
  g.finish();
  Fields w(f.at("worldlines"), f.sub("worldlines"));
  s.a = parse_worldline(w.at("a"), w.sub("a"));
  s.b = parse_worldline(w.at("b"), w.sub("b"));
  w.finish();
  checked(f.sub("worldlines"), [&] {
    const WorldlinePair pair(Worldline(s.a), Worldline(s.b));
    pair.a().require_subluminal(cfg.c);
    pair.b().require_subluminal(cfg.c);
  });
}

void parse_surface(Fields& f, SurfaceSpec& out) {
  const std::string kind = f.string("kind", "equal-time-ruled");
  if (kind == "equal-time-ruled") {
    out.kind = SurfaceKind::EqualTimeRuled;
  } else if (kind == "bulged") {
    out.kind = SurfaceKind::Bulged;
    out.amplitude = as_tangent(f.at("amplitude"), f.sub("amplitude"));
  } else if (kind == "mesh") {
    out.kind = SurfaceKind::Mesh;
    const long nu = f.integer("nu", 0);
    const long ns = f.integer("ns", 0);
    if (nu < 1 || ns < 1) throw ConfigError(f.sub("nu"), "nu and ns must be at least 1");
    out.nu = static_cast<std::size_t>(nu);
    out.ns = static_cast<std::size_t>(ns);
    const json& d = f.at("displacements");
    const std::size_t expect = (out.nu + 1) * (out.ns + 1);
    if (!d.is_array() || d.size() != expect) {
      throw ConfigError(f.sub("displacements"), "expected (nu + 1) * (ns + 1) = " + std::to_string(expect) + " entries");
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      out.displacements.push_back(as_tangent(d[i], f.sub("displacements") + "[" + std::to_string(i) + "]"));
    }
  } else {
    throw ConfigError(f.sub("kind"), "unknown surface kind '" + kind + "' (expected equal-time-ruled, bulged or mesh)");
  }
  f.finish();
}

void parse_quadrature(Fields& f, QuadratureSpec& q) {
  q.base_order = static_cast<int>(f.integer("base_order", q.base_order));
  if (f.has("initial_panels")) {
    const json& p = f.at("initial_panels");
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer()) {
      throw ConfigError(f.sub("initial_panels"), "expected [n_u, n_s]");
    }
    q.initial_panels_u = p[0].get<int>();
    q.initial_panels_s = p[1].get<int>();
  }
  q.tol = f.number("tol", q.tol);
  q.max_depth = static_cast<int>(f.integer("max_depth", q.max_depth));
  q.max_panels = f.integer("max_panels", q.max_panels);
  f.finish();
  checked(f.sub("tol"), [&] { q.validate(); });
}

BoostSpec parse_boost(const json& v, const std::string& path) {
  if (v.is_number()) return {{Fields::as_number(v, path), 0.0, 0.0}, false};
  if (v.is_string()) {
    if (v.get<std::string>() != "special") throw ConfigError(path, "the only named boost is \"special\"");
    return {{}, true};
  }
  Fields f(v, path);
  BoostSpec b{f.vec3("beta", {}), false};
  f.finish();
  return b;
}

void check_boost(const BoostSpec& b, const std::string& path) {
  if (!(b.beta.norm() < 1.0)) throw ConfigError(path, "|v|/c must be below 1");
}

double wrap_2pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json versions() { return {{"abphase", kVersion}, {"schema_version", kSchemaVersion}}; }

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  Fields f(root, "");
  RunConfig cfg;
  const json& ver = f.at("schema_version");
  if (!ver.is_number_integer() || ver.get<long>() != kSchemaVersion) {
    throw ConfigError("schema_version", "unsupported; expected " + std::to_string(kSchemaVersion));
  }
  cfg.c = f.number("c", si::speed_of_light);
  if (!(cfg.c > 0.0)) throw ConfigError("c", "must be positive");

  if (f.has("coupling")) {
    Fields k(f.at("coupling"), "coupling");
    if (k.has("q_over_hbar")) {
      if (k.has("charge") || k.has("hbar")) throw ConfigError("coupling", "give q_over_hbar or charge/hbar, not both");
      cfg.coupling = {k.number("q_over_hbar", 1.0), 1.0};
    } else {
      cfg.coupling.charge = k.number("charge", cfg.coupling.charge);
      cfg.coupling.hbar = k.number("hbar", cfg.coupling.hbar);
      if (!(cfg.coupling.hbar > 0.0)) throw ConfigError("coupling.hbar", "must be positive");
    }
    k.finish();
  }

  if (f.has("quadrature")) {
    Fields q(f.at("quadrature"), "quadrature");
    parse_quadrature(q, cfg.quadrature);
  }
  cfg.potential_samples = static_cast<int>(f.integer("potential_samples", cfg.potential_samples));
  if (cfg.potential_samples < 1) throw ConfigError("potential_samples", "must be at least 1");

  Fields sc(f.at("scenario"), "scenario");
  const std::string kind = sc.string("kind", "");
  if (kind == "solenoid") {
    cfg.kind = ScenarioKind::Solenoid;
    parse_solenoid(sc, cfg);
  } else if (kind == "capacitor") {
    cfg.kind = ScenarioKind::Capacitor;
    parse_capacitor(sc, cfg);
  } else if (kind == "custom-gauge") {
    cfg.kind = ScenarioKind::CustomGauge;
    parse_custom(sc, cfg);
  } else {
    throw ConfigError("scenario.kind", "expected solenoid, capacitor or custom-gauge");
  }
  sc.finish();

  if (f.has("boosts")) {
    const json& b = f.at("boosts");
    if (!b.is_array()) throw ConfigError("boosts", "expected an array");
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string path = "boosts[" + std::to_string(i) + "]";
      BoostSpec spec = parse_boost(b[i], path);
      check_boost(spec, path);
      if (spec.special && cfg.kind == ScenarioKind::CustomGauge) {
        throw ConfigError(path, "custom gauges have no special frame");
      }
      cfg.boosts.push_back(spec);
    }
  }

  if (f.has("surface")) {
    Fields s(f.at("surface"), "surface");
    parse_surface(s, cfg.surface);
  }

  if (f.has("output")) {
    Fields o(f.at("output"), "output");
    cfg.output_path = o.string("path", "");
    const std::string format = o.string("format", "csv");
    if (format == "csv") {
      cfg.format = OutputFormat::Csv;
    } else if (format == "json") {
      cfg.format = OutputFormat::Json;
    } else {
      throw ConfigError("output.format", "expected csv or json");
    }
    o.finish();
  }
  cfg.strict = f.boolean("strict", false);
  f.finish();
  cfg.echo = root.dump();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

Scenario make_scenario(const RunConfig& cfg) {
  switch (cfg.kind) {
    case ScenarioKind::Solenoid:
      return build_solenoid_scenario(cfg.solenoid);
    case ScenarioKind::Capacitor:
      return build_capacitor_scenario(cfg.capacitor);
    case ScenarioKind::CustomGauge:
      return {WorldlinePair(Worldline(cfg.custom.a), Worldline(cfg.custom.b)),
              polynomial_configuration(cfg.custom.gauge), cfg.c};
  }
  throw DomainError("make_scenario: unknown scenario kind");
}

Boost make_boost(const RunConfig& cfg, const BoostSpec& spec) {
  if (!spec.special) return Boost(spec.beta * cfg.c, cfg.c);
  switch (cfg.kind) {
    case ScenarioKind::Solenoid:
      return solenoid_special_frame(cfg.solenoid);
    case ScenarioKind::Capacitor:
      return capacitor_null_electric_boost(cfg.capacitor);
    case ScenarioKind::CustomGauge:
      break;
  }
  throw DomainError("custom gauges have no special frame");
}

SpacetimeSurface make_surface(const RunConfig& cfg, const WorldlinePair& pair) {
  SpacetimeSurface base = ruled_surface_equal_time(pair);
  switch (cfg.surface.kind) {
    case SurfaceKind::EqualTimeRuled:
      return base;
    case SurfaceKind::Bulged:
      return bulged_surface(base, cfg.surface.amplitude);
    case SurfaceKind::Mesh:
      return displaced_surface(base, cfg.surface.nu, cfg.surface.ns, cfg.surface.displacements);
  }
  return base;
}

double analytic_total(const RunConfig& cfg) {
  switch (cfg.kind) {
    case ScenarioKind::Solenoid:
      return cfg.solenoid.encloses_axis() ? solenoid_references(cfg.solenoid, Boost(Vec3{}, cfg.c)).phi_S : 0.0;
    case ScenarioKind::Capacitor:
      return capacitor_references(cfg.capacitor, Boost(Vec3{}, cfg.c)).phi_S;
    case ScenarioKind::CustomGauge: {
      const Scenario sc = make_scenario(cfg);
      PotentialPhaseOptions opts;
      opts.quadrature.tol = 1e-12;
      return potential_phase(sc.pair, sc.config, cfg.coupling, opts, cfg.c);
    }
  }
  return 0.0;
}

namespace {

SweepRow evaluate(const RunConfig& cfg, const Scenario& rest, const Boost& b, double reference, bool timing) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario sc = boosted(rest, b);
  const PhaseDecomposition d = flux_phase(make_surface(cfg, sc.pair), sc.config, cfg.coupling, cfg.quadrature);
  PotentialPhaseOptions opts;
  opts.samples = cfg.potential_samples;
  opts.strict = cfg.strict;
  opts.quadrature = cfg.quadrature;
  const HolonomyResult h = potential_holonomy(sc.pair, sc.config, cfg.coupling, opts, cfg.c);

  SweepRow row;
  const Vec3 beta = b.beta();
  row.v_over_c = (beta.y == 0.0 && beta.z == 0.0) ? beta.x : beta.norm();
  row.gamma = b.gamma();
  row.phase_magnetic = d.magnetic;
  row.phase_electric = d.electric;
  row.phase_total = d.total;
  row.analytic_total = reference;
  row.abs_err = std::abs(d.total - reference);
  row.panels_used = d.stats.panels + h.stats.panels;
  row.phase_total_mod_2pi = wrap_2pi(d.total);
  row.phase_potential = h.phase;
  if (timing) {
    row.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

RunReport evaluate_all(const RunConfig& cfg, const std::vector<Boost>& boosts, bool timing) {
  const Scenario rest = make_scenario(cfg);
  const double reference = analytic_total(cfg);
  RunReport rep;
  rep.config_echo = cfg.echo;
  std::optional<double> rest_total;
  for (const Boost& b : boosts) {
    rep.rows.push_back(evaluate(cfg, rest, b, reference, timing));
    if (b.is_identity() && !rest_total) rest_total = rep.rows.back().phase_total;
  }
  if (!rest_total) rest_total = evaluate(cfg, rest, Boost(Vec3{}, cfg.c), reference, false).phase_total;
  const double scale = std::abs(*rest_total);
  for (const SweepRow& r : rep.rows) {
    const double diff = std::abs(r.phase_total - *rest_total);
    rep.max_invariance_residual = std::max(rep.max_invariance_residual, scale > 0.0 ? diff / scale : diff);
    rep.max_route_residual = std::max(rep.max_route_residual, std::abs(r.phase_total - r.phase_potential));
  }
  return rep;
}

}  // namespace

RunReport cmd_run(const RunConfig& cfg, bool timing) {
  std::vector<Boost> boosts;
  for (const BoostSpec& s : cfg.boosts) boosts.push_back(make_boost(cfg, s));
  if (boosts.empty()) boosts.emplace_back(Vec3{}, cfg.c);
  return evaluate_all(cfg, boosts, timing);
}

RunReport cmd_sweep(const RunConfig& cfg, double from, double to, int steps, bool timing) {
  if (!(std::abs(from) < 0.99) || !(std::abs(to) < 0.99)) {
    throw ConfigError("--from/--to", "v/c must lie in (-0.99, 0.99)");
  }
  if (steps < 1) throw ConfigError("--steps", "must be at least 1");
  std::vector<Boost> boosts;
  for (int i = 0; i < steps; ++i) {
    const double beta = steps == 1 ? from : from + (to - from) * i / (steps - 1);
    boosts.push_back(Boost::along_x(beta, cfg.c));
  }
  return evaluate_all(cfg, boosts, timing);
}

std::string csv_header() {
  return "v_over_c,gamma,phase_magnetic,phase_electric,phase_total,analytic_total,abs_err,panels_used,"
         "wall_time_ms,phase_total_mod_2pi,phase_potential\n";
}

std::string format_csv(const RunReport& report) {
  std::string out = csv_header();
  for (const SweepRow& r : report.rows) {
    out += fmt(r.v_over_c) + ',' + fmt(r.gamma) + ',' + fmt(r.phase_magnetic) + ',' + fmt(r.phase_electric) + ',' +
           fmt(r.phase_total) + ',' + fmt(r.analytic_total) + ',' + fmt(r.abs_err) + ',' +
           std::to_string(r.panels_used) + ',' + fmt(r.wall_time_ms) + ',' + fmt(r.phase_total_mod_2pi) + ',' +
           fmt(r.phase_potential) + '\n';
  }
  return out;
}

std::string format_json(const RunReport& report) {
  json rows = json::array();
  for (const SweepRow& r : report.rows) {
    rows.push_back({{"v_over_c", r.v_over_c},
                    {"gamma", r.gamma},
                    {"phase_magnetic", finite_or_null(r.phase_magnetic)},
                    {"phase_electric", finite_or_null(r.phase_electric)},
                    {"phase_total", finite_or_null(r.phase_total)},
                    {"analytic_total", finite_or_null(r.analytic_total)},
                    {"abs_err", finite_or_null(r.abs_err)},
                    {"panels_used", r.panels_used},
                    {"wall_time_ms", r.wall_time_ms},
                    {"phase_total_mod_2pi", finite_or_null(r.phase_total_mod_2pi)},
                    {"phase_potential", finite_or_null(r.phase_potential)}});
  }
  json out;
  out["config"] = report.config_echo.empty() ? json::object() : json::parse(report.config_echo);
  out["rows"] = std::move(rows);
  out["summary"] = {{"max_invariance_residual", finite_or_null(report.max_invariance_residual)},
                    {"max_route_residual", finite_or_null(report.max_route_residual)}};
  out["versions"] = versions();
  return out.dump(2) + "\n";
}

std::string format_csv(const SuiteReport& report) {
  std::string out = "suite,case,residual,tolerance,passed\n";
  for (const CaseResult& c : report.cases) {
    out += report.suite + ",\"" + c.name + "\"," + fmt(c.residual) + ',' + fmt(c.tolerance) + ',' +
           (c.passed ? "true" : "false") + '\n';
  }
  return out;
}

std::string format_json(const SuiteReport& report) {
  json cases = json::array();
  for (const CaseResult& c : report.cases) {
    cases.push_back({{"name", c.name},
                     {"residual", finite_or_null(c.residual)},
                     {"tolerance", c.tolerance},
                     {"passed", c.passed},
                     {"detail", c.detail}});
  }
  json out = {{"suite", report.suite},
              {"seed", report.seed},
              {"count", report.count},
              {"passed", report.passed()},
              {"max_residual", finite_or_null(report.max_residual())},
              {"cases", std::move(cases)},
              {"versions", versions()}};
  return out.dump(2) + "\n";
}

}  // namespace abphase
