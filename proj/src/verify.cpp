#include "abphase/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "abphase/em_config.hpp"
#include "abphase/errors.hpp"
#include "abphase/holonomy.hpp"
#include "abphase/scenarios.hpp"

namespace abphase {

bool SuiteReport::passed() const {
  return !cases.empty() && std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.passed; });
}

double SuiteReport::max_residual() const {
  double m = 0.0;
  for (const auto& c : cases) m = std::max(m, c.residual);
  return m;
}

namespace {

constexpr double kStokesTol = 1e-8;
constexpr double kAppendixTol = 1e-9;
constexpr double kGaugeTol = 1e-9;
constexpr double kFramesTol = 1e-6;

std::string seed_name(const char* prefix, std::uint64_t seed) {
  std::ostringstream os;
  os << prefix << " seed=" << seed;
  return os.str();
}

CaseResult judged(std::string name, double residual, double tol, std::string detail = {}) {
  return {std::move(name), residual, tol, residual <= tol && std::isfinite(residual), std::move(detail)};
}

// Runs body and converts library errors into a failed case.
template <class F>
CaseResult guarded(const std::string& name, double tol, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return {name, std::numeric_limits<double>::infinity(), tol, false, e.what()};
  }
}

Vec3 uniform_vec(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

// Interior knots scattered around the straight line from x0 to xf, at times
// strictly between t0 and tf; resampled until every segment is below 0.9 c.
Worldline random_worldline(std::mt19937_64& rng, const Event& e0, const Event& ef, double c) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 3);
  for (;;) {
    const int n = count(rng);
    std::vector<double> w(n);
    for (auto& x : w) x = 0.1 + 0.8 * unit(rng);
    std::sort(w.begin(), w.end());
    std::vector<Event> knots{e0};
    for (double wi : w) {
      Event e = lerp(e0, ef, wi);
      e.pos += uniform_vec(rng, -0.4, 0.4);
      knots.push_back(e);
    }
    knots.push_back(ef);
    bool ok = true;
    for (std::size_t i = 0; i + 1 < knots.size() && ok; ++i) {
      const Tangent4 d = knots[i + 1] - knots[i];
      ok = d.dt > 0.0 && d.dpos.norm() < 0.9 * c * d.dt;
    }
    if (ok) return Worldline(std::move(knots));
  }
}

// Cubic 3-vector field from polynomials in (x, y, z) with its exact jacobian.
VectorField3 polynomial_field(std::mt19937_64& rng) {
  using P = Polynomial4;
  std::array<P, 3> comp;
  for (auto& p : comp) {
    // drop every term that depends on t
    std::vector<P::Term> terms;
    for (const auto& t : P::random(rng, 3).terms()) {
      if (t.exps[0] == 0) terms.push_back(t);
    }
    p = P(std::move(terms));
  }
  std::array<std::array<P, 3>, 3> jac;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) jac[i][j] = comp[i].derivative(static_cast<P::Var>(j + 1));
  }
  VectorField3 f;
  f.value = [comp](const Vec3& x) { return Vec3{comp[0](0, x.x, x.y, x.z), comp[1](0, x.x, x.y, x.z), comp[2](0, x.x, x.y, x.z)}; };
  f.jacobian = [jac](const Vec3& x) {
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m.d[i][j] = jac[i][j](0, x.x, x.y, x.z);
    }
    return m;
  };
  return f;
}

// Bilinear patch p0 + u a + s b + k u s n with exact tangents.
SurfacePatch3 random_patch(std::mt19937_64& rng) {
  const Vec3 p0 = uniform_vec(rng, -1.0, 1.0);
  const Vec3 a = uniform_vec(rng, -1.0, 1.0);
  const Vec3 b = uniform_vec(rng, -1.0, 1.0);
  const Vec3 n = uniform_vec(rng, -0.5, 0.5);
  SurfacePatch3 p;
  p.map = [=](double u, double s) { return p0 + u * a + s * b + (u * s) * n; };
  p.du = [=](double, double s) { return a + s * n; };
  p.ds = [=](double u, double) { return b + u * n; };
  return p;
}

GaugeFunction chi_x_t() {
  GaugeFunction g;
  g.chi = [](const Event& e) { return e.pos.x * e.t; };
  g.gradient = [](const Event& e) { return Tangent4{e.pos.x, {e.t, 0.0, 0.0}}; };
  return g;
}

// chi = amp sin(k.x + w t + phase), with a few oscillations at most over the loop.
GaugeFunction random_chi(std::mt19937_64& rng, double length, double duration) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double amp = u(rng);
  const Vec3 k = uniform_vec(rng, -1.0, 1.0) / length;
  const double w = u(rng) / duration;
  const double phase = std::numbers::pi * u(rng);
  GaugeFunction g;
  g.chi = [=](const Event& e) { return amp * std::sin(dot(k, e.pos) + w * e.t + phase); };
  g.gradient = [=](const Event& e) {
    const double d = amp * std::cos(dot(k, e.pos) + w * e.t + phase);
    return Tangent4{d * w, d * k};
  };
  return g;
}

struct NamedScenario {
  const char* name;
  Scenario scenario;
  double length;    // m, rough size of the loop
  double duration;  // s, time spanned by the loop
};

std::vector<NamedScenario> built_in_scenarios() {
  SolenoidScenario sol;
  CapacitorScenario cap;
  std::vector<NamedScenario> out{{"solenoid", build_solenoid_scenario(sol), 2.0 * sol.half_side, 0.0},
                                  {"capacitor", build_capacitor_scenario(cap), cap.capacitor.chord_length, 0.0}};
  for (auto& ns : out) ns.duration = ns.scenario.pair.a().tf() - ns.scenario.pair.a().t0();
  return out;
}

}  // namespace

WorldlinePair random_worldline_pair(std::mt19937_64& rng, double c) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double t0 = 0.0;
  const double tf = (1.0 + unit(rng)) / c;
  const Event e0{t0, uniform_vec(rng, -0.5, 0.5)};
  // endpoint displacement well inside the light cone
  const Vec3 dir = uniform_vec(rng, -1.0, 1.0);
  const Vec3 step = dir.norm() > 0.0 ? (0.3 * c * (tf - t0) * unit(rng) / dir.norm()) * dir : Vec3{};
  const Event ef{tf, e0.pos + step};
  Worldline a = random_worldline(rng, e0, ef, c);
  Worldline b = random_worldline(rng, e0, ef, c);
  return {std::move(a), std::move(b)};
}

SuiteReport verify_stokes(std::uint64_t seed, int count) {
  SuiteReport rep{"stokes", seed, count, {}};
  QuadratureSpec spec;
  spec.tol = 1e-11;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    const std::string name = seed_name("polynomial gauge", s);
    rep.cases.push_back(guarded(name, kStokesTol, [&] {
      std::mt19937_64 rng(s);
      const int degree = 1 + static_cast<int>(rng() % 3);
      const PolynomialGauge gauge = PolynomialGauge::random(rng, degree);
      const WorldlinePair pair = random_worldline_pair(rng);
      const StokesReport r = stokes_check(ruled_surface_equal_time(pair), polynomial_configuration(gauge), spec);
      // relative, with a floor so that near-zero loops are judged on the absolute scale
      const double scale = std::max({std::abs(r.loop_value), std::abs(r.surface_value), 1e-6});
      std::ostringstream os;
      os.precision(17);
      os << "degree " << degree << " loop " << r.loop_value << " surface " << r.surface_value << " panels "
         << r.panels_used;
      return judged(name, r.abs_err / scale, kStokesTol, os.str());
    }));
  }
  return rep;
}

SuiteReport verify_appendix_a(std::uint64_t seed, int count) {
  SuiteReport rep{"appendixA", seed, count, {}};
  auto detail = [](const StokesReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "boundary " << r.loop_value << " interior " << r.surface_value;
    return os.str();
  };
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(s);
    const VectorField3 field = polynomial_field(rng);
    const Vec3 lo = uniform_vec(rng, -1.0, 0.0);
    const Box3 box{lo, lo + uniform_vec(rng, 0.5, 1.5)};
    const StokesReport div = stokes_check_3d(field, box);
    rep.cases.push_back(judged(seed_name("divergence", s), div.abs_err / std::max(1.0, std::abs(div.loop_value)),
                               kAppendixTol, detail(div)));
    const StokesReport curl = stokes_check_3d(field, random_patch(rng));
    rep.cases.push_back(judged(seed_name("curl", s), curl.abs_err / std::max(1.0, std::abs(curl.loop_value)),
                               kAppendixTol, detail(curl)));
  }
  return rep;
}

SuiteReport verify_gauge(std::uint64_t seed, int count) {
  SuiteReport rep{"gauge", seed, count, {}};
  PotentialPhaseOptions opts;
  // a tenth of the pass threshold; finite-difference gradients have a noise floor near 1e-12
  opts.quadrature.tol = 1e-10;
  const Coupling unit = Coupling::unit();
  for (const auto& ns : built_in_scenarios()) {
    const Scenario& sc = ns.scenario;
    const DifferenceSteps steps{1e-6 * ns.duration, 1e-6 * ns.length};
    const double base = potential_phase(sc.pair, sc.config, unit, opts, sc.c);
    auto check = [&](const std::string& name, const GaugeFunction& chi) {
      rep.cases.push_back(guarded(name, kGaugeTol, [&] {
        const double shifted = potential_phase(sc.pair, gauge_shift(sc.config, chi, steps), unit, opts, sc.c);
        std::ostringstream os;
        os.precision(17);
        os << "base " << base << " shifted " << shifted;
        return judged(name, std::abs(shifted - base), kGaugeTol, os.str());
      }));
    };
    check(std::string(ns.name) + " chi=x*t", chi_x_t());
    GaugeFunction numeric = chi_x_t();
    numeric.gradient = nullptr;
    check(std::string(ns.name) + " chi=x*t finite differences", numeric);
    for (int i = 0; i < count; ++i) {
      const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
      std::mt19937_64 rng(s);
      check(seed_name((std::string(ns.name) + " random chi").c_str(), s), random_chi(rng, ns.length, ns.duration));
    }
  }
  return rep;
}

SuiteReport verify_frames() {
  SuiteReport rep{"frames", 0, 0, {}};
  const Coupling unit = Coupling::unit();
  auto run = [&](const char* label, const Scenario& sc, double reference, const std::vector<Boost>& boosts) {
    for (const Boost& b : boosts) {
      std::ostringstream name;
      name << label << " v/c=" << b.velocity().x / b.c();
      rep.cases.push_back(guarded(name.str(), kFramesTol, [&] {
        const Scenario s = boosted(sc, b);
        const PhaseDecomposition d = flux_phase(ruled_surface_equal_time(s.pair), s.config, unit);
        std::ostringstream os;
        os.precision(17);
        os << "magnetic " << d.magnetic << " electric " << d.electric << " total " << d.total;
        return judged(name.str(), std::abs(d.total - reference) / std::abs(reference), kFramesTol, os.str());
      }));
    }
  };

  SolenoidScenario sol;
  sol.coupling = unit;
  std::vector<Boost> sb;
  for (double beta : {0.0, 0.3, 0.6, 0.9}) sb.push_back(Boost::along_x(beta, sol.c));
  sb.push_back(solenoid_special_frame(sol));
  run("solenoid", build_solenoid_scenario(sol), solenoid_references(sol, Boost()).phi_S, sb);

  // c = 1 keeps boosted capacitor coordinates of order one
  CapacitorScenario cap;
  cap.c = 1.0;
  cap.coupling = unit;
  std::vector<Boost> cb;
  for (double beta : {0.0, 0.3, 0.6, 0.9}) cb.push_back(Boost::along_x(beta, cap.c));
  cb.push_back(capacitor_null_electric_boost(cap));
  run("capacitor", build_capacitor_scenario(cap), capacitor_references(cap, Boost(Vec3{}, cap.c)).phi_S, cb);
  return rep;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed, int count) {
  if (count < 1) throw ConfigError("count", "must be at least 1");
  if (name == "stokes") return verify_stokes(seed, count);
  if (name == "appendixA") return verify_appendix_a(seed, count);
  if (name == "gauge") return verify_gauge(seed, count);
  if (name == "frames") return verify_frames();
  throw ConfigError("suite", "unknown suite '" + name + "' (expected stokes, appendixA, gauge or frames)");
}

}  // namespace abphase
