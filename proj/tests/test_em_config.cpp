#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "abphase/em_config.hpp"
#include "abphase/errors.hpp"

using namespace abphase;

namespace {

constexpr double c = si::speed_of_light;
constexpr double pi = std::numbers::pi;

// Periodic trapezoid rule for the closed curve t -> p(t), t in [0, 2 pi).
template <class P, class D>
double loop_integral(const EmConfiguration& cfg, P p, D dp, int n) {
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * pi * k / n;
    sum += dot(cfg.potential({0.0, p(t)}).A, dp(t));
  }
  return sum * 2.0 * pi / n;
}

double rel(const Vec3& a, const Vec3& b, double scale) { return (a - b).norm() / scale; }

}  // namespace

TEST(Solenoid, AxisAndInteriorValues) {
  const EmConfiguration cfg = solenoid_configuration({1.5, 0.1});
  const FieldSample f = cfg.field({0.0, {}});
  EXPECT_EQ(f.B, (Vec3{0, 0, 1.5}));
  EXPECT_EQ(f.E, Vec3{});
  EXPECT_EQ(cfg.potential({0.0, {}}).A, Vec3{});
  EXPECT_EQ(cfg.potential({0.0, {}}).V, 0.0);
  EXPECT_EQ(cfg.field({0.0, {0.05, 0.05, 7.0}}).B, (Vec3{0, 0, 1.5}));
  EXPECT_EQ(cfg.field({0.0, {0.2, 0.0, 0.0}}).B, Vec3{});
}

TEST(Solenoid, ExteriorPotentialMagnitudeAndCurl) {
  const double B0 = 1.0;
  const double r = 0.1;
  const EmConfiguration cfg = solenoid_configuration({B0, r});
  const Event e{0.0, {2.0 * r, 0.0, 0.0}};
  EXPECT_NEAR(cfg.potential(e).A.norm(), B0 * r * r / (2.0 * 2.0 * r), 1e-16);
  EXPECT_NEAR(cfg.potential(e).A.norm(), B0 * r / 4.0, 1e-16);
  const FieldSample d = derived_field(cfg, e, DifferenceSteps::natural(1e-5, c));
  EXPECT_NEAR(d.B.norm(), 0.0, 1e-8 * B0);
  EXPECT_NEAR(d.E.norm(), 0.0, 1e-8);
}

TEST(Solenoid, PotentialIsContinuousAtTheWall) {
  const EmConfiguration cfg = solenoid_configuration({1.0, 0.1});
  const Vec3 in = cfg.potential({0.0, {0.1 - 1e-12, 0, 0}}).A;
  const Vec3 out = cfg.potential({0.0, {0.1 + 1e-12, 0, 0}}).A;
  EXPECT_NEAR((in - out).norm(), 0.0, 1e-11);
}

TEST(Solenoid, ExteriorLoopIntegralIsTheEnclosedFluxForAnyShape) {
  const double B0 = 1.0;
  const double r = 0.1;
  const EmConfiguration cfg = solenoid_configuration({B0, r});
  const double flux = B0 * pi * r * r;
  const double circle = loop_integral(
      cfg, [](double t) { return Vec3{0.3 * std::cos(t), 0.3 * std::sin(t), 0.0}; },
      [](double t) { return Vec3{-0.3 * std::sin(t), 0.3 * std::cos(t), 0.0}; }, 256);
  // off-centre ellipse that still encloses the axis
  const double ellipse = loop_integral(
      cfg, [](double t) { return Vec3{0.05 + 0.6 * std::cos(t), -0.02 + 0.25 * std::sin(t), 0.3}; },
      [](double t) { return Vec3{-0.6 * std::sin(t), 0.25 * std::cos(t), 0.0}; }, 4096);
  EXPECT_NEAR(circle, flux, 1e-12);
  EXPECT_NEAR(ellipse, flux, 1e-10);
  EXPECT_NEAR(circle, ellipse, 1e-8 * flux);
  // a loop that misses the axis encloses nothing
  const double outside = loop_integral(
      cfg, [](double t) { return Vec3{1.0 + 0.3 * std::cos(t), 0.3 * std::sin(t), 0.0}; },
      [](double t) { return Vec3{-0.3 * std::sin(t), 0.3 * std::cos(t), 0.0}; }, 256);
  EXPECT_NEAR(outside, 0.0, 1e-14);
}

TEST(Solenoid, TiltedAxis) {
  SolenoidConfig s{2.0, 0.1, {1, 1, 0}, {0, 1, 1}};
  const EmConfiguration cfg = solenoid_configuration(s);
  const Vec3 d = Vec3{0, 1, 1} / std::sqrt(2.0);
  const FieldSample f = cfg.field({0.0, Vec3{1, 1, 0} + 5.0 * d});
  EXPECT_NEAR(rel(f.B, 2.0 * d, 1.0), 0.0, 1e-15);
  EXPECT_THROW(solenoid_configuration({1.0, -0.1}), GeometryError);
  EXPECT_THROW(solenoid_configuration({1.0, 0.1, {}, {}}), GeometryError);
}

TEST(Capacitor, GeometryFromChord) {
  const CapacitorConfig cap = CapacitorConfig::from_chord(1.0, pi / 6, 1.0, -0.5, 1.0);
  EXPECT_NEAR(cap.gap, 0.5, 1e-15);
  EXPECT_NEAR(dot(cap.field_direction(), cap.chord_direction()), std::cos(2 * pi / 6), 1e-15);
  EXPECT_NEAR(dot(cap.field_direction(), Vec3{1, 0, 0}), std::cos(pi / 6), 1e-15);
  EXPECT_NEAR(dot(cap.chord_direction(), Vec3{1, 0, 0}), std::cos(pi / 6), 1e-15);
  CapacitorConfig bad = cap;
  bad.gap = 0.6;
  EXPECT_THROW(bad.validate(), GeometryError);
  EXPECT_THROW(CapacitorConfig::from_chord(1.0, pi / 4, 1.0, 0.0, 1.0).validate(), GeometryError);
  EXPECT_THROW(CapacitorConfig::from_chord(1.0, 0.1, 1.0, 0.0, 0.0).validate(), GeometryError);
}

TEST(Capacitor, FieldAndPotentialDuringPulse) {
  const double E = 2.0;
  const CapacitorConfig cap = CapacitorConfig::from_chord(E, pi / 6, 1.0, 0.0, 1.0);
  const EmConfiguration cfg = capacitor_configuration(cap);
  const Vec3 n = cap.field_direction();
  const double d = cap.gap;
  const FieldSample f = cfg.field({0.5, 0.1 * n});
  EXPECT_NEAR(rel(f.E, E * n, E), 0.0, 1e-15);
  EXPECT_EQ(f.B, Vec3{});
  const double below = cfg.potential({0.5, -d * n}).V;
  const double above = cfg.potential({0.5, d * n}).V;
  EXPECT_NEAR(below - above, E * d, 1e-14);
  EXPECT_EQ(cfg.field({0.5, d * n}).E, Vec3{});
  // potential is continuous across both plates during the pulse
  EXPECT_NEAR(cfg.potential({0.5, (0.5 * d - 1e-12) * n}).V, above, 1e-11);
  EXPECT_NEAR(cfg.potential({0.5, (-0.5 * d + 1e-12) * n}).V, below, 1e-11);
}

TEST(Capacitor, NothingOutsideThePulse) {
  const CapacitorConfig cap = CapacitorConfig::from_chord(1.0, pi / 6, 1.0, 0.0, 1.0);
  const EmConfiguration cfg = capacitor_configuration(cap);
  for (double t : {-1.0, -1e-9, 1.0, 2.0}) {
    for (double xi : {-1.0, 0.0, 1.0}) {
      const Event e{t, xi * cap.field_direction()};
      EXPECT_EQ(cfg.field(e).E, Vec3{});
      EXPECT_EQ(cfg.potential(e).V, 0.0);
    }
  }
}

TEST(Capacitor, RampedWindowKeepsTheTimeIntegral) {
  CapacitorConfig cap = CapacitorConfig::from_chord(1.0, 0.2, 1.0, 0.0, 1.0);
  cap.ramp_width = 0.2;
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += cap.window(-0.5 + 2.0 * (i + 0.5) / n);
  EXPECT_NEAR(sum * 2.0 / n, 1.0, 1e-9);
  EXPECT_NEAR(cap.window(0.0), 0.5, 1e-15);
  EXPECT_EQ(cap.window(0.5), 1.0);
}

TEST(GaugeCompatibility, BuiltInConfigurationsMatchTheirFields) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const EmConfiguration sol = solenoid_configuration({1.0, 0.1});
  const CapacitorConfig cap = CapacitorConfig::from_chord(1.0, pi / 6, 1.0, -0.5, 1.0);
  const EmConfiguration capc = capacitor_configuration(cap);
  const DifferenceSteps steps{1e-7, 1e-7};
  int checked = 0;
  while (checked < 100) {
    const Event e{0.6 * u(rng), {0.5 * u(rng), 0.5 * u(rng), 0.5 * u(rng)}};
    // stay clear of the discontinuity surfaces
    const double rho = std::hypot(e.pos.x, e.pos.y);
    const double xi = dot(cap.field_direction(), e.pos);
    if (std::abs(rho - 0.1) < 1e-4 || std::abs(std::abs(xi) - 0.5 * cap.gap) < 1e-4) continue;
    if (std::abs(e.t + 0.5) < 1e-4 || std::abs(e.t - 0.5) < 1e-4) continue;
    const FieldSample fs = sol.field(e);
    const FieldSample ds = derived_field(sol, e, steps);
    EXPECT_LE(rel(ds.B, fs.B, 1.0), 1e-6);
    EXPECT_LE(rel(ds.E, fs.E, 1.0), 1e-6);
    const FieldSample fc = capc.field(e);
    const FieldSample dc = derived_field(capc, e, steps);
    EXPECT_LE(rel(dc.E, fc.E, 1.0), 1e-6);
    EXPECT_LE(rel(dc.B, fc.B, 1.0), 1e-6);
    ++checked;
  }
}

TEST(GaugeCompatibility, PolynomialGaugeFieldsAreExactDerivatives) {
  std::mt19937_64 rng(5);
  const PolynomialGauge g = PolynomialGauge::random(rng, 3);
  const EmConfiguration cfg = polynomial_configuration(g);
  for (int i = 0; i < 20; ++i) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Event e{u(rng), {u(rng), u(rng), u(rng)}};
    const FieldSample f = cfg.field(e);
    const FieldSample d = derived_field(cfg, e, {1e-5, 1e-5});
    const double scale = std::max(1.0, f.E.norm() + f.B.norm());
    EXPECT_LE(rel(d.E, f.E, scale), 1e-8);
    EXPECT_LE(rel(d.B, f.B, scale), 1e-8);
  }
}

TEST(BoostField, IdentityAndPaperValues) {
  const FieldSample f{{1, 2, 3}, {4, 5, 6}};
  const FieldSample g = boost_field(f, Boost());
  EXPECT_EQ(g.E, f.E);
  EXPECT_EQ(g.B, f.B);

  const double B0 = 1.0;
  const double v = 0.6 * c;
  const FieldSample s = boost_field({{}, {0, 0, B0}}, Boost(Vec3{v, 0, 0}));
  EXPECT_NEAR(s.E.y, -1.25 * v * B0, 1e-15 * v);
  EXPECT_NEAR(s.E.x, 0.0, 1e-15);
  EXPECT_NEAR(s.B.z, 1.25 * B0, 1e-15);

  const double E = 1.0;
  const double th = pi / 6;
  const FieldSample k = boost_field({E * Vec3{std::cos(th), 0, std::sin(th)}, {}}, Boost(Vec3{v, 0, 0}));
  EXPECT_NEAR(k.B.y, 1.25 * v * E * std::sin(th) / (c * c), 1e-15 * std::abs(k.B.y));
  EXPECT_NEAR(k.B.x, 0.0, 1e-30);
  EXPECT_NEAR(k.B.z, 0.0, 1e-30);
  EXPECT_NEAR(k.E.x, E * std::cos(th), 1e-15);
  EXPECT_NEAR(k.E.z, 1.25 * E * std::sin(th), 1e-15);
}

TEST(BoostPotential, IdentityAndComposition) {
  const PotentialSample p{3.0, {0.2, -0.4, 1.0}};
  const PotentialSample q = boost_potential(p, Boost());
  EXPECT_EQ(q.V, p.V);
  EXPECT_EQ(q.A, p.A);

  const double v = 0.5;
  const Boost half = Boost::along_x(v, 1.0);
  const Vec3 w = compose_velocities({v, 0, 0}, {v, 0, 0}, 1.0);
  const PotentialSample twice = boost_potential(boost_potential(p, half), half);
  const PotentialSample once = boost_potential(p, Boost(w, 1.0));
  EXPECT_NEAR(twice.V, once.V, 1e-10);
  EXPECT_NEAR((twice.A - once.A).norm(), 0.0, 1e-10);
}

TEST(BoostedConfiguration, IdentityIsUnchanged) {
  const EmConfiguration cfg = solenoid_configuration({1.0, 0.1});
  const EmConfiguration b = boosted_configuration(cfg, Boost());
  const Event e{1e-9, {0.05, 0.02, 0.0}};
  EXPECT_EQ(b.field(e).B, cfg.field(e).B);
  EXPECT_EQ(b.potential(e).A, cfg.potential(e).A);
  EXPECT_EQ(b.boundaries.size(), cfg.boundaries.size());
}

TEST(BoostedConfiguration, SolenoidInteriorCarriesUniformElectricField) {
  const double v = 0.5 * c;
  const double g = 1.0 / std::sqrt(0.75);
  const EmConfiguration b = boosted_configuration(solenoid_configuration({1.0, 0.1}), Boost(Vec3{v, 0, 0}));
  // the solenoid moves with -v in the boosted frame; its axis passes x' = -v t'
  for (double tp : {0.0, 1e-9, 3e-9}) {
    for (const Vec3& off : {Vec3{0, 0, 0}, Vec3{0.02, 0.05, 1.0}, Vec3{-0.04, -0.03, -2.0}}) {
      const Event e{tp, Vec3{-v * tp, 0, 0} + off};
      const FieldSample f = b.field(e);
      EXPECT_NEAR(f.E.y, -g * v, 1e-12 * g * v);
      EXPECT_NEAR(f.B.z, g, 1e-12);
    }
  }
}

TEST(BoostedConfiguration, SolenoidGaugeReproducesBoostedFields) {
  const EmConfiguration rest = solenoid_configuration({1.0, 0.1});
  const Boost b(Vec3{0.5 * c, 0, 0});
  const EmConfiguration moving = boosted_configuration(rest, b);
  const DifferenceSteps steps = DifferenceSteps::natural(1e-6, c);
  for (const Event& e_rest : {Event{0.0, {0.02, 0.03, 0}}, Event{2e-9, {0.3, -0.2, 0.1}}, Event{-1e-9, {-0.6, 0.4, 0}}}) {
    const Event e = boost_event(e_rest, b);
    const FieldSample expect = boost_field(rest.field(e_rest), b);
    const FieldSample got = derived_field(moving, e, steps);
    const double scale = c * 1.0;  // |E| scale in V/m for B0 = 1 T
    EXPECT_LE(rel(got.E, expect.E, scale), 1e-8);
    EXPECT_LE(rel(got.B, expect.B, 1.0), 1e-8);
  }
}

TEST(BoostedConfiguration, CapacitorPulseIsDilated) {
  const double cc = 1.0;
  const double T = 0.1;
  const double beta = 0.6;
  const double g = 1.25;
  const CapacitorConfig cap = CapacitorConfig::from_chord(1.0, pi / 6, 10.0, 0.0, T);
  const EmConfiguration b = boosted_configuration(capacitor_configuration(cap), Boost::along_x(beta, cc));
  // a clock fixed in the capacitor frame sees T; in the boosted frame that clock moves with -v
  auto lit = [&](const auto& where, double mid) {
    auto on = [&](double tp) { return b.field(where(tp)).E.norm() > 0.0; };
    auto edge = [&](double lo, double hi, bool rising) {
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (on(mid) == rising ? hi : lo) = mid;
      }
      return 0.5 * (lo + hi);
    };
    return edge(mid, 1.0, false) - edge(-1.0, mid, true);
  };
  const double moving = lit([&](double tp) { return Event{tp, {-beta * tp, 0.0, 0.0}}; }, 0.5 * g * T);
  const double fixed = lit([&](double tp) { return Event{tp, {0.0, 0.0, 0.0}}; }, 0.5 * T / g);
  EXPECT_NEAR(moving, g * T, 1e-12);
  EXPECT_NEAR(fixed, T / g, 1e-12);
}

TEST(FieldInvariants, PreservedByBoost) {
  const FieldSample f{{1e8, -2e8, 3e7}, {0.2, 0.5, -1.0}};
  const Boost b(Vec3{0.3 * c, -0.5 * c, 0.1 * c});
  const FieldSample g = boost_field(f, b);
  EXPECT_NEAR(field_invariant_dot(g), field_invariant_dot(f), 1e-9 * std::abs(field_invariant_dot(f)));
  EXPECT_NEAR(field_invariant_square(g, c), field_invariant_square(f, c),
              1e-9 * std::abs(field_invariant_square(f, c)));
}
