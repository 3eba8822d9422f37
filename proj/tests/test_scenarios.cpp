#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "abphase/errors.hpp"
#include "abphase/holonomy.hpp"
#include "abphase/scenarios.hpp"

using namespace abphase;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double c = si::speed_of_light;
constexpr Coupling unit = Coupling::unit();

SolenoidScenario solenoid(double beta_packet = 0.5) {
  SolenoidScenario s;
  s.packet_speed = beta_packet * c;
  s.coupling = unit;
  return s;
}

CapacitorScenario capacitor() {
  CapacitorScenario s;
  s.c = 1.0;
  s.coupling = unit;
  return s;
}

QuadratureSpec tight(double tol) {
  QuadratureSpec q;
  q.tol = tol;
  return q;
}

PhaseDecomposition flux(const Scenario& sc, double tol = 1e-10) {
  return flux_phase(ruled_surface_equal_time(sc.pair), sc.config, unit, tight(tol));
}

// Midpoint rule on an n x n grid over the equal-time ruled surface, with the
// tangents written out from the worldline velocities.
std::array<double, 2> dense_flux(const Scenario& sc, int n) {
  const Worldline& a = sc.pair.a();
  const Worldline& b = sc.pair.b();
  const double t0 = a.t0();
  const double span = a.tf() - t0;
  double mag = 0.0;
  double ele = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + span * (i + 0.5) / n;
    const Vec3 pa = a.position_at_time(t);
    const Vec3 pb = b.position_at_time(t);
    const Vec3 va = a.velocity_at_time(t);
    const Vec3 vb = b.velocity_at_time(t);
    for (int j = 0; j < n; ++j) {
      const double s = (j + 0.5) / n;
      const Vec3 x = (1.0 - s) * pa + s * pb;
      const Vec3 du = span * ((1.0 - s) * va + s * vb);
      const Vec3 ds = pb - pa;
      const FieldSample f = sc.config.field({t, x});
      mag += dot(f.B, cross(du, ds));
      ele += -dot(f.E, span * ds);
    }
  }
  const double w = 1.0 / (static_cast<double>(n) * n);
  return {mag * w, ele * w};
}

}  // namespace

TEST(SolenoidScenario, ValidationErrors) {
  SolenoidScenario s = solenoid();
  s.half_side = 0.05;
  EXPECT_THROW(build_solenoid_scenario(s), GeometryError);
  s = solenoid();
  s.offset = {0.5, 0.0, 0.0};  // right side runs over the axis
  EXPECT_THROW(build_solenoid_scenario(s), GeometryError);
  s = solenoid();
  s.solenoid.axis_direction = {1, 0, 0};
  EXPECT_THROW(build_solenoid_scenario(s), GeometryError);
  s = solenoid();
  s.packet_speed = c;
  EXPECT_THROW(build_solenoid_scenario(s), DomainError);
  s = solenoid();
  s.solenoid.radius = 0.0;
  EXPECT_THROW(build_solenoid_scenario(s), GeometryError);
  EXPECT_THROW(solenoid_references(solenoid(), Boost(Vec3{0, 0.1 * c, 0})), DomainError);
}

TEST(SolenoidScenario, PathsShareEndpointsAndSpeed) {
  const SolenoidScenario s = solenoid();
  const Scenario sc = build_solenoid_scenario(s);
  EXPECT_EQ(sc.pair.a().front(), sc.pair.b().front());
  EXPECT_EQ(sc.pair.a().back(), sc.pair.b().back());
  EXPECT_NEAR(sc.pair.a().max_speed(), s.packet_speed, 1e-6);
  EXPECT_NEAR(sc.pair.b().max_speed(), s.packet_speed, 1e-6);
  EXPECT_TRUE(s.encloses_axis());
}

TEST(SolenoidReferences, RestFrameAndHandValues) {
  const SolenoidScenario s = solenoid();
  const ReferenceValues r0 = solenoid_references(s, Boost());
  EXPECT_NEAR(r0.phi_S, pi * 1e-2, 1e-17);
  EXPECT_EQ(r0.phi_Sprime, r0.phi_S);
  EXPECT_EQ(*r0.phi_electric_Sprime, 0.0);
  EXPECT_FALSE(r0.delta_t_prime.has_value());

  const double v = 0.6 * c;
  const Boost b(Vec3{v, 0, 0});
  const ReferenceValues r = solenoid_references(s, b);
  const FieldSample f = boost_field({{}, {0, 0, 1.0}}, b);
  EXPECT_NEAR(*r.E_prime_0, f.E.y, 1e-15 * std::abs(f.E.y));
  EXPECT_NEAR(*r.B_prime, f.B.z, 1e-15);
  EXPECT_NEAR(*r.delta_t_prime, 2.0 * 0.1 / (v * 1.25), 1e-24);
  EXPECT_NEAR(r.phi_Sprime, r.phi_S, 1e-15);
  // the electric flux of one crossing equals the rest-frame magnetic flux
  EXPECT_NEAR(*r.phi_electric_crossing, r.phi_S, 1e-15);
}

TEST(SolenoidReferences, CrossingTimeMatchesBoostedField) {
  const SolenoidScenario s = solenoid();
  const double v = 0.6 * c;
  const Boost b(Vec3{v, 0, 0});
  const EmConfiguration moving = boosted_configuration(solenoid_configuration(s.solenoid), b);
  // a point fixed in the boosted frame, crossed by the moving tube
  const Vec3 x{-0.3, 0.0, 0.0};
  auto inside = [&](double tp) { return moving.field({tp, x}).B.norm() > 0.0; };
  auto edge = [&](double lo, double hi, bool rising) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (inside(mid) == rising ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double centre = 0.3 / v;
  const double dt = edge(centre, 1.0, false) - edge(-1.0, centre, true);
  EXPECT_NEAR(dt, *solenoid_references(s, b).delta_t_prime, 1e-9 * dt);
}

TEST(CapacitorScenario, ValidationErrors) {
  CapacitorScenario s = capacitor();
  s.standoff = 0.0;
  EXPECT_THROW(build_capacitor_scenario(s), GeometryError);
  s = capacitor();
  s.drift_speed = 1.0;
  EXPECT_THROW(build_capacitor_scenario(s), DomainError);
  s = capacitor();
  s.capacitor = CapacitorConfig::from_chord(1.0, pi / 4, 1.0, -0.5, 1.0);
  EXPECT_THROW(build_capacitor_scenario(s), GeometryError);
  EXPECT_THROW(capacitor_null_electric_boost(s), DomainError);
  s.capacitor = CapacitorConfig::from_chord(1.0, 0.0, 1.0, -0.5, 1.0);
  EXPECT_THROW(capacitor_null_electric_boost(s), DomainError);
  s = capacitor();
  s.travel_time = 0.1;  // packet b would cross the chord faster than light
  EXPECT_THROW(build_capacitor_scenario(s), GeometryError);
}

TEST(CapacitorScenario, PacketsSitOutsideThePlates) {
  const CapacitorScenario s = capacitor();
  const Vec3 n = s.capacitor.field_direction();
  const double half = 0.5 * s.capacitor.gap;
  EXPECT_LT(dot(s.packet_a() - s.capacitor.center, n), -half);
  EXPECT_GT(dot(s.packet_b() - s.capacitor.center, n), half);
  const Scenario sc = build_capacitor_scenario(s);
  // no field is seen on either path
  EXPECT_FALSE(potential_holonomy(sc.pair, sc.config, unit, {}, sc.c).field_on_path);
}

TEST(CapacitorReferences, HandValuesAndFieldCrossChecks) {
  const CapacitorScenario s = capacitor();
  const double th = pi / 6;
  EXPECT_NEAR(capacitor_references(s, Boost()).phi_S, -0.5, 1e-15);

  const Boost null = capacitor_null_electric_boost(s);
  EXPECT_NEAR(null.speed(), 0.81650, 5e-6);
  EXPECT_NEAR(null.gamma(), 1.0 / std::tan(th), 1e-14);
  const ReferenceValues rn = capacitor_references(s, null);
  EXPECT_NEAR(*rn.v_null_electric, null.speed(), 1e-15);
  EXPECT_NEAR(*rn.E_dot_L_prime, 0.0, 1e-15);
  EXPECT_NEAR(*rn.phi_electric_Sprime, 0.0, 1e-15);
  EXPECT_NEAR(*rn.phi_magnetic_Sprime, -0.5, 1e-14);

  const double v = 0.6;
  const Boost b(Vec3{v, 0, 0}, 1.0);
  const ReferenceValues r = capacitor_references(s, b);
  const CapacitorConfig& cap = s.capacitor;
  const FieldSample f = boost_field({cap.E_mag * cap.field_direction(), {}}, b);
  EXPECT_NEAR(*r.B_prime, f.B.y, 1e-15);
  // chord between two plate points at equal boosted time
  const Vec3 p1 = cap.center - 0.5 * cap.chord_length * cap.chord_direction();
  const Vec3 p2 = cap.center + 0.5 * cap.chord_length * cap.chord_direction();
  const double t2 = v * (p2.x - p1.x);
  const Event q1 = boost_event({0.0, p1}, b);
  const Event q2 = boost_event({t2, p2}, b);
  ASSERT_NEAR(q1.t, q2.t, 1e-15);
  EXPECT_NEAR(*r.E_dot_L_prime, dot(f.E, q2.pos - q1.pos), 1e-14);
  EXPECT_NEAR(*r.parallelogram_area, v * 1.25 * 1.0 * 1.0 * 0.5, 1e-15);
  EXPECT_NEAR(r.phi_Sprime, -0.5, 1e-14);
}

TEST(SolenoidPhase, RestFrameBothRoutes) {
  const Scenario sc = build_solenoid_scenario(solenoid());
  const PhaseDecomposition p = flux(sc);
  EXPECT_NEAR(p.total, pi * 1e-2, 1e-8);
  EXPECT_NEAR(p.electric, 0.0, 1e-10);
  EXPECT_NEAR(potential_phase(sc.pair, sc.config, unit), pi * 1e-2, 1e-8);
}

TEST(SolenoidPhase, NonEnclosingLoopHasNoPhase) {
  SolenoidScenario s = solenoid();
  s.offset = {1.0, 0.2, 0.0};
  EXPECT_FALSE(s.encloses_axis());
  const Scenario sc = build_solenoid_scenario(s);
  EXPECT_NEAR(flux(sc).total, 0.0, 1e-9);
  EXPECT_NEAR(potential_phase(sc.pair, sc.config, unit), 0.0, 1e-9);
  const Scenario moving = boosted(sc, Boost::along_x(0.6));
  EXPECT_NEAR(flux(moving).total, 0.0, 1e-9);
}

TEST(SolenoidPhase, LoopSizeDoesNotMatter) {
  const double ref = pi * 1e-2;
  for (double h : {0.2, 0.5, 1.0, 2.0}) {
    SolenoidScenario s = solenoid();
    s.half_side = h;
    const Scenario sc = build_solenoid_scenario(s);
    EXPECT_NEAR(flux(sc).total, ref, 1e-8 * ref) << h;
    // also with the square shifted off centre
    s.offset = {0.5 * (h - 0.1), -0.3 * (h - 0.1), 0.0};
    EXPECT_NEAR(flux(build_solenoid_scenario(s)).total, ref, 1e-8 * ref) << h;
  }
}

TEST(SolenoidPhase, TimingReparametrizationDoesNotMatter) {
  const Scenario sc = build_solenoid_scenario(solenoid(0.2));
  const Worldline a = sc.pair.a().retimed([](double w) { return w + 0.3 * std::sin(pi * w) / pi; });
  const Worldline b = sc.pair.b().retimed([](double w) { return w - 0.2 * std::sin(pi * w) / pi; });
  const Scenario warped{WorldlinePair(a, b), sc.config, sc.c};
  EXPECT_NE(warped.pair.a().knots()[1].t, sc.pair.a().knots()[1].t);
  const double ref = pi * 1e-2;
  EXPECT_NEAR(potential_phase(warped.pair, warped.config, unit), ref, 1e-9);
  EXPECT_NEAR(flux(warped).total, ref, 1e-8 * ref);
  const Scenario moving = boosted(warped, Boost::along_x(0.5));
  EXPECT_NEAR(flux(moving).total, ref, 1e-7 * ref);
}

TEST(SolenoidPhase, BoostedPartsMatchADenseOracle) {
  const Scenario rest = build_solenoid_scenario(solenoid());
  for (double beta : {0.3, 0.6}) {
    const Scenario sc = boosted(rest, Boost::along_x(beta));
    const PhaseDecomposition p = flux(sc);
    const auto oracle = dense_flux(sc, 1500);
    const double scale = std::abs(p.total);
    EXPECT_NEAR(p.magnetic, oracle[0], 2e-3 * scale) << beta;
    EXPECT_NEAR(p.electric, oracle[1], 2e-3 * scale) << beta;
    EXPECT_GT(std::abs(p.electric), 1e-2 * scale);
  }
}

TEST(SolenoidPhase, MagneticPartChangesSignThroughThePacketSpeed) {
  const SolenoidScenario s = solenoid(0.5);
  const Scenario rest = build_solenoid_scenario(s);
  const double below = flux(boosted(rest, Boost::along_x(0.4))).magnetic;
  const PhaseDecomposition at = flux(boosted(rest, solenoid_special_frame(s)));
  const double above = flux(boosted(rest, Boost::along_x(0.6))).magnetic;
  EXPECT_GT(below, 0.0);
  EXPECT_LT(above, 0.0);
  EXPECT_LE(std::abs(at.magnetic), 1e-6 * std::abs(at.total));
  const ReferenceValues r = solenoid_references(s, solenoid_special_frame(s));
  EXPECT_NEAR(at.electric, *r.phi_electric_crossing, 1e-6 * std::abs(*r.phi_electric_crossing));
}

TEST(CapacitorPhase, RestAndBoostedFramesMatchReferences) {
  const CapacitorScenario s = capacitor();
  const Scenario rest = build_capacitor_scenario(s);
  const PhaseDecomposition p0 = flux(rest);
  EXPECT_NEAR(p0.total, -0.5, 1e-8);
  EXPECT_NEAR(p0.magnetic, 0.0, 1e-10);
  for (double beta : {0.3, 0.6, -0.5}) {
    const Boost b = Boost::along_x(beta, 1.0);
    const ReferenceValues r = capacitor_references(s, b);
    const PhaseDecomposition p = flux(boosted(rest, b));
    EXPECT_NEAR(p.total, r.phi_Sprime, 1e-8) << beta;
    EXPECT_NEAR(p.magnetic, *r.phi_magnetic_Sprime, 1e-8) << beta;
    EXPECT_NEAR(p.electric, *r.phi_electric_Sprime, 1e-8) << beta;
  }
}

TEST(CapacitorPhase, DriftAlongThePlatesChangesNothing) {
  CapacitorScenario s = capacitor();
  s.drift_speed = 0.1;
  const Scenario sc = build_capacitor_scenario(s);
  EXPECT_NEAR(flux(sc).total, -0.5, 1e-8);
  EXPECT_NEAR(flux(boosted(sc, Boost::along_x(0.4, 1.0))).total, -0.5, 1e-8);
}

TEST(Boosted, RejectsMismatchedSpeedOfLight) {
  const Scenario sc = build_capacitor_scenario(capacitor());
  EXPECT_THROW(boosted(sc, Boost::along_x(0.3)), DomainError);
}
