#include "abphase/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "abphase/errors.hpp"

namespace abphase {

namespace {

constexpr double kPi = std::numbers::pi;

// Distance from point p to the segment [a, b], all in the plane normal to the axis.
double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.norm2();
  const double w = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + w * ab)).norm();
}

std::array<Vec3, 4> square_corners(const SolenoidScenario& s) {
  // lower-left, lower-right, upper-right, upper-left
  const Vec3 c = s.solenoid.axis_point + s.offset;
  const double h = s.half_side;
  return {c + Vec3{-h, -h, 0.0}, c + Vec3{h, -h, 0.0}, c + Vec3{h, h, 0.0}, c + Vec3{-h, h, 0.0}};
}

// Along-x boosts only: the closed forms assume the motion plane contains v.
double require_x_boost(const Boost& b, const char* who) {
  const Vec3& v = b.velocity();
  if (v.y != 0.0 || v.z != 0.0) {
    throw DomainError(std::string(who) + ": boost must be along x");
  }
  return v.x;
}

}  // namespace

Scenario boosted(const Scenario& sc, const Boost& b) {
  if (b.c() != sc.c) {
    throw DomainError("boosted: boost and scenario use different values of c");
  }
  return {boost_pair(sc.pair, b), boosted_configuration(sc.config, b), sc.c};
}

// ---------------------------------------------------------------------------

bool SolenoidScenario::encloses_axis() const {
  const Vec3 d = offset;
  return std::abs(d.x) < half_side && std::abs(d.y) < half_side;
}

void SolenoidScenario::validate() const {
  solenoid.validate();
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("solenoid scenario: c must be positive");
  if (!(half_side > 0.0) || !std::isfinite(half_side)) {
    throw GeometryError("solenoid scenario: half_side must be positive");
  }
  if (!(packet_speed > 0.0) || !(packet_speed < c)) {
    throw DomainError("solenoid scenario: packet speed must lie in (0, c)");
  }
  const Vec3 ax = solenoid.axis_direction / solenoid.axis_direction.norm();
  if (std::abs(std::abs(ax.z) - 1.0) > 1e-12) {
    throw GeometryError("solenoid scenario: the square lies in a z = const plane, so the axis must be along z");
  }
  if (offset.z != 0.0 || !offset.finite()) {
    throw GeometryError("solenoid scenario: offset must lie in the plane of the square");
  }
  if (offset == Vec3{} && half_side <= solenoid.radius) {
    throw GeometryError("solenoid scenario: square does not enclose the solenoid (half_side <= r)");
  }
  const auto k = square_corners(*this);
  const Vec3 p = solenoid.axis_point;
  for (int i = 0; i < 4; ++i) {
    if (segment_distance(p, k[i], k[(i + 1) % 4]) <= solenoid.radius) {
      throw GeometryError("solenoid scenario: an interferometer arm enters the solenoid");
    }
  }
}

Scenario build_solenoid_scenario(const SolenoidScenario& s) {
  s.validate();
  const auto k = square_corners(s);
  const double leg = 2.0 * s.half_side / s.packet_speed;
  Worldline a({{0.0, k[0]}, {leg, k[1]}, {2.0 * leg, k[2]}});
  Worldline b({{0.0, k[0]}, {leg, k[3]}, {2.0 * leg, k[2]}});
  return {WorldlinePair(std::move(a), std::move(b)), solenoid_configuration(s.solenoid), s.c};
}

Boost solenoid_special_frame(const SolenoidScenario& s) {
  s.validate();
  return Boost(Vec3{s.packet_speed, 0.0, 0.0}, s.c);
}

ReferenceValues solenoid_references(const SolenoidScenario& s, const Boost& b) {
  const double v = require_x_boost(b, "solenoid_references");
  const double k = s.coupling.q_over_hbar();
  const double B0 = s.solenoid.B0;
  const double r = s.solenoid.radius;
  const double g = b.gamma();

  ReferenceValues out;
  out.phi_S = k * B0 * kPi * r * r;
  // gamma^2 (1 - v^2/c^2) is 1 algebraically.
  out.phi_Sprime = k * g * B0 * g * (1.0 - v * v / (s.c * s.c)) * kPi * r * r;
  out.E_prime_0 = -g * v * B0;
  out.B_prime = g * B0;
  if (v != 0.0) {
    const double dt = 2.0 * r / (std::abs(v) * g);
    out.delta_t_prime = dt;
    out.phi_electric_crossing = -k * (*out.E_prime_0) * kPi * 2.0 * r * dt / 4.0;
  }
  if (v == 0.0) {
    out.phi_magnetic_Sprime = out.phi_S;
    out.phi_electric_Sprime = 0.0;
  } else if (std::abs(v - s.packet_speed) <= 1e-12 * s.packet_speed) {
    out.phi_magnetic_Sprime = 0.0;
    out.phi_electric_Sprime = out.phi_S;
  }
  return out;
}

// ---------------------------------------------------------------------------

Vec3 CapacitorScenario::packet_a() const {
  return capacitor.center - (0.5 * capacitor.chord_length + standoff) * capacitor.chord_direction();
}

Vec3 CapacitorScenario::packet_b() const {
  return capacitor.center + (0.5 * capacitor.chord_length + standoff) * capacitor.chord_direction();
}

double CapacitorScenario::effective_travel_time() const {
  if (travel_time > 0.0) return travel_time;
  return capacitor.duration + 4.0 * (packet_b() - packet_a()).norm() / c;
}

double CapacitorScenario::effective_hold_margin() const {
  if (hold_margin > 0.0) return hold_margin;
  return 0.5 * capacitor.duration + capacitor.ramp_width + 4.0 * (packet_b() - packet_a()).norm() / c;
}

void CapacitorScenario::validate() const {
  capacitor.validate();
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("capacitor scenario: c must be positive");
  if (!(standoff > 0.0) || !std::isfinite(standoff)) {
    throw GeometryError("capacitor scenario: standoff must be positive so the packets stay outside the slab");
  }
  if (travel_time < 0.0 || hold_margin < 0.0 || !std::isfinite(travel_time) || !std::isfinite(hold_margin)) {
    throw DomainError("capacitor scenario: travel_time and hold_margin must be non-negative");
  }
  if (!std::isfinite(drift_speed) || !(std::abs(drift_speed) < c)) {
    throw DomainError("capacitor scenario: drift speed must be finite and below c");
  }
  // Pulse edges with their tapers must sit inside the hold window.
  if (hold_margin > 0.0 && hold_margin <= 0.5 * capacitor.ramp_width) {
    throw GeometryError("capacitor scenario: hold margin does not cover the pulse tapers");
  }
}

Scenario build_capacitor_scenario(const CapacitorScenario& s) {
  s.validate();
  const CapacitorConfig& cap = s.capacitor;
  const double hold = s.effective_hold_margin();
  const double travel = s.effective_travel_time();
  const double h0 = cap.t_I - hold;
  const double h1 = cap.t_I + cap.duration + hold;
  const double t0 = h0 - travel;
  const double tf = h1 + travel;
  const Vec3 xa = s.packet_a();
  const Vec3 xb = s.packet_b();
  const Vec3 drift{0.0, s.drift_speed * (h1 - h0), 0.0};

  Worldline a({{t0, xa}, {h0, xa}, {h1, xa + drift}, {tf, xa}});
  Worldline b({{t0, xa}, {h0, xb}, {h1, xb + drift}, {tf, xa}});
  a.require_subluminal(s.c);
  b.require_subluminal(s.c);
  return {WorldlinePair(std::move(a), std::move(b)), capacitor_configuration(cap), s.c};
}

Boost capacitor_null_electric_boost(const CapacitorScenario& s) {
  const double th = s.capacitor.theta;
  if (!(th > 0.0) || !(th < kPi / 4.0)) {
    std::ostringstream os;
    os << "capacitor_null_electric_boost: theta = " << th << " rad has no subluminal solution; need 0 < theta < pi/4";
    throw DomainError(os.str());
  }
  const double t = std::tan(th);
  return Boost(Vec3{s.c * std::sqrt(1.0 - t * t), 0.0, 0.0}, s.c);
}

ReferenceValues capacitor_references(const CapacitorScenario& s, const Boost& b) {
  const double v = require_x_boost(b, "capacitor_references");
  const CapacitorConfig& cap = s.capacitor;
  const double k = s.coupling.q_over_hbar();
  const double E = cap.E_mag;
  const double L = cap.chord_length;
  const double T = cap.duration;
  const double th = cap.theta;
  const double g = b.gamma();
  const double sn = std::sin(th);
  const double cs = std::cos(th);

  ReferenceValues out;
  out.phi_S = -k * E * L * T * std::cos(2.0 * th);
  out.B_prime = g * v * E * sn / (s.c * s.c);
  out.parallelogram_area = std::abs(v) * g * T * L * sn;
  // E'.L' on the equal-t' chord, and the flux through the (x', t') parallelogram.
  out.E_dot_L_prime = E * L * (cs * cs - g * g * sn * sn) / g;
  out.phi_electric_Sprime = -k * g * T * (*out.E_dot_L_prime);
  out.phi_magnetic_Sprime = -k * E * L * T * g * g * (v * v / (s.c * s.c)) * sn * sn;
  out.phi_Sprime = *out.phi_magnetic_Sprime + *out.phi_electric_Sprime;
  if (th > 0.0 && th < kPi / 4.0) {
    const double t = std::tan(th);
    out.v_null_electric = s.c * std::sqrt(1.0 - t * t);
  }
  return out;
}

}  // namespace abphase
