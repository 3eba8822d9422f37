#include "abphase/em_config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "abphase/errors.hpp"

namespace abphase {

void SolenoidConfig::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw GeometryError("solenoid: radius must be positive");
  if (!std::isfinite(B0)) throw GeometryError("solenoid: B0 must be finite");
  if (!axis_point.finite() || !(axis_direction.norm() > 0.0) || !axis_direction.finite()) {
    throw GeometryError("solenoid: axis must be a finite point and nonzero direction");
  }
}

EmConfiguration solenoid_configuration(const SolenoidConfig& cfg) {
  cfg.validate();
  const Vec3 d = cfg.axis_direction / cfg.axis_direction.norm();
  const Vec3 p = cfg.axis_point;
  const double B0 = cfg.B0;
  const double r2 = cfg.radius * cfg.radius;

  auto radial = [d, p](const Vec3& x) {
    const Vec3 rel = x - p;
    return rel - dot(rel, d) * d;
  };

  EmConfiguration out;
  out.field = [=](const Event& e) -> FieldSample {
    const Vec3 rho = radial(e.pos);
    FieldSample f;
    if (rho.norm2() < r2) f.B = B0 * d;
    return f;
  };
  // symmetric gauge, continuous across rho = r
  out.potential = [=](const Event& e) -> PotentialSample {
    const Vec3 rho = radial(e.pos);
    const double rho2 = rho.norm2();
    PotentialSample ps;
    if (rho2 < r2) {
      ps.A = (0.5 * B0) * cross(d, rho);
    } else {
      ps.A = (0.5 * B0 * r2 / rho2) * cross(d, rho);
    }
    return ps;
  };
  out.region = [=](const Event& e) -> RegionLabel { return radial(e.pos).norm2() < r2 ? 1 : 0; };
  out.boundaries.push_back([=](const Event& e) { return radial(e.pos).norm2() - r2; });
  return out;
}

// ---------------------------------------------------------------------------

CapacitorConfig CapacitorConfig::from_chord(double E_mag, double theta, double chord_length, double t_I,
                                            double duration, const Vec3& center) {
  CapacitorConfig cfg;
  cfg.E_mag = E_mag;
  cfg.theta = theta;
  cfg.chord_length = chord_length;
  cfg.gap = chord_length * std::cos(2.0 * theta);
  cfg.t_I = t_I;
  cfg.duration = duration;
  cfg.center = center;
  return cfg;
}

Vec3 CapacitorConfig::field_direction() const { return {std::cos(theta), 0.0, std::sin(theta)}; }

Vec3 CapacitorConfig::chord_direction() const { return {std::cos(theta), 0.0, -std::sin(theta)}; }

double CapacitorConfig::window(double t) const {
  const double t_end = t_I + duration;
  if (ramp_width <= 0.0) return (t >= t_I && t < t_end) ? 1.0 : 0.0;
  const double h = 0.5 * ramp_width;
  auto rise = [this](double x) { return 0.5 * (1.0 - std::cos(std::numbers::pi * x / ramp_width)); };
  if (t < t_I - h || t >= t_end + h) return 0.0;
  if (t < t_I + h) return rise(t - (t_I - h));
  if (t < t_end - h) return 1.0;
  return 1.0 - rise(t - (t_end - h));
}

void CapacitorConfig::validate() const {
  if (!std::isfinite(E_mag)) throw GeometryError("capacitor: E must be finite");
  if (!(theta >= 0.0 && theta < std::numbers::pi / 4.0)) {
    throw GeometryError("capacitor: theta must lie in [0, pi/4)");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) throw GeometryError("capacitor: pulse duration must be positive");
  if (!(chord_length > 0.0)) throw GeometryError("capacitor: chord length must be positive");
  if (!(ramp_width >= 0.0) || ramp_width >= duration) {
    throw GeometryError("capacitor: ramp width must lie in [0, T)");
  }
  const double expected = chord_length * std::cos(2.0 * theta);
  if (std::abs(gap - expected) > 1e-12 * std::max(1.0, chord_length)) {
    std::ostringstream os;
    os << "capacitor: gap " << gap << " does not equal L cos(2 theta) = " << expected;
    throw GeometryError(os.str());
  }
  if (!center.finite() || !std::isfinite(t_I)) throw GeometryError("capacitor: center and t_I must be finite");
}

EmConfiguration capacitor_configuration(const CapacitorConfig& cfg) {
  cfg.validate();
  const Vec3 n = cfg.field_direction();
  const Vec3 c0 = cfg.center;
  const double half = 0.5 * cfg.gap;
  const double E = cfg.E_mag;

  // 0 below the reference plate, 1 inside, 2 beyond the far plate
  auto side = [=](const Vec3& x) {
    const double xi = dot(n, x - c0);
    if (xi < -half) return 0;
    if (xi > half) return 2;
    return 1;
  };

  EmConfiguration out;
  out.field = [=](const Event& e) -> FieldSample {
    FieldSample f;
    const double w = cfg.window(e.t);
    if (w != 0.0 && side(e.pos) == 1) f.E = (w * E) * n;
    return f;
  };
  out.potential = [=](const Event& e) -> PotentialSample {
    PotentialSample p;
    const double w = cfg.window(e.t);
    if (w == 0.0) return p;
    const double xi = dot(n, e.pos - c0);
    switch (side(e.pos)) {
      case 0:
        p.V = 0.0;
        break;
      case 1:
        p.V = -w * E * (xi + half);
        break;
      default:
        p.V = -w * E * cfg.gap;
        break;
    }
    return p;
  };
  out.region = [=](const Event& e) -> RegionLabel {
    const double t_end = cfg.t_I + cfg.duration;
    const double h = 0.5 * cfg.ramp_width;
    int phase;  // 0 ramp up, 1 flat, 2 ramp down
    if (e.t < cfg.t_I - h || e.t >= t_end + h) return 0;
    if (h > 0.0 && e.t < cfg.t_I + h) {
      phase = 0;
    } else if (h > 0.0 && e.t >= t_end - h) {
      phase = 2;
    } else {
      phase = 1;
    }
    return 1 + 3 * phase + side(e.pos);
  };
  out.boundaries.push_back([=](const Event& e) { return dot(n, e.pos - c0) + half; });
  out.boundaries.push_back([=](const Event& e) { return dot(n, e.pos - c0) - half; });
  const double h = 0.5 * cfg.ramp_width;
  std::vector<double> edges{cfg.t_I, cfg.t_I + cfg.duration};
  if (h > 0.0) edges = {cfg.t_I - h, cfg.t_I + h, cfg.t_I + cfg.duration - h, cfg.t_I + cfg.duration + h};
  for (double te : edges) out.boundaries.push_back([te](const Event& e) { return e.t - te; });
  return out;
}

// ---------------------------------------------------------------------------

PolynomialGauge PolynomialGauge::random(std::mt19937_64& rng, int degree, double scale) {
  PolynomialGauge g;
  g.V = Polynomial4::random(rng, degree, scale);
  for (auto& a : g.A) a = Polynomial4::random(rng, degree, scale);
  return g;
}

EmConfiguration polynomial_configuration(const PolynomialGauge& gauge) {
  using P = Polynomial4;
  const auto& A = gauge.A;
  // E_i = -dV/dx_i - dA_i/dt, B = curl A
  const std::array<P, 3> Ex{-1.0 * gauge.V.derivative(P::X) + -1.0 * A[0].derivative(P::T),
                            -1.0 * gauge.V.derivative(P::Y) + -1.0 * A[1].derivative(P::T),
                            -1.0 * gauge.V.derivative(P::Z) + -1.0 * A[2].derivative(P::T)};
  const std::array<P, 3> Bx{A[2].derivative(P::Y) + -1.0 * A[1].derivative(P::Z),
                            A[0].derivative(P::Z) + -1.0 * A[2].derivative(P::X),
                            A[1].derivative(P::X) + -1.0 * A[0].derivative(P::Y)};
  EmConfiguration out;
  out.field = [Ex, Bx](const Event& e) -> FieldSample {
    return {{Ex[0](e), Ex[1](e), Ex[2](e)}, {Bx[0](e), Bx[1](e), Bx[2](e)}};
  };
  out.potential = [gauge](const Event& e) -> PotentialSample {
    return {gauge.V(e), {gauge.A[0](e), gauge.A[1](e), gauge.A[2](e)}};
  };
  out.region = [](const Event&) -> RegionLabel { return 0; };
  return out;
}

// ---------------------------------------------------------------------------

FieldSample boost_field(const FieldSample& f, const Boost& b) {
  if (b.is_identity()) return f;
  const Vec3& n = b.axis();
  const Vec3& v = b.velocity();
  const double g = b.gamma();
  const double c2 = b.c() * b.c();
  const Vec3 E_par = dot(f.E, n) * n;
  const Vec3 B_par = dot(f.B, n) * n;
  FieldSample out;
  out.E = E_par + g * (f.E - E_par + cross(v, f.B));
  out.B = B_par + g * (f.B - B_par - cross(v, f.E) / c2);
  return out;
}

PotentialSample boost_potential(const PotentialSample& p, const Boost& b) {
  if (b.is_identity()) return p;
  const Vec3& n = b.axis();
  const double g = b.gamma();
  const double c2 = b.c() * b.c();
  PotentialSample out;
  out.V = g * (p.V - dot(b.velocity(), p.A));
  out.A = p.A + ((g - 1.0) * dot(p.A, n) - g * b.speed() * p.V / c2) * n;
  return out;
}

EmConfiguration boosted_configuration(const EmConfiguration& cfg, const Boost& b) {
  if (b.is_identity()) return cfg;
  const Boost inv = b.inverse();
  EmConfiguration out;
  out.field = [cfg, b, inv](const Event& e) { return boost_field(cfg.field(boost_event(e, inv)), b); };
  out.potential = [cfg, b, inv](const Event& e) { return boost_potential(cfg.potential(boost_event(e, inv)), b); };
  out.region = [cfg, inv](const Event& e) { return cfg.region(boost_event(e, inv)); };
  for (const auto& g : cfg.boundaries) {
    out.boundaries.push_back([g, inv](const Event& e) { return g(boost_event(e, inv)); });
  }
  return out;
}

FieldSample derived_field(const EmConfiguration& cfg, const Event& e, const DifferenceSteps& steps) {
  auto at = [&](double dt, const Vec3& dx) { return cfg.potential({e.t + dt, e.pos + dx}); };
  const double hx = steps.dx;
  const double ht = steps.dt;
  const std::array<Vec3, 3> unit{Vec3{hx, 0, 0}, Vec3{0, hx, 0}, Vec3{0, 0, hx}};

  std::array<PotentialSample, 3> plus;
  std::array<PotentialSample, 3> minus;
  for (int i = 0; i < 3; ++i) {
    plus[i] = at(0.0, unit[i]);
    minus[i] = at(0.0, -unit[i]);
  }
  const PotentialSample tp = at(ht, {});
  const PotentialSample tm = at(-ht, {});

  const double inv2x = 1.0 / (2.0 * hx);
  const Vec3 gradV{(plus[0].V - minus[0].V) * inv2x, (plus[1].V - minus[1].V) * inv2x,
                   (plus[2].V - minus[2].V) * inv2x};
  const Vec3 dAdt = (tp.A - tm.A) / (2.0 * ht);
  // dA[j]/dx_i
  auto dA = [&](int i) { return (plus[i].A - minus[i].A) * inv2x; };
  const Vec3 dAx = dA(0);
  const Vec3 dAy = dA(1);
  const Vec3 dAz = dA(2);

  FieldSample f;
  f.E = -gradV - dAdt;
  f.B = {dAy.z - dAz.y, dAz.x - dAx.z, dAx.y - dAy.x};
  return f;
}

double field_invariant_dot(const FieldSample& f) { return dot(f.E, f.B); }

double field_invariant_square(const FieldSample& f, double c) { return f.E.norm2() - c * c * f.B.norm2(); }

}  // namespace abphase
