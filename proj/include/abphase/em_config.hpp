#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "abphase/constants.hpp"
#include "abphase/polynomial.hpp"
#include "abphase/spacetime.hpp"
#include "abphase/vec.hpp"

namespace abphase {

struct FieldSample {
  Vec3 E;  // V/m
  Vec3 B;  // T
};

struct PotentialSample {
  double V = 0.0;  // V
  Vec3 A;          // V s / m
};

/// Opaque region label. Fields and potentials are smooth inside each label
/// region; label changes mark the discontinuity surfaces that quadrature must
/// resolve. Label 0 is the field-free exterior.
using RegionLabel = int;

/// Smooth scalar function of an event; its zero set is a discontinuity surface.
using BoundaryFunction = std::function<double(const Event&)>;

/// Fields, a compatible gauge, and a region labelling, all as functions of an event.
///
/// `boundaries` optionally lists smooth functions whose zero sets contain every
/// label change. Quadrature uses them to find crossings and near-tangent
/// contacts that sampling the labels alone can miss.
struct EmConfiguration {
  std::function<FieldSample(const Event&)> field;
  std::function<PotentialSample(const Event&)> potential;
  std::function<RegionLabel(const Event&)> region;
  std::vector<BoundaryFunction> boundaries;
};

/// Infinite cylindrical solenoid with uniform interior field B0 along its axis.
struct SolenoidConfig {
  double B0 = 1.0;      // T
  double radius = 0.1;  // m
  Vec3 axis_point{0.0, 0.0, 0.0};
  Vec3 axis_direction{0.0, 0.0, 1.0};

  void validate() const;
};

/// Parallel-plate capacitor pulsed on for a duration T.
///
/// The field E_mag (sin(theta) z + cos(theta) x) is normal to the plates. The
/// slab is infinite transverse to its normal. A chord of length L through the
/// slab at angle theta on the other side of x has gap d = L cos(2 theta).
struct CapacitorConfig {
  double E_mag = 1.0;          // V/m
  double theta = 0.0;          // rad, in [0, pi/4)
  Vec3 center{0.0, 0.0, 0.0};  // slab mid-plane point
  double gap = 1.0;            // m
  double t_I = 0.0;            // s, pulse start
  double duration = 1.0;       // s
  double chord_length = 1.0;   // m
  /// Width of the cosine taper at each pulse edge (0 = rectangular). The taper
  /// is centred on the nominal edge, so the time integral of the window stays T.
  double ramp_width = 0.0;  // s

  static CapacitorConfig from_chord(double E_mag, double theta, double chord_length, double t_I, double duration,
                                    const Vec3& center = {});

  /// Unit field direction, also the plate normal.
  [[nodiscard]] Vec3 field_direction() const;
  /// Unit chord direction (cos(theta), 0, -sin(theta)); V drops along it inside the slab.
  [[nodiscard]] Vec3 chord_direction() const;
  /// Pulse window value in [0, 1] at time t.
  [[nodiscard]] double window(double t) const;

  void validate() const;
};

EmConfiguration solenoid_configuration(const SolenoidConfig& cfg);
EmConfiguration capacitor_configuration(const CapacitorConfig& cfg);

/// Smooth synthetic gauge: polynomial V and A, fields derived exactly.
struct PolynomialGauge {
  Polynomial4 V;
  std::array<Polynomial4, 3> A;

  static PolynomialGauge random(std::mt19937_64& rng, int degree, double scale = 1.0);
};

EmConfiguration polynomial_configuration(const PolynomialGauge& gauge);

FieldSample boost_field(const FieldSample& f, const Boost& b);
PotentialSample boost_potential(const PotentialSample& p, const Boost& b);

/// The configuration as seen from the boosted frame: rest-frame functions are
/// evaluated at inverse-boosted events and their values transformed.
EmConfiguration boosted_configuration(const EmConfiguration& cfg, const Boost& b);

/// Finite-difference steps for derivatives of spacetime functions.
struct DifferenceSteps {
  double dt = 1e-6 / si::speed_of_light;  // s
  double dx = 1e-6;                       // m

  static DifferenceSteps natural(double dx, double c) { return {dx / c, dx}; }
};

/// (-grad V - dA/dt, curl A) by central differences of cfg.potential.
FieldSample derived_field(const EmConfiguration& cfg, const Event& e, const DifferenceSteps& steps = {});

/// Lorentz invariants E.B and |E|^2 - c^2 |B|^2.
double field_invariant_dot(const FieldSample& f);
double field_invariant_square(const FieldSample& f, double c);

}  // namespace abphase
