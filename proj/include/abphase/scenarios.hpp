#pragma once

#include <numbers>
#include <optional>

#include "abphase/constants.hpp"
#include "abphase/em_config.hpp"
#include "abphase/spacetime.hpp"

namespace abphase {

/// A worldline pair together with the configuration it moves through.
struct Scenario {
  WorldlinePair pair;
  EmConfiguration config;
  double c = si::speed_of_light;
};

/// Same scenario seen from the boosted frame.
Scenario boosted(const Scenario& sc, const Boost& b);

/// Square interferometer in the z = const plane around an infinite solenoid.
///
/// The packets split at the (-h, -h) corner and recombine at (+h, +h); path a
/// runs along the bottom then right sides, path b along the left then top.
/// Both move at constant speed and arrive together.
struct SolenoidScenario {
  SolenoidConfig solenoid;
  double half_side = 0.5;                          // m
  double packet_speed = 0.5 * si::speed_of_light;  // m/s
  Vec3 offset{};  // square centre minus axis point; nonzero values allow non-enclosing loops
  double c = si::speed_of_light;
  Coupling coupling{};

  /// True when the loop winds around the solenoid axis.
  [[nodiscard]] bool encloses_axis() const;
  void validate() const;
};

/// Packets held on either side of a pulsed capacitor while it is charged.
///
/// Packet a stays at x_a on the reference-plate side. Packet b starts at x_a,
/// crosses to x_b before the pulse, waits there, and returns after it. During
/// the hold window both may drift along y (parallel to the plates).
struct CapacitorScenario {
  CapacitorConfig capacitor = CapacitorConfig::from_chord(1.0, std::numbers::pi / 6.0, 1.0, -0.5, 1.0);
  double standoff = 0.25;    // m, along the chord beyond each plate
  double travel_time = 0.0;  // s, 0 selects a default that keeps speeds well below c
  double hold_margin = 0.0;  // s, stationary time before and after the pulse; 0 selects a default
  double drift_speed = 0.0;  // m/s along y during the hold window
  double c = si::speed_of_light;
  Coupling coupling{};

  [[nodiscard]] Vec3 packet_a() const;
  [[nodiscard]] Vec3 packet_b() const;
  [[nodiscard]] double effective_travel_time() const;
  [[nodiscard]] double effective_hold_margin() const;
  void validate() const;
};

/// Closed-form values used as references. Optional entries apply only to
/// particular scenarios or frames.
struct ReferenceValues {
  double phi_S = 0.0;       // rest-frame phase, rad
  double phi_Sprime = 0.0;  // boosted-frame phase assembled from the transformed fields, rad
  std::optional<double> phi_magnetic_Sprime;
  std::optional<double> phi_electric_Sprime;
  std::optional<double> phi_electric_crossing;  // solenoid: -(q E'0/hbar) pi 2r dt'/4
  std::optional<double> delta_t_prime;          // s
  std::optional<double> E_prime_0;              // V/m
  std::optional<double> B_prime;                // T
  std::optional<double> v_null_electric;        // m/s
  std::optional<double> parallelogram_area;     // m s
  std::optional<double> E_dot_L_prime;          // V
};

Scenario build_solenoid_scenario(const SolenoidScenario& s);
/// Boost with v = packet speed along x.
Boost solenoid_special_frame(const SolenoidScenario& s);
ReferenceValues solenoid_references(const SolenoidScenario& s, const Boost& b);

Scenario build_capacitor_scenario(const CapacitorScenario& s);
/// Boost along x with gamma = cot(theta), where the electric flux vanishes.
Boost capacitor_null_electric_boost(const CapacitorScenario& s);
ReferenceValues capacitor_references(const CapacitorScenario& s, const Boost& b);

}  // namespace abphase
