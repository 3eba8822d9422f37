#pragma once

namespace abphase {

namespace si {
inline constexpr double speed_of_light = 299'792'458.0;          // m/s, exact
inline constexpr double hbar = 1.054'571'817e-34;                // J s (CODATA 2018)
inline constexpr double elementary_charge = 1.602'176'634e-19;   // C, exact
}  // namespace si

/// Charge and reduced Planck constant that turn reduced flux (V s) into a phase.
struct Coupling {
  double charge = si::elementary_charge;
  double hbar = si::hbar;

  [[nodiscard]] constexpr double q_over_hbar() const { return charge / hbar; }

  /// q/hbar = 1, so phases equal reduced fluxes numerically.
  static constexpr Coupling unit() { return {1.0, 1.0}; }
  static constexpr Coupling electron() { return {-si::elementary_charge, si::hbar}; }
};

}  // namespace abphase
