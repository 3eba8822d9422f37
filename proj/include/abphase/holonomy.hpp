#pragma once

#include <functional>
#include <string>

#include "abphase/constants.hpp"
#include "abphase/em_config.hpp"
#include "abphase/quadrature.hpp"
#include "abphase/spacetime.hpp"

namespace abphase {

/// Global orientation of the surface element relative to (u, s). With +1, a
/// counterclockwise path a around a +z magnetic flux gives a positive phase.
inline constexpr double kSurfaceOrientation = 1.0;

/// Aharonov-Bohm phase split into its magnetic and electric flux parts.
struct PhaseDecomposition {
  double magnetic = 0.0;      // rad
  double electric = 0.0;      // rad
  double total = 0.0;         // rad, magnetic + electric
  double reduced_flux = 0.0;  // V s, integral of B.da - E.[dt dx]
  double charge = 0.0;        // C
  QuadratureStats stats;
};

struct PotentialPhaseOptions {
  int samples = 8;      // initial quadrature panels per worldline segment
  bool strict = false;  // escalate fields on the paths to FieldOnPath
  QuadratureSpec quadrature{};
};

struct HolonomyResult {
  double phase = 0.0;    // rad
  double reduced = 0.0;  // V s, -(closed-loop integral of A_mu dx^mu)
  bool field_on_path = false;
  double max_field_on_path = 0.0;  // max |E|/c + |B| seen on the sample points, in T
  QuadratureStats stats;
};

/// Closed-loop potential line integral: forward along a, backward along b.
HolonomyResult potential_holonomy(const WorldlinePair& pair, const EmConfiguration& cfg, const Coupling& coupling,
                                  const PotentialPhaseOptions& opts = {}, double c = si::speed_of_light);

/// -(q/hbar) [ integral of (V dt - A.dx) along a  -  the same along b ].
double potential_phase(const WorldlinePair& pair, const EmConfiguration& cfg, const Coupling& coupling,
                       const PotentialPhaseOptions& opts = {}, double c = si::speed_of_light);

/// Flux of the field 2-form through the surface, split into magnetic and electric parts.
PhaseDecomposition flux_phase(const SpacetimeSurface& srf, const EmConfiguration& cfg, const Coupling& coupling,
                              const QuadratureSpec& spec = {});

/// Integrand of the reduced flux at one surface point: {B.(du x ds), -E.(du_t ds - ds_t du)}.
Value2 flux_density(const FieldSample& f, const SurfaceTangents& tangents);

struct StokesReport {
  double loop_value = 0.0;     // reduced holonomy around the boundary
  double surface_value = 0.0;  // reduced flux of the exterior derivative
  double abs_err = 0.0;
  double rel_err = 0.0;
  long panels_used = 0;
};

/// Compares the reduced holonomy of the gauge around the surface boundary
/// (the four parameter edges, counterclockwise in (u, s)) with the reduced
/// flux of its exterior derivative through the surface.
StokesReport stokes_check(const SpacetimeSurface& srf, const EmConfiguration& cfg, const QuadratureSpec& spec = {});

// ---------------------------------------------------------------------------
// Three-dimensional special cases.

struct Mat3 {
  // d[i][j] = d A_i / d x_j
  double d[3][3]{};
};

struct VectorField3 {
  std::function<Vec3(const Vec3&)> value;
  std::function<Mat3(const Vec3&)> jacobian;  // optional; central differences if empty
};

struct Box3 {
  Vec3 lo;
  Vec3 hi;
};

/// Parametric patch (u, s) in [0,1]^2 -> R^3 with its partial derivatives.
struct SurfacePatch3 {
  std::function<Vec3(double, double)> map;
  std::function<Vec3(double, double)> du;
  std::function<Vec3(double, double)> ds;
};

/// Closed-surface flux vs volume integral of the divergence over a box.
StokesReport stokes_check_3d(const VectorField3& field, const Box3& box, int order = 8, int panels = 2);
/// Boundary circulation vs flux of the curl through a patch.
StokesReport stokes_check_3d(const VectorField3& field, const SurfacePatch3& patch, int order = 8, int panels = 2);

Mat3 field_jacobian(const VectorField3& field, const Vec3& x, double h = 1e-5);

// ---------------------------------------------------------------------------

/// Scalar gauge function with optional analytic gradient (d/dt, grad).
struct GaugeFunction {
  std::function<double(const Event&)> chi;
  std::function<Tangent4(const Event&)> gradient;  // optional
};

/// V -> V - d chi/dt, A -> A + grad chi; fields and regions unchanged.
EmConfiguration gauge_shift(const EmConfiguration& cfg, const GaugeFunction& chi, const DifferenceSteps& steps = {});

}  // namespace abphase
