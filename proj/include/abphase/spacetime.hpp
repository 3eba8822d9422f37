#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "abphase/constants.hpp"
#include "abphase/vec.hpp"

namespace abphase {

/// Uniform-velocity change of inertial frame along an arbitrary axis.
///
/// Coordinates are mapped into the frame that moves with `velocity` relative
/// to the input frame; the two frames share their origin event.
class Boost {
 public:
  /// Identity boost.
  Boost() = default;

  /// Throws DomainError unless |velocity| < c and both are finite, c > 0.
  explicit Boost(const Vec3& velocity, double c = si::speed_of_light);

  static Boost along_x(double beta, double c = si::speed_of_light);

  [[nodiscard]] const Vec3& velocity() const { return v_; }
  [[nodiscard]] double c() const { return c_; }
  [[nodiscard]] double gamma() const { return gamma_; }
  [[nodiscard]] double speed() const { return speed_; }
  [[nodiscard]] Vec3 beta() const { return v_ / c_; }
  /// Unit vector along the velocity; zero for the identity boost.
  [[nodiscard]] const Vec3& axis() const { return axis_; }
  [[nodiscard]] bool is_identity() const { return speed_ == 0.0; }

  [[nodiscard]] Boost inverse() const { return Boost(-v_, c_); }

 private:
  Vec3 v_;
  double c_ = si::speed_of_light;
  double speed_ = 0.0;
  double gamma_ = 1.0;
  Vec3 axis_;
};

/// Relativistic velocity addition for collinear or general velocities:
/// the velocity, in the original frame, of an object moving with `u` in the
/// frame that moves with `v`.
Vec3 compose_velocities(const Vec3& v, const Vec3& u, double c);

Event boost_event(const Event& e, const Boost& b);
Tangent4 boost_tangent(const Tangent4& d, const Boost& b);

/// Piecewise-linear particle worldline, parametrized uniformly in frame time.
///
/// Knots must have strictly increasing time. The parameter tau in [0, 1] maps
/// to t = t0 + tau (tf - t0).
class Worldline {
 public:
  explicit Worldline(std::vector<Event> knots);

  [[nodiscard]] const std::vector<Event>& knots() const { return knots_; }
  [[nodiscard]] std::size_t segment_count() const { return knots_.size() - 1; }
  [[nodiscard]] const Event& front() const { return knots_.front(); }
  [[nodiscard]] const Event& back() const { return knots_.back(); }
  [[nodiscard]] double t0() const { return knots_.front().t; }
  [[nodiscard]] double tf() const { return knots_.back().t; }

  /// Event at parameter tau in [0, 1].
  [[nodiscard]] Event at(double tau) const;
  /// Position at frame time t, clamped to [t0, tf].
  [[nodiscard]] Vec3 position_at_time(double t) const;
  /// Spatial velocity of the segment containing t (the later one at a knot).
  [[nodiscard]] Vec3 velocity_at_time(double t) const;

  /// Largest segment speed.
  [[nodiscard]] double max_speed() const;
  /// Throws GeometryError if any segment speed is >= c.
  void require_subluminal(double c) const;

  /// Same spatial path with knot times remapped by a strictly increasing
  /// function of normalized time w in [0, 1] that fixes both endpoints.
  [[nodiscard]] Worldline retimed(const std::function<double(double)>& warp) const;

 private:
  [[nodiscard]] std::size_t segment_index(double t) const;

  std::vector<Event> knots_;
};

/// Worldline expressed in the boosted frame. Throws NonMonotoneTime if the
/// boosted times are not strictly increasing.
Worldline boost_worldline(const Worldline& w, const Boost& b);

/// Two worldlines sharing their initial and final events.
class WorldlinePair {
 public:
  /// Throws GeometryError if the endpoints do not coincide.
  WorldlinePair(Worldline a, Worldline b);

  [[nodiscard]] const Worldline& a() const { return a_; }
  [[nodiscard]] const Worldline& b() const { return b_; }
  [[nodiscard]] WorldlinePair swapped() const { return {b_, a_}; }

 private:
  Worldline a_;
  Worldline b_;
};

WorldlinePair boost_pair(const WorldlinePair& pair, const Boost& b);

struct SurfaceTangents {
  Tangent4 du;
  Tangent4 ds;
};

/// Parametric surface (u, s) in [0,1]^2 -> spacetime.
///
/// `u_breaks`/`s_breaks` list parameter lines across which the map is only
/// piecewise smooth; quadrature panels are aligned to them.
class SpacetimeSurface {
 public:
  using Map = std::function<Event(double u, double s)>;
  using Jacobian = std::function<SurfaceTangents(double u, double s)>;

  SpacetimeSurface(Map map, std::optional<Jacobian> jacobian = std::nullopt,
                   std::vector<double> u_breaks = {}, std::vector<double> s_breaks = {});

  [[nodiscard]] Event operator()(double u, double s) const { return map_(u, s); }
  [[nodiscard]] bool has_analytic_jacobian() const { return jacobian_.has_value(); }
  [[nodiscard]] SurfaceTangents analytic_jacobian(double u, double s) const { return (*jacobian_)(u, s); }
  [[nodiscard]] std::span<const double> u_breaks() const { return u_breaks_; }
  [[nodiscard]] std::span<const double> s_breaks() const { return s_breaks_; }

 private:
  Map map_;
  std::optional<Jacobian> jacobian_;
  std::vector<double> u_breaks_;
  std::vector<double> s_breaks_;
};

inline constexpr double kDefaultJacobianStep = 1e-6;

/// Tangents (d sigma/du, d sigma/ds). Uses the analytic jacobian when the
/// surface has one; otherwise central differences with step h, one-sided at
/// the parameter boundaries.
SurfaceTangents surface_jacobian(const SpacetimeSurface& srf, double u, double s,
                                 double h = kDefaultJacobianStep);

/// Finite-difference tangents regardless of any analytic jacobian.
SurfaceTangents finite_difference_jacobian(const SpacetimeSurface& srf, double u, double s,
                                           double h = kDefaultJacobianStep);

/// Surface swept by the straight chord joining the two packets at equal frame time:
/// sigma(u, s) = (t(u), (1 - s) pos_a(t(u)) + s pos_b(t(u))).
SpacetimeSurface ruled_surface_equal_time(const WorldlinePair& pair);

/// Base surface plus amplitude * sin(pi u) sin(pi s); the boundary is unchanged.
SpacetimeSurface bulged_surface(const SpacetimeSurface& base, const Tangent4& amplitude);

/// Base surface plus a bilinearly interpolated displacement lattice.
///
/// `grid` holds (nu + 1) x (ns + 1) displacements, row-major in u. Boundary rows
/// and columns are forced to zero so the boundary is unchanged.
SpacetimeSurface displaced_surface(const SpacetimeSurface& base, std::size_t nu, std::size_t ns,
                                   std::vector<Tangent4> grid);

}  // namespace abphase
