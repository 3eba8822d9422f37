#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace abphase {

/// Controls for the adaptive panel quadrature.
struct QuadratureSpec {
  int base_order = 4;          // Gauss-Legendre points per panel per axis
  int initial_panels_u = 16;
  int initial_panels_s = 16;
  double tol = 1e-9;           // absolute, in the units of the integral
  int max_depth = 18;          // subdivision levels below an initial panel
  long max_panels = 2'000'000;

  void validate() const;
};

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule of the given order (>= 1).
const GaussLegendre& gauss_legendre(int order);

struct QuadratureStats {
  long panels = 0;
  int max_depth = 0;
  double error_estimate = 0.0;
};

using Value2 = std::array<double, 2>;

struct SquareResult {
  Value2 value{};
  QuadratureStats stats;
};

struct IntervalResult {
  double value = 0.0;
  QuadratureStats stats;
};

using SquareIntegrand = std::function<Value2(double u, double s)>;
using SquareLabeler = std::function<int(double u, double s)>;
using IntervalIntegrand = std::function<double(double x)>;
using IntervalLabeler = std::function<int(double x)>;
/// Smooth function whose zero set is a discontinuity line of the integrand.
using SquareLevel = std::function<double(double u, double s)>;
using IntervalLevel = std::function<double(double x)>;

/// Adaptive quadrature of a two-component integrand over [0,1]^2.
///
/// The integrand is assumed smooth wherever the labeler is constant. Panels
/// whose label lattice is not uniform are integrated as iterated integrals
/// with the label transitions along the inner axis located by bisection; the
/// inner axis is the one that crosses more transitions. A panel's error is
/// the difference between its rule and the sum over its four children; the
/// panel with the largest error is split until the summed error is <= tol.
/// Initial panels are aligned to the given break lines.
///
/// When level functions are supplied they replace label sampling: a panel is
/// cut where any level changes sign, crossings on its edges and along inner
/// lines are located by root finding, and near-zero extrema between samples
/// are searched so that shallow grazes are not missed. The inner axis is the
/// one whose end edges carry more crossings, and the outer integral is split
/// at those crossings.
///
/// Throws ToleranceNotMet when panels at max_depth (or the panel budget)
/// leave the summed error above tol.
SquareResult integrate_unit_square(const SquareIntegrand& f, const SquareLabeler& label, const QuadratureSpec& spec,
                                   std::span<const double> u_breaks = {}, std::span<const double> s_breaks = {},
                                   std::span<const SquareLevel> levels = {});

/// One-dimensional counterpart on [a, b] with bisection refinement.
IntervalResult integrate_interval(const IntervalIntegrand& f, const IntervalLabeler& label, double a, double b,
                                  const QuadratureSpec& spec, int initial_panels,
                                  std::span<const IntervalLevel> levels = {});

/// Zeros of a smooth function on [a, b], sorted. Sign changes between
/// `samples` equally spaced probes are refined by root finding; a sampled
/// local minimum of |g| that is small compared with the sample-to-sample
/// variation triggers a search for a hidden pair of zeros.
std::vector<double> level_crossings(const IntervalLevel& g, double a, double b, int samples);

/// Partition of [0, 1] honouring the breaks, with about n panels per unit length.
std::vector<double> panel_edges(std::span<const double> breaks, int n);

}  // namespace abphase
