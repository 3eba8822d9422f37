#include "abphase/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "abphase/errors.hpp"

namespace abphase {

namespace {

// The 1-form V dt - A.dx evaluated on a tangent.
double one_form(const PotentialSample& p, const Tangent4& d) { return p.V * d.dt - dot(p.A, d.dpos); }

struct LineIntegral {
  double value = 0.0;
  QuadratureStats stats;
};

LineIntegral worldline_integral(const Worldline& w, const EmConfiguration& cfg, const QuadratureSpec& spec,
                                int samples) {
  LineIntegral out;
  // Per-segment tolerance keeps the summed estimate within spec.tol.
  QuadratureSpec seg_spec = spec;
  seg_spec.tol = spec.tol / static_cast<double>(w.segment_count());
  for (std::size_t i = 0; i < w.segment_count(); ++i) {
    const Event k0 = w.knots()[i];
    const Event k1 = w.knots()[i + 1];
    const Tangent4 d = k1 - k0;
    auto f = [&](double lam) { return one_form(cfg.potential(lerp(k0, k1, lam)), d); };
    auto label = [&](double lam) { return cfg.region(lerp(k0, k1, lam)); };
    std::vector<IntervalLevel> levels;
    for (const auto& g : cfg.boundaries) levels.emplace_back([&, g](double lam) { return g(lerp(k0, k1, lam)); });
    const IntervalResult r = integrate_interval(f, label, 0.0, 1.0, seg_spec, samples, levels);
    out.value += r.value;
    out.stats.panels += r.stats.panels;
    out.stats.max_depth = std::max(out.stats.max_depth, r.stats.max_depth);
    out.stats.error_estimate += r.stats.error_estimate;
  }
  return out;
}

double field_strength(const FieldSample& f, double c) { return f.E.norm() / c + f.B.norm(); }

double max_field_on(const Worldline& w, const EmConfiguration& cfg, int samples, double c) {
  double m = 0.0;
  const int n = std::max(2, samples);
  for (std::size_t i = 0; i < w.segment_count(); ++i) {
    for (int k = 0; k <= n; ++k) {
      const Event e = lerp(w.knots()[i], w.knots()[i + 1], static_cast<double>(k) / n);
      m = std::max(m, field_strength(cfg.field(e), c));
    }
  }
  return m;
}

}  // namespace

HolonomyResult potential_holonomy(const WorldlinePair& pair, const EmConfiguration& cfg, const Coupling& coupling,
                                  const PotentialPhaseOptions& opts, double c) {
  HolonomyResult out;
  out.max_field_on_path =
      std::max(max_field_on(pair.a(), cfg, opts.samples, c), max_field_on(pair.b(), cfg, opts.samples, c));
  out.field_on_path = out.max_field_on_path > 0.0;
  if (out.field_on_path && opts.strict) {
    std::ostringstream os;
    os << "nonzero field on a particle path (|E|/c + |B| up to " << out.max_field_on_path << " T)";
    throw FieldOnPath(os.str());
  }

  QuadratureSpec half = opts.quadrature;
  half.tol = 0.5 * opts.quadrature.tol;
  const LineIntegral ia = worldline_integral(pair.a(), cfg, half, opts.samples);
  const LineIntegral ib = worldline_integral(pair.b(), cfg, half, opts.samples);
  out.reduced = -(ia.value - ib.value);
  out.phase = coupling.q_over_hbar() * out.reduced;
  out.stats.panels = ia.stats.panels + ib.stats.panels;
  out.stats.max_depth = std::max(ia.stats.max_depth, ib.stats.max_depth);
  out.stats.error_estimate = ia.stats.error_estimate + ib.stats.error_estimate;
  return out;
}

double potential_phase(const WorldlinePair& pair, const EmConfiguration& cfg, const Coupling& coupling,
                       const PotentialPhaseOptions& opts, double c) {
  return potential_holonomy(pair, cfg, coupling, opts, c).phase;
}

Value2 flux_density(const FieldSample& f, const SurfaceTangents& tg) {
  const Vec3 area = cross(tg.du.dpos, tg.ds.dpos);
  const Vec3 time_space = tg.du.dt * tg.ds.dpos - tg.ds.dt * tg.du.dpos;
  return {kSurfaceOrientation * dot(f.B, area), -kSurfaceOrientation * dot(f.E, time_space)};
}

PhaseDecomposition flux_phase(const SpacetimeSurface& srf, const EmConfiguration& cfg, const Coupling& coupling,
                              const QuadratureSpec& spec) {
  auto f = [&](double u, double s) { return flux_density(cfg.field(srf(u, s)), surface_jacobian(srf, u, s)); };
  auto label = [&](double u, double s) { return cfg.region(srf(u, s)); };
  std::vector<SquareLevel> levels;
  for (const auto& g : cfg.boundaries) levels.emplace_back([&, g](double u, double s) { return g(srf(u, s)); });
  const SquareResult r = integrate_unit_square(f, label, spec, srf.u_breaks(), srf.s_breaks(), levels);

  PhaseDecomposition out;
  const double k = coupling.q_over_hbar();
  out.charge = coupling.charge;
  out.reduced_flux = r.value[0] + r.value[1];
  out.magnetic = k * r.value[0];
  out.electric = k * r.value[1];
  out.total = out.magnetic + out.electric;
  out.stats = r.stats;
  return out;
}

StokesReport stokes_check(const SpacetimeSurface& srf, const EmConfiguration& cfg, const QuadratureSpec& spec) {
  QuadratureSpec edge_spec = spec;
  edge_spec.tol = 0.25 * spec.tol;
  long panels = 0;

  // edge u -> sigma(u, s_fixed) or s -> sigma(u_fixed, s)
  auto edge = [&](bool along_u, double fixed) {
    auto point = [&](double x) { return along_u ? srf(x, fixed) : srf(fixed, x); };
    auto f = [&](double x) {
      const SurfaceTangents tg = along_u ? surface_jacobian(srf, x, fixed) : surface_jacobian(srf, fixed, x);
      return one_form(cfg.potential(point(x)), along_u ? tg.du : tg.ds);
    };
    auto label = [&](double x) { return cfg.region(point(x)); };
    std::vector<IntervalLevel> levels;
    for (const auto& g : cfg.boundaries) levels.emplace_back([&, g](double x) { return g(point(x)); });
    // degenerate seams contribute nothing
    if (!along_u && point(0.0) == point(0.5) && point(0.5) == point(1.0)) return 0.0;
    const auto br = along_u ? srf.u_breaks() : srf.s_breaks();
    const auto edges = panel_edges(br, 1);
    double sum = 0.0;
    QuadratureSpec piece_spec = edge_spec;
    piece_spec.tol = edge_spec.tol / static_cast<double>(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const IntervalResult r = integrate_interval(f, label, edges[i], edges[i + 1], piece_spec, 4, levels);
      sum += r.value;
      panels += r.stats.panels;
    }
    return sum;
  };

  // counterclockwise in (u, s): s=0 forward, u=1 forward, s=1 backward, u=0 backward
  const double holonomy = edge(true, 0.0) + edge(false, 1.0) - edge(true, 1.0) - edge(false, 0.0);

  StokesReport rep;
  rep.loop_value = -kSurfaceOrientation * holonomy;
  const PhaseDecomposition flux = flux_phase(srf, cfg, Coupling::unit(), spec);
  rep.surface_value = flux.reduced_flux;
  rep.abs_err = std::abs(rep.loop_value - rep.surface_value);
  const double scale = std::max(std::abs(rep.loop_value), std::abs(rep.surface_value));
  rep.rel_err = scale > 0.0 ? rep.abs_err / scale : 0.0;
  rep.panels_used = panels + flux.stats.panels;
  return rep;
}

// ---------------------------------------------------------------------------

Mat3 field_jacobian(const VectorField3& field, const Vec3& x, double h) {
  if (field.jacobian) return field.jacobian(x);
  Mat3 m;
  for (int j = 0; j < 3; ++j) {
    Vec3 dx;
    (j == 0 ? dx.x : j == 1 ? dx.y : dx.z) = h;
    const Vec3 d = (field.value(x + dx) - field.value(x - dx)) / (2.0 * h);
    m.d[0][j] = d.x;
    m.d[1][j] = d.y;
    m.d[2][j] = d.z;
  }
  return m;
}

namespace {

// Composite Gauss-Legendre over [0,1] in each of N dimensions.
template <class F>
double composite_unit(const F& f, int order, int panels, int dims) {
  const GaussLegendre& gl = gauss_legendre(order);
  std::vector<double> x;
  std::vector<double> w;
  for (int p = 0; p < panels; ++p) {
    const double h = 0.5 / panels;
    const double mid = (p + 0.5) / panels;
    for (int k = 0; k < order; ++k) {
      x.push_back(mid + h * gl.nodes[static_cast<std::size_t>(k)]);
      w.push_back(h * gl.weights[static_cast<std::size_t>(k)]);
    }
  }
  const std::size_t n = x.size();
  double sum = 0.0;
  if (dims == 1) {
    for (std::size_t i = 0; i < n; ++i) sum += w[i] * f(x[i], 0.0, 0.0);
  } else if (dims == 2) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sum += w[i] * w[j] * f(x[i], x[j], 0.0);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) sum += w[i] * w[j] * w[k] * f(x[i], x[j], x[k]);
  }
  return sum;
}

StokesReport finish(double boundary, double interior, long panels) {
  StokesReport rep;
  rep.loop_value = boundary;
  rep.surface_value = interior;
  rep.abs_err = std::abs(boundary - interior);
  const double scale = std::max(std::abs(boundary), std::abs(interior));
  rep.rel_err = scale > 0.0 ? rep.abs_err / scale : 0.0;
  rep.panels_used = panels;
  return rep;
}

}  // namespace

StokesReport stokes_check_3d(const VectorField3& field, const Box3& box, int order, int panels) {
  const Vec3 ext = box.hi - box.lo;
  auto at = [&](double a, double b, double c) {
    return Vec3{box.lo.x + a * ext.x, box.lo.y + b * ext.y, box.lo.z + c * ext.z};
  };
  // outward flux through the six faces
  double flux = 0.0;
  flux += ext.y * ext.z * composite_unit([&](double a, double b, double) {
    return field.value(at(1, a, b)).x - field.value(at(0, a, b)).x;
  }, order, panels, 2);
  flux += ext.x * ext.z * composite_unit([&](double a, double b, double) {
    return field.value(at(a, 1, b)).y - field.value(at(a, 0, b)).y;
  }, order, panels, 2);
  flux += ext.x * ext.y * composite_unit([&](double a, double b, double) {
    return field.value(at(a, b, 1)).z - field.value(at(a, b, 0)).z;
  }, order, panels, 2);

  const double volume = ext.x * ext.y * ext.z;
  const double div = volume * composite_unit([&](double a, double b, double c) {
    const Mat3 j = field_jacobian(field, at(a, b, c));
    return j.d[0][0] + j.d[1][1] + j.d[2][2];
  }, order, panels, 3);
  return finish(flux, div, 6L * panels * panels + static_cast<long>(panels) * panels * panels);
}

StokesReport stokes_check_3d(const VectorField3& field, const SurfacePatch3& patch, int order, int panels) {
  auto edge_u = [&](double s) {
    return composite_unit([&](double u, double, double) { return dot(field.value(patch.map(u, s)), patch.du(u, s)); },
                          order, panels, 1);
  };
  auto edge_s = [&](double u) {
    return composite_unit([&](double s, double, double) { return dot(field.value(patch.map(u, s)), patch.ds(u, s)); },
                          order, panels, 1);
  };
  const double circulation = edge_u(0.0) + edge_s(1.0) - edge_u(1.0) - edge_s(0.0);
  const double curl_flux = composite_unit([&](double u, double s, double) {
    const Mat3 j = field_jacobian(field, patch.map(u, s));
    const Vec3 curl{j.d[2][1] - j.d[1][2], j.d[0][2] - j.d[2][0], j.d[1][0] - j.d[0][1]};
    return dot(curl, cross(patch.du(u, s), patch.ds(u, s)));
  }, order, panels, 2);
  return finish(circulation, curl_flux, 4L * panels + static_cast<long>(panels) * panels);
}

// ---------------------------------------------------------------------------

EmConfiguration gauge_shift(const EmConfiguration& cfg, const GaugeFunction& chi, const DifferenceSteps& steps) {
  std::function<Tangent4(const Event&)> grad = chi.gradient;
  if (!grad) {
    grad = [f = chi.chi, steps](const Event& e) {
      const double ht = steps.dt;
      const double hx = steps.dx;
      Tangent4 g;
      g.dt = (f({e.t + ht, e.pos}) - f({e.t - ht, e.pos})) / (2.0 * ht);
      g.dpos.x = (f({e.t, e.pos + Vec3{hx, 0, 0}}) - f({e.t, e.pos - Vec3{hx, 0, 0}})) / (2.0 * hx);
      g.dpos.y = (f({e.t, e.pos + Vec3{0, hx, 0}}) - f({e.t, e.pos - Vec3{0, hx, 0}})) / (2.0 * hx);
      g.dpos.z = (f({e.t, e.pos + Vec3{0, 0, hx}}) - f({e.t, e.pos - Vec3{0, 0, hx}})) / (2.0 * hx);
      return g;
    };
  }
  EmConfiguration out = cfg;
  out.potential = [base = cfg.potential, grad](const Event& e) {
    PotentialSample p = base(e);
    const Tangent4 g = grad(e);
    p.V -= g.dt;
    p.A += g.dpos;
    return p;
  };
  return out;
}

}  // namespace abphase
