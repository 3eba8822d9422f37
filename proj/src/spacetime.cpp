#include "abphase/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "abphase/errors.hpp"

namespace abphase {

Boost::Boost(const Vec3& velocity, double c) : v_(velocity), c_(c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("boost: speed of light must be positive and finite");
  if (!velocity.finite()) throw DomainError("boost: velocity is not finite");
  speed_ = velocity.norm();
  if (!(speed_ < c)) {
    std::ostringstream os;
    os << "boost: |v| = " << speed_ << " is not below c = " << c;
    throw DomainError(os.str());
  }
  const double beta = speed_ / c;
  gamma_ = 1.0 / std::sqrt((1.0 - beta) * (1.0 + beta));
  axis_ = speed_ > 0.0 ? velocity / speed_ : Vec3{};
}

Boost Boost::along_x(double beta, double c) { return Boost({beta * c, 0.0, 0.0}, c); }

Vec3 compose_velocities(const Vec3& v, const Vec3& u, double c) {
  const double vv = v.norm();
  if (vv == 0.0) return u;
  const Vec3 n = v / vv;
  const double gamma = Boost(v, c).gamma();
  const Vec3 u_par = dot(u, n) * n;
  const Vec3 u_perp = u - u_par;
  const double denom = 1.0 + dot(v, u) / (c * c);
  return (u_par + v + u_perp / gamma) / denom;
}

Event boost_event(const Event& e, const Boost& b) {
  if (b.is_identity()) return e;
  const double g = b.gamma();
  const Vec3& n = b.axis();
  const double x_par = dot(e.pos, n);
  const double c2 = b.c() * b.c();
  Event out;
  out.t = g * (e.t - dot(b.velocity(), e.pos) / c2);
  out.pos = e.pos + ((g - 1.0) * x_par - g * b.speed() * e.t) * n;
  return out;
}

Tangent4 boost_tangent(const Tangent4& d, const Boost& b) {
  const Event e = boost_event(Event{d.dt, d.dpos}, b);
  return {e.t, e.pos};
}

// ---------------------------------------------------------------------------

Worldline::Worldline(std::vector<Event> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw GeometryError("worldline: at least two knots are required");
  for (const auto& k : knots_) {
    if (!k.finite()) throw GeometryError("worldline: knot is not finite");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i].t > knots_[i - 1].t)) {
      std::ostringstream os;
      os << "worldline: time does not strictly increase at knot " << i << " (" << knots_[i - 1].t
         << " -> " << knots_[i].t << ")";
      throw NonMonotoneTime(os.str());
    }
  }
}

std::size_t Worldline::segment_index(double t) const {
  // first knot with time > t, so a knot time selects the later segment
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double tv, const Event& k) { return tv < k.t; });
  std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, knots_.size() - 2);
}

Vec3 Worldline::position_at_time(double t) const {
  if (t <= t0()) return knots_.front().pos;
  if (t >= tf()) return knots_.back().pos;
  const std::size_t i = segment_index(t);
  const Event& k0 = knots_[i];
  const Event& k1 = knots_[i + 1];
  const double w = (t - k0.t) / (k1.t - k0.t);
  return (1.0 - w) * k0.pos + w * k1.pos;
}

Event Worldline::at(double tau) const {
  if (tau <= 0.0) return knots_.front();
  if (tau >= 1.0) return knots_.back();
  const double t = t0() + tau * (tf() - t0());
  return {t, position_at_time(t)};
}

Vec3 Worldline::velocity_at_time(double t) const {
  const std::size_t i = segment_index(t);
  const Event& k0 = knots_[i];
  const Event& k1 = knots_[i + 1];
  return (k1.pos - k0.pos) / (k1.t - k0.t);
}

double Worldline::max_speed() const {
  double vmax = 0.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const Tangent4 d = knots_[i + 1] - knots_[i];
    vmax = std::max(vmax, d.dpos.norm() / d.dt);
  }
  return vmax;
}

void Worldline::require_subluminal(double c) const {
  const double v = max_speed();
  if (!(v < c)) {
    std::ostringstream os;
    os << "worldline: segment speed " << v << " is not below c = " << c;
    throw GeometryError(os.str());
  }
}

Worldline Worldline::retimed(const std::function<double(double)>& warp) const {
  std::vector<Event> out = knots_;
  const double span = tf() - t0();
  for (std::size_t i = 1; i + 1 < out.size(); ++i) {
    out[i].t = t0() + span * warp((knots_[i].t - t0()) / span);
  }
  return Worldline(std::move(out));
}

Worldline boost_worldline(const Worldline& w, const Boost& b) {
  std::vector<Event> out;
  out.reserve(w.knots().size());
  for (const auto& k : w.knots()) out.push_back(boost_event(k, b));
  // Lorentz maps are affine, so straight segments stay straight; the
  // Worldline constructor rejects non-increasing boosted times.
  return Worldline(std::move(out));
}

// ---------------------------------------------------------------------------

namespace {

bool same_event(const Event& p, const Event& q) {
  const double scale_t = std::max({std::abs(p.t), std::abs(q.t), 1e-300});
  const double scale_x = std::max({p.pos.norm(), q.pos.norm(), 1e-300});
  return std::abs(p.t - q.t) <= 1e-12 * scale_t && (p.pos - q.pos).norm() <= 1e-12 * scale_x;
}

}  // namespace

WorldlinePair::WorldlinePair(Worldline a, Worldline b) : a_(std::move(a)), b_(std::move(b)) {
  if (!same_event(a_.front(), b_.front())) throw GeometryError("worldline pair: initial events differ");
  if (!same_event(a_.back(), b_.back())) throw GeometryError("worldline pair: final events differ");
}

WorldlinePair boost_pair(const WorldlinePair& pair, const Boost& b) {
  return {boost_worldline(pair.a(), b), boost_worldline(pair.b(), b)};
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> clean_breaks(std::vector<double> br) {
  std::erase_if(br, [](double x) { return !(x > 0.0 && x < 1.0); });
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

}  // namespace

SpacetimeSurface::SpacetimeSurface(Map map, std::optional<Jacobian> jacobian, std::vector<double> u_breaks,
                                   std::vector<double> s_breaks)
    : map_(std::move(map)),
      jacobian_(std::move(jacobian)),
      u_breaks_(clean_breaks(std::move(u_breaks))),
      s_breaks_(clean_breaks(std::move(s_breaks))) {}

SurfaceTangents finite_difference_jacobian(const SpacetimeSurface& srf, double u, double s, double h) {
  auto diff = [&](auto eval, double x) -> Tangent4 {
    double lo = x - h;
    double hi = x + h;
    if (lo < 0.0) {
      lo = 0.0;
      hi = 2.0 * h;
      // second-order one-sided stencil: (-3 f0 + 4 f1 - f2) / 2h
      const Event f0 = eval(0.0);
      const Event f1 = eval(h);
      const Event f2 = eval(2.0 * h);
      return (1.0 / (2.0 * h)) * (4.0 * (f1 - f0) - (f2 - f0));
    }
    if (hi > 1.0) {
      const Event f0 = eval(1.0);
      const Event f1 = eval(1.0 - h);
      const Event f2 = eval(1.0 - 2.0 * h);
      return (-1.0 / (2.0 * h)) * (4.0 * (f1 - f0) - (f2 - f0));
    }
    return (1.0 / (hi - lo)) * (eval(hi) - eval(lo));
  };
  SurfaceTangents out;
  out.du = diff([&](double x) { return srf(x, s); }, u);
  out.ds = diff([&](double x) { return srf(u, x); }, s);
  return out;
}

SurfaceTangents surface_jacobian(const SpacetimeSurface& srf, double u, double s, double h) {
  if (srf.has_analytic_jacobian()) return srf.analytic_jacobian(u, s);
  return finite_difference_jacobian(srf, u, s, h);
}

SpacetimeSurface ruled_surface_equal_time(const WorldlinePair& pair) {
  const Worldline& a = pair.a();
  const Worldline& b = pair.b();
  const double t0 = a.t0();
  const double span = a.tf() - t0;
  if (std::abs(b.t0() - t0) > 1e-12 * std::max(std::abs(t0), span) ||
      std::abs(b.tf() - a.tf()) > 1e-12 * std::max(std::abs(a.tf()), span)) {
    throw GeometryError("ruled surface: worldlines do not span the same time interval");
  }

  std::vector<double> breaks;
  for (const Worldline* w : {&a, &b}) {
    for (const auto& k : w->knots()) breaks.push_back((k.t - t0) / span);
  }

  auto map = [a, b, t0, span](double u, double s) -> Event {
    if (u <= 0.0) return a.front();
    if (u >= 1.0) return a.back();
    const double t = t0 + u * span;
    return {t, (1.0 - s) * a.position_at_time(t) + s * b.position_at_time(t)};
  };
  auto jac = [a, b, t0, span](double u, double s) -> SurfaceTangents {
    const double t = t0 + std::clamp(u, 0.0, 1.0) * span;
    const Vec3 va = a.velocity_at_time(t);
    const Vec3 vb = b.velocity_at_time(t);
    SurfaceTangents out;
    out.du = {span, span * ((1.0 - s) * va + s * vb)};
    out.ds = {0.0, b.position_at_time(t) - a.position_at_time(t)};
    return out;
  };
  return SpacetimeSurface(map, jac, std::move(breaks));
}

SpacetimeSurface bulged_surface(const SpacetimeSurface& base, const Tangent4& amplitude) {
  using std::numbers::pi;
  auto map = [base, amplitude](double u, double s) -> Event {
    const double w = std::sin(pi * u) * std::sin(pi * s);
    return base(u, s) + w * amplitude;
  };
  std::optional<SpacetimeSurface::Jacobian> jac;
  if (base.has_analytic_jacobian()) {
    jac = [base, amplitude](double u, double s) -> SurfaceTangents {
      SurfaceTangents t = base.analytic_jacobian(u, s);
      t.du = t.du + (pi * std::cos(pi * u) * std::sin(pi * s)) * amplitude;
      t.ds = t.ds + (pi * std::sin(pi * u) * std::cos(pi * s)) * amplitude;
      return t;
    };
  }
  const auto ub = base.u_breaks();
  const auto sb = base.s_breaks();
  return SpacetimeSurface(map, jac, {ub.begin(), ub.end()}, {sb.begin(), sb.end()});
}

SpacetimeSurface displaced_surface(const SpacetimeSurface& base, std::size_t nu, std::size_t ns,
                                   std::vector<Tangent4> grid) {
  if (nu == 0 || ns == 0) throw GeometryError("displaced surface: lattice needs at least one cell per axis");
  if (grid.size() != (nu + 1) * (ns + 1)) throw GeometryError("displaced surface: lattice size mismatch");
  for (std::size_t i = 0; i <= nu; ++i) {
    for (std::size_t j = 0; j <= ns; ++j) {
      if (i == 0 || i == nu || j == 0 || j == ns) grid[i * (ns + 1) + j] = Tangent4{};
    }
  }
  struct Cell {
    std::size_t i, j;
    double fu, fs;
  };
  auto locate = [nu, ns](double u, double s) {
    const double x = std::clamp(u, 0.0, 1.0) * static_cast<double>(nu);
    const double y = std::clamp(s, 0.0, 1.0) * static_cast<double>(ns);
    const std::size_t i = std::min(static_cast<std::size_t>(x), nu - 1);
    const std::size_t j = std::min(static_cast<std::size_t>(y), ns - 1);
    return Cell{i, j, x - static_cast<double>(i), y - static_cast<double>(j)};
  };
  auto shared = std::make_shared<const std::vector<Tangent4>>(std::move(grid));
  auto node = [shared, ns](std::size_t i, std::size_t j) -> const Tangent4& { return (*shared)[i * (ns + 1) + j]; };

  auto map = [base, locate, node](double u, double s) -> Event {
    const Cell c = locate(u, s);
    const Tangent4 d = ((1 - c.fu) * (1 - c.fs)) * node(c.i, c.j) + (c.fu * (1 - c.fs)) * node(c.i + 1, c.j) +
                       ((1 - c.fu) * c.fs) * node(c.i, c.j + 1) + (c.fu * c.fs) * node(c.i + 1, c.j + 1);
    return base(u, s) + d;
  };
  std::optional<SpacetimeSurface::Jacobian> jac;
  if (base.has_analytic_jacobian()) {
    jac = [base, locate, node, nu, ns](double u, double s) -> SurfaceTangents {
      const Cell c = locate(u, s);
      SurfaceTangents t = base.analytic_jacobian(u, s);
      const double su = static_cast<double>(nu);
      const double ss = static_cast<double>(ns);
      const Tangent4 ddu = (su * (1 - c.fs)) * (node(c.i + 1, c.j) - node(c.i, c.j)) +
                           (su * c.fs) * (node(c.i + 1, c.j + 1) - node(c.i, c.j + 1));
      const Tangent4 dds = (ss * (1 - c.fu)) * (node(c.i, c.j + 1) - node(c.i, c.j)) +
                           (ss * c.fu) * (node(c.i + 1, c.j + 1) - node(c.i + 1, c.j));
      t.du = t.du + ddu;
      t.ds = t.ds + dds;
      return t;
    };
  }
  std::vector<double> ub(base.u_breaks().begin(), base.u_breaks().end());
  std::vector<double> sb(base.s_breaks().begin(), base.s_breaks().end());
  for (std::size_t i = 1; i < nu; ++i) ub.push_back(static_cast<double>(i) / static_cast<double>(nu));
  for (std::size_t j = 1; j < ns; ++j) sb.push_back(static_cast<double>(j) / static_cast<double>(ns));
  return SpacetimeSurface(map, jac, std::move(ub), std::move(sb));
}

}  // namespace abphase
