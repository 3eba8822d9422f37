#include "abphase/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "abphase/errors.hpp"

namespace abphase {

void QuadratureSpec::validate() const {
  if (base_order < 2 || base_order > 64) throw DomainError("quadrature: base_order must lie in [2, 64]");
  if (initial_panels_u < 1 || initial_panels_s < 1) throw DomainError("quadrature: initial panels must be >= 1");
  if (!(tol > 0.0)) throw DomainError("quadrature: tol must be positive");
  if (max_depth < 0) throw DomainError("quadrature: max_depth must be >= 0");
  if (max_panels < 1) throw DomainError("quadrature: max_panels must be >= 1");
}

namespace {

constexpr int kMaxOrder = 64;

// Refinement of a panel stops after this many consecutive splits in which the
// children's summed error stays above kStallRatio times the parent's.
constexpr int kStallLimit = 6;
constexpr double kStallRatio = 0.75;

// Refinement as a whole stops once the total error has failed to halve over
// max(kStagnationFloor, panel count at the last improvement) consecutive splits.
constexpr long kStagnationFloor = 512;

struct Stagnation {
  double reference = std::numeric_limits<double>::infinity();
  long window = kStagnationFloor;
  long since = 0;

  bool stuck(double total_err, long panels) {
    if (total_err < 0.5 * reference) {
      reference = total_err;
      window = std::max(kStagnationFloor, panels);
      since = 0;
      return false;
    }
    return ++since > window;
  }
};

GaussLegendre build_rule(int n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

/// Compensated (Neumaier) accumulator.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  [[nodiscard]] double value() const { return sum + comp; }
};

// Locates label transitions on [a, b] given end labels; appends their positions.
template <class Label>
void find_transitions(const Label& label, double a, double b, int la, int lb, std::vector<double>& out) {
  if (la == lb) return;
  const double eps = 2e-16 * std::max({1.0, std::abs(a), std::abs(b)});
  if (b - a <= eps) {
    out.push_back(0.5 * (a + b));
    return;
  }
  const double mid = 0.5 * (a + b);
  if (mid <= a || mid >= b) {
    out.push_back(mid);
    return;
  }
  const int lm = label(mid);
  find_transitions(label, a, mid, la, lm, out);
  find_transitions(label, mid, b, lm, lb, out);
}

// All detectable transitions of `label` on [a, b] using `samples` equally spaced probes.
template <class Label>
std::vector<double> transitions_on(const Label& label, double a, double b, int samples) {
  std::vector<double> out;
  double x_prev = a;
  int l_prev = label(a);
  for (int k = 1; k < samples; ++k) {
    const double x = (k == samples - 1) ? b : a + (b - a) * k / (samples - 1);
    const int l = label(x);
    find_transitions(label, x_prev, x, l_prev, l, out);
    x_prev = x;
    l_prev = l;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Zeros of smooth level functions.

// A sampled minimum of |g| below this multiple of the neighbouring variation
// may hide a pair of zeros. For a quadratic a factor of 1 is already exact.
constexpr double kGrazeFactor = 2.0;

bool resolved(double lo, double hi) {
  return hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::abs(lo), std::abs(hi)});
}

// Zero of g in (lo, hi) where g(lo) and g(hi) have opposite signs.
// Illinois false position with a bisection step every third iteration.
template <class G>
double bracketed_root(const G& g, double lo, double hi, double glo, double ghi) {
  int side = 0;
  for (int it = 0; it < 300 && !resolved(lo, hi); ++it) {
    double x = (it % 3 == 2) ? 0.5 * (lo + hi) : (lo * ghi - hi * glo) / (ghi - glo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double gx = g(x);
    if (gx == 0.0) return x;
    if ((gx < 0.0) == (glo < 0.0)) {
      lo = x;
      glo = gx;
      if (side == -1) ghi *= 0.5;
      side = -1;
    } else {
      hi = x;
      ghi = gx;
      if (side == 1) glo *= 0.5;
      side = 1;
    }
  }
  return 0.5 * (lo + hi);
}

// Looks for a hidden pair of zeros of g on [lo, hi], where g has the sign of
// `sign` at both ends, by minimizing sign * g with golden-section search.
template <class G>
void graze_search(const G& g, double lo, double hi, double sign, std::vector<double>& out) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo;
  double b = hi;
  double x1 = b - r * (b - a);
  double x2 = a + r * (b - a);
  double f1 = sign * g(x1);
  double f2 = sign * g(x2);
  for (int it = 0; it < 80 && f1 > 0.0 && f2 > 0.0 && !resolved(a, b); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = sign * g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = sign * g(x2);
    }
  }
  const double xm = f1 < f2 ? x1 : x2;
  const double fm = std::min(f1, f2);
  if (fm > 0.0) return;
  if (fm == 0.0) {
    out.push_back(xm);
    return;
  }
  const double glo = g(lo);
  const double ghi = g(hi);
  const double gm = sign * fm;
  if (glo * gm < 0.0) out.push_back(bracketed_root(g, lo, xm, glo, gm));
  if (ghi * gm < 0.0) out.push_back(bracketed_root(g, xm, hi, gm, ghi));
}

bool graze_candidate(std::span<const double> v, std::size_t k) {
  const std::size_t m = v.size();
  const double vk = v[k];
  if (vk == 0.0) return false;
  double dloc = 0.0;
  if (k > 0) {
    if (v[k - 1] * vk <= 0.0 || std::abs(v[k - 1]) < std::abs(vk)) return false;
    dloc = std::max(dloc, std::abs(v[k - 1] - vk));
  }
  if (k + 1 < m) {
    if (v[k + 1] * vk <= 0.0 || std::abs(v[k + 1]) < std::abs(vk)) return false;
    dloc = std::max(dloc, std::abs(v[k + 1] - vk));
  }
  return std::abs(vk) <= kGrazeFactor * dloc;
}

// Zeros of g on the sampled line (x[k], v[k] = g(x[k])); appends to out.
template <class G>
void sampled_crossings(const G& g, std::span<const double> x, std::span<const double> v, std::vector<double>& out) {
  const std::size_t m = x.size();
  for (std::size_t k = 0; k < m; ++k) {
    if (v[k] == 0.0) out.push_back(x[k]);
    if (k + 1 < m && v[k] * v[k + 1] < 0.0) out.push_back(bracketed_root(g, x[k], x[k + 1], v[k], v[k + 1]));
    if (m > 1 && graze_candidate(v, k)) {
      const double lo = x[k > 0 ? k - 1 : 0];
      const double hi = x[k + 1 < m ? k + 1 : m - 1];
      graze_search(g, lo, hi, v[k] > 0.0 ? 1.0 : -1.0, out);
    }
  }
}

void sort_unique(std::vector<double>& xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

double probe_at(double a, double b, int k, int m) { return k == m - 1 ? b : a + (b - a) * k / (m - 1); }

template <class G>
void line_crossings(const G& g, double a, double b, int m, std::vector<double>& out) {
  std::vector<double> x(static_cast<std::size_t>(m));
  std::vector<double> v(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    x[static_cast<std::size_t>(k)] = probe_at(a, b, k, m);
    v[static_cast<std::size_t>(k)] = g(x[static_cast<std::size_t>(k)]);
  }
  sampled_crossings(g, x, v, out);
}

// ---------------------------------------------------------------------------

struct Rect {
  double u0, u1, s0, s1;
};

// A rule value with its internal error estimate.
struct Est {
  Value2 v{};
  double err = 0.0;
};

class SquareRule {
 public:
  SquareRule(const SquareIntegrand& f, const SquareLabeler& label, std::span<const SquareLevel> levels, int order)
      : f_(f),
        label_(label),
        levels_(levels),
        gl_(gauss_legendre(order)),
        gl_hi_(gauss_legendre(order + 1)),
        probes_(std::max(order + 2, 6)) {}

  Est operator()(const Rect& r) const { return levels_.empty() ? label_rule(r) : level_rule(r); }

 private:
  [[nodiscard]] double probe(double a, double b, int k) const { return probe_at(a, b, k, probes_); }

  [[nodiscard]] Est label_rule(const Rect& r) const {
    const int m = probes_;
    std::vector<int> lat(static_cast<std::size_t>(m * m));
    bool uniform = true;
    for (int i = 0; i < m; ++i) {
      const double u = probe(r.u0, r.u1, i);
      for (int j = 0; j < m; ++j) {
        const int l = label_(u, probe(r.s0, r.s1, j));
        lat[static_cast<std::size_t>(i * m + j)] = l;
        if (l != lat[0]) uniform = false;
      }
    }
    if (uniform) return {tensor(r), 0.0};

    int along_u = 0;  // transitions met while moving in u at fixed s
    int along_s = 0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const int l = lat[static_cast<std::size_t>(i * m + j)];
        if (i + 1 < m && lat[static_cast<std::size_t>((i + 1) * m + j)] != l) ++along_u;
        if (j + 1 < m && lat[static_cast<std::size_t>(i * m + j + 1)] != l) ++along_s;
      }
    }
    const bool inner_u = along_u > along_s;
    auto cuts = [&](bool along_u_line, double fixed, double a, double b) {
      if (along_u_line) {
        auto lab = [&](double u) { return label_(u, fixed); };
        return transitions_on(lab, a, b, probes_);
      }
      auto lab = [&](double s) { return label_(fixed, s); };
      return transitions_on(lab, a, b, probes_);
    };
    return iterated(r, inner_u, {}, cuts);
  }

  [[nodiscard]] Est level_rule(const Rect& r) const {
    const int m = probes_;
    const auto mz = static_cast<std::size_t>(m);
    std::vector<double> us(mz);
    std::vector<double> ss(mz);
    for (int k = 0; k < m; ++k) {
      us[static_cast<std::size_t>(k)] = probe(r.u0, r.u1, k);
      ss[static_cast<std::size_t>(k)] = probe(r.s0, r.s1, k);
    }
    struct Crossing {
      double u, s;
      const SquareLevel* level;
    };
    std::vector<Crossing> on_u_edges;  // edges u = u0, u1
    std::vector<Crossing> on_s_edges;  // edges s = s0, s1
    bool interior = false;
    int along_u = 0;
    int along_s = 0;
    std::vector<double> lat(mz * mz);
    std::vector<double> line(mz);
    std::vector<double> found;

    for (const SquareLevel& g : levels_) {
      for (std::size_t i = 0; i < mz; ++i) {
        for (std::size_t j = 0; j < mz; ++j) lat[i * mz + j] = g(us[i], ss[j]);
      }
      for (std::size_t i : {std::size_t{0}, mz - 1}) {
        found.clear();
        for (std::size_t j = 0; j < mz; ++j) line[j] = lat[i * mz + j];
        const double u = us[i];
        sampled_crossings([&](double s) { return g(u, s); }, ss, line, found);
        for (double s : found) on_u_edges.push_back({u, s, &g});
      }
      for (std::size_t j : {std::size_t{0}, mz - 1}) {
        found.clear();
        for (std::size_t i = 0; i < mz; ++i) line[i] = lat[i * mz + j];
        const double s = ss[j];
        sampled_crossings([&](double u) { return g(u, s); }, us, line, found);
        for (double u : found) on_s_edges.push_back({u, s, &g});
      }
      for (std::size_t i = 0; i < mz; ++i) {
        for (std::size_t j = 0; j < mz; ++j) {
          const double v = lat[i * mz + j];
          if (v == 0.0) interior = true;
          if (i + 1 < mz && v * lat[(i + 1) * mz + j] < 0.0) ++along_u;
          if (j + 1 < mz && v * lat[i * mz + j + 1] < 0.0) ++along_s;
        }
      }
      // near-zero extrema along interior lattice lines
      for (std::size_t i = 1; i + 1 < mz && !interior; ++i) {
        for (std::size_t j = 0; j < mz; ++j) line[j] = lat[i * mz + j];
        for (std::size_t j = 0; j < mz; ++j) interior = interior || graze_candidate(line, j);
      }
      for (std::size_t j = 1; j + 1 < mz && !interior; ++j) {
        for (std::size_t i = 0; i < mz; ++i) line[i] = lat[i * mz + j];
        for (std::size_t i = 0; i < mz; ++i) interior = interior || graze_candidate(line, i);
      }
    }
    if (on_u_edges.empty() && on_s_edges.empty() && !interior && along_u == 0 && along_s == 0) {
      return {tensor(r), 0.0};
    }

    // Inner lines should cross the cut lines transversally: weigh the unit
    // normal of each cut at its edge crossings, in panel-scaled coordinates.
    const double hu = r.u1 - r.u0;
    const double hs = r.s1 - r.s0;
    double weight_u = 0.0;
    double weight_s = 0.0;
    for (const auto* list : {&on_u_edges, &on_s_edges}) {
      for (const Crossing& c : *list) {
        const double du = 1e-6 * hu;
        const double ds = 1e-6 * hs;
        const SquareLevel& g = *c.level;
        const double gu = (g(std::min(c.u + du, r.u1), c.s) - g(std::max(c.u - du, r.u0), c.s)) * hu /
                          (std::min(c.u + du, r.u1) - std::max(c.u - du, r.u0));
        const double gs = (g(c.u, std::min(c.s + ds, r.s1)) - g(c.u, std::max(c.s - ds, r.s0))) * hs /
                          (std::min(c.s + ds, r.s1) - std::max(c.s - ds, r.s0));
        const double norm = std::hypot(gu, gs);
        if (norm > 0.0 && std::isfinite(norm)) {
          weight_u += std::abs(gu) / norm;
          weight_s += std::abs(gs) / norm;
        }
      }
    }
    bool inner_u = weight_u > weight_s;
    if (weight_u == weight_s) inner_u = along_u > along_s;

    std::vector<double> outer_breaks;
    if (inner_u) {
      for (const Crossing& c : on_u_edges) outer_breaks.push_back(c.s);
    } else {
      for (const Crossing& c : on_s_edges) outer_breaks.push_back(c.u);
    }
    auto cuts = [&](bool along_u_line, double fixed, double a, double b) {
      std::vector<double> out;
      for (const SquareLevel& g : levels_) {
        if (along_u_line) {
          line_crossings([&](double u) { return g(u, fixed); }, a, b, probes_, out);
        } else {
          line_crossings([&](double s) { return g(fixed, s); }, a, b, probes_, out);
        }
      }
      return out;
    };
    return iterated(r, inner_u, std::move(outer_breaks), cuts);
  }

  [[nodiscard]] Value2 tensor(const Rect& r) const {
    const double hu = 0.5 * (r.u1 - r.u0);
    const double hs = 0.5 * (r.s1 - r.s0);
    const double um = 0.5 * (r.u0 + r.u1);
    const double sm = 0.5 * (r.s0 + r.s1);
    Value2 acc{0.0, 0.0};
    const std::size_t n = gl_.nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double u = um + hu * gl_.nodes[i];
      for (std::size_t j = 0; j < n; ++j) {
        const double w = gl_.weights[i] * gl_.weights[j];
        const Value2 v = f_(u, sm + hs * gl_.nodes[j]);
        acc[0] += w * v[0];
        acc[1] += w * v[1];
      }
    }
    return {acc[0] * hu * hs, acc[1] * hu * hs};
  }

  // Integral over [a, b] of g (returning Est), split at the given points.
  // Each piece uses Gauss-Legendre rules of orders n and n + 1; the higher
  // one is kept and their difference, plus the weighted errors of g, is the
  // estimate. Pieces bounded by fixed cuts can be identical in a panel and
  // its children, so the comparison between those two cannot see them.
  template <class G>
  Est pieces(const G& g, double a, double b, std::vector<double> cuts) const {
    std::sort(cuts.begin(), cuts.end());
    Est acc;
    double lo = a;
    cuts.push_back(b);
    for (double hi : cuts) {
      hi = std::clamp(hi, lo, b);
      if (hi > lo) {
        const double h = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        Value2 low{0.0, 0.0};
        Value2 high{0.0, 0.0};
        for (std::size_t k = 0; k < gl_.nodes.size(); ++k) {
          const Est e = g(mid + h * gl_.nodes[k]);
          low[0] += gl_.weights[k] * h * e.v[0];
          low[1] += gl_.weights[k] * h * e.v[1];
        }
        for (std::size_t k = 0; k < gl_hi_.nodes.size(); ++k) {
          const Est e = g(mid + h * gl_hi_.nodes[k]);
          high[0] += gl_hi_.weights[k] * h * e.v[0];
          high[1] += gl_hi_.weights[k] * h * e.v[1];
          acc.err += gl_hi_.weights[k] * h * e.err;
        }
        acc.v[0] += high[0];
        acc.v[1] += high[1];
        acc.err += std::max(std::abs(high[0] - low[0]), std::abs(high[1] - low[1]));
      }
      lo = hi;
    }
    return acc;
  }

  // Iterated integral; `cuts(along_u, fixed, a, b)` gives the split points of
  // one inner line.
  template <class Cuts>
  Est iterated(const Rect& r, bool inner_u, std::vector<double> outer_breaks, const Cuts& cuts) const {
    if (inner_u) {
      auto inner = [&](double s) {
        return pieces([&](double u) { return Est{f_(u, s), 0.0}; }, r.u0, r.u1, cuts(true, s, r.u0, r.u1));
      };
      return pieces(inner, r.s0, r.s1, std::move(outer_breaks));
    }
    auto inner = [&](double u) {
      return pieces([&](double s) { return Est{f_(u, s), 0.0}; }, r.s0, r.s1, cuts(false, u, r.s0, r.s1));
    };
    return pieces(inner, r.u0, r.u1, std::move(outer_breaks));
  }

  const SquareIntegrand& f_;
  const SquareLabeler& label_;
  std::span<const SquareLevel> levels_;
  const GaussLegendre& gl_;
  const GaussLegendre& gl_hi_;
  int probes_;
};

struct SquarePanel {
  Rect rect;
  int depth = 0;
  Value2 value{};  // sum of the children rules
  std::array<Est, 4> child_rule{};
  double err = 0.0;
  int stalled = 0;  // consecutive splits that failed to reduce the error
};

std::array<Rect, 4> split(const Rect& r) {
  const double um = 0.5 * (r.u0 + r.u1);
  const double sm = 0.5 * (r.s0 + r.s1);
  return {Rect{r.u0, um, r.s0, sm}, Rect{um, r.u1, r.s0, sm}, Rect{r.u0, um, sm, r.s1}, Rect{um, r.u1, sm, r.s1}};
}

SquarePanel make_panel(const SquareRule& rule, const Rect& r, int depth, const Est& own) {
  SquarePanel p;
  p.rect = r;
  p.depth = depth;
  const auto kids = split(r);
  double internal = 0.0;
  for (int k = 0; k < 4; ++k) {
    p.child_rule[k] = rule(kids[k]);
    p.value[0] += p.child_rule[k].v[0];
    p.value[1] += p.child_rule[k].v[1];
    internal += p.child_rule[k].err;
  }
  p.err = std::max(std::abs(own.v[0] - p.value[0]), std::abs(own.v[1] - p.value[1])) + internal;
  return p;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  static const std::vector<GaussLegendre> table = [] {
    std::vector<GaussLegendre> t(kMaxOrder + 1);
    for (int n = 1; n <= kMaxOrder; ++n) t[n] = build_rule(n);
    return t;
  }();
  if (order < 1 || order > kMaxOrder) throw DomainError("gauss_legendre: order must lie in [1, 64]");
  return table[static_cast<std::size_t>(order)];
}

std::vector<double> panel_edges(std::span<const double> breaks, int n) {
  std::vector<double> cuts{0.0};
  for (double b : breaks) {
    if (b > 0.0 && b < 1.0) cuts.push_back(b);
  }
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> edges{0.0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    const int k = std::max(1, static_cast<int>(std::ceil((b - a) * n - 1e-9)));
    for (int j = 1; j < k; ++j) edges.push_back(a + (b - a) * j / k);
    edges.push_back(b);
  }
  return edges;
}

SquareResult integrate_unit_square(const SquareIntegrand& f, const SquareLabeler& label, const QuadratureSpec& spec,
                                   std::span<const double> u_breaks, std::span<const double> s_breaks,
                                   std::span<const SquareLevel> levels) {
  spec.validate();
  const SquareRule rule(f, label, levels, spec.base_order);

  auto cmp = [](const SquarePanel& a, const SquarePanel& b) { return a.err < b.err; };
  std::priority_queue<SquarePanel, std::vector<SquarePanel>, decltype(cmp)> queue(cmp);
  std::vector<SquarePanel> done;

  const auto ue = panel_edges(u_breaks, spec.initial_panels_u);
  const auto se = panel_edges(s_breaks, spec.initial_panels_s);
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < ue.size(); ++i) {
    for (std::size_t j = 0; j + 1 < se.size(); ++j) {
      const Rect r{ue[i], ue[i + 1], se[j], se[j + 1]};
      SquarePanel p = make_panel(rule, r, 0, rule(r));
      total_err += p.err;
      queue.push(std::move(p));
    }
  }

  int deepest = 0;
  Stagnation stagnation;
  while (total_err > spec.tol && !queue.empty()) {
    if (stagnation.stuck(total_err, static_cast<long>(queue.size() + done.size()))) break;
    SquarePanel top = queue.top();
    queue.pop();
    if (top.depth >= spec.max_depth) {
      done.push_back(std::move(top));
      continue;
    }
    if (static_cast<long>(queue.size() + done.size()) + 4 > spec.max_panels) {
      queue.push(std::move(top));
      break;
    }
    total_err -= top.err;
    const auto kids = split(top.rect);
    std::array<SquarePanel, 4> children;
    double child_err = 0.0;
    for (int k = 0; k < 4; ++k) {
      children[k] = make_panel(rule, kids[k], top.depth + 1, top.child_rule[k]);
      child_err += children[k].err;
    }
    const int stalled = child_err > kStallRatio * top.err ? top.stalled + 1 : 0;
    for (auto& child : children) {
      child.stalled = stalled;
      deepest = std::max(deepest, child.depth);
      total_err += child.err;
      // An error that no longer shrinks under refinement is rounding noise.
      if (stalled >= kStallLimit) {
        done.push_back(std::move(child));
      } else {
        queue.push(std::move(child));
      }
    }
    if (total_err <= spec.tol) {
      // guard against drift in the running sum
      double exact = 0.0;
      for (const auto& p : done) exact += p.err;
      auto copy = queue;
      while (!copy.empty()) {
        exact += copy.top().err;
        copy.pop();
      }
      total_err = exact;
    }
  }

  while (!queue.empty()) {
    done.push_back(queue.top());
    queue.pop();
  }
  std::sort(done.begin(), done.end(), [](const SquarePanel& a, const SquarePanel& b) {
    if (a.rect.u0 != b.rect.u0) return a.rect.u0 < b.rect.u0;
    return a.rect.s0 < b.rect.s0;
  });

  Accumulator acc0;
  Accumulator acc1;
  Accumulator err;
  for (const auto& p : done) {
    acc0.add(p.value[0]);
    acc1.add(p.value[1]);
    err.add(p.err);
  }

  SquareResult out;
  out.value = {acc0.value(), acc1.value()};
  out.stats.panels = static_cast<long>(done.size());
  out.stats.max_depth = deepest;
  out.stats.error_estimate = err.value();
  if (out.stats.error_estimate > spec.tol) {
    std::ostringstream os;
    os << "surface quadrature: estimated error " << out.stats.error_estimate << " exceeds tol " << spec.tol
       << " after " << out.stats.panels << " panels (max depth " << deepest << ")";
    throw ToleranceNotMet(os.str(), out.stats.error_estimate, out.stats.panels);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Segment {
  double a, b;
  int depth = 0;
  double value = 0.0;  // left + right rules
  double left = 0.0;
  double right = 0.0;
  double err = 0.0;
  int stalled = 0;
};

struct Est1 {
  double v = 0.0;
  double err = 0.0;
};

class IntervalRule {
 public:
  IntervalRule(const IntervalIntegrand& f, const IntervalLabeler& label, std::span<const IntervalLevel> levels,
               int order)
      : f_(f),
        label_(label),
        levels_(levels),
        gl_(gauss_legendre(order)),
        gl_hi_(gauss_legendre(order + 1)),
        probes_(std::max(order + 2, 6)) {}

  // Pieces between cuts also get an order n versus n + 1 estimate, for the
  // same reason as in the square rule.
  Est1 operator()(double a, double b) const {
    std::vector<double> cuts;
    if (levels_.empty()) {
      cuts = transitions_on(label_, a, b, probes_);
    } else {
      for (const IntervalLevel& g : levels_) line_crossings(g, a, b, probes_, cuts);
    }
    const bool cut = !cuts.empty();
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(b);
    Est1 acc;
    double lo = a;
    for (double hi : cuts) {
      hi = std::clamp(hi, lo, b);
      if (hi > lo) {
        const double h = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        double low = 0.0;
        for (std::size_t k = 0; k < gl_.nodes.size(); ++k) low += gl_.weights[k] * h * f_(mid + h * gl_.nodes[k]);
        if (cut) {
          double high = 0.0;
          for (std::size_t k = 0; k < gl_hi_.nodes.size(); ++k) {
            high += gl_hi_.weights[k] * h * f_(mid + h * gl_hi_.nodes[k]);
          }
          acc.v += high;
          acc.err += std::abs(high - low);
        } else {
          acc.v += low;
        }
      }
      lo = hi;
    }
    return acc;
  }

 private:
  const IntervalIntegrand& f_;
  const IntervalLabeler& label_;
  std::span<const IntervalLevel> levels_;
  const GaussLegendre& gl_;
  const GaussLegendre& gl_hi_;
  int probes_;
};

Segment make_segment(const IntervalRule& rule, double a, double b, int depth, double own) {
  Segment s{a, b, depth};
  const double m = 0.5 * (a + b);
  const Est1 l = rule(a, m);
  const Est1 r = rule(m, b);
  s.left = l.v;
  s.right = r.v;
  s.value = s.left + s.right;
  s.err = std::abs(own - s.value) + l.err + r.err;
  return s;
}

}  // namespace

IntervalResult integrate_interval(const IntervalIntegrand& f, const IntervalLabeler& label, double a, double b,
                                  const QuadratureSpec& spec, int initial_panels,
                                  std::span<const IntervalLevel> levels) {
  spec.validate();
  IntervalResult out;
  if (a == b) return out;
  if (b < a) {
    out = integrate_interval(f, label, b, a, spec, initial_panels, levels);
    out.value = -out.value;
    return out;
  }
  const IntervalRule rule(f, label, levels, spec.base_order);
  auto cmp = [](const Segment& x, const Segment& y) { return x.err < y.err; };
  std::priority_queue<Segment, std::vector<Segment>, decltype(cmp)> queue(cmp);
  std::vector<Segment> done;

  const int n = std::max(1, initial_panels);
  double total_err = 0.0;
  for (int i = 0; i < n; ++i) {
    const double lo = a + (b - a) * i / n;
    const double hi = (i == n - 1) ? b : a + (b - a) * (i + 1) / n;
    Segment s = make_segment(rule, lo, hi, 0, rule(lo, hi).v);
    total_err += s.err;
    queue.push(s);
  }
  int deepest = 0;
  Stagnation stagnation;
  while (total_err > spec.tol && !queue.empty()) {
    if (stagnation.stuck(total_err, static_cast<long>(queue.size() + done.size()))) break;
    Segment top = queue.top();
    queue.pop();
    if (top.depth >= spec.max_depth ||
        static_cast<long>(queue.size() + done.size()) + 2 > spec.max_panels) {
      done.push_back(top);
      continue;
    }
    total_err -= top.err;
    const double m = 0.5 * (top.a + top.b);
    std::array<Segment, 2> halves{make_segment(rule, top.a, m, top.depth + 1, top.left),
                                  make_segment(rule, m, top.b, top.depth + 1, top.right)};
    const int stalled = halves[0].err + halves[1].err > kStallRatio * top.err ? top.stalled + 1 : 0;
    for (Segment& s : halves) {
      s.stalled = stalled;
      deepest = std::max(deepest, s.depth);
      total_err += s.err;
      if (stalled >= kStallLimit) {
        done.push_back(s);
      } else {
        queue.push(s);
      }
    }
  }
  while (!queue.empty()) {
    done.push_back(queue.top());
    queue.pop();
  }
  std::sort(done.begin(), done.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  Accumulator acc;
  Accumulator err;
  for (const auto& s : done) {
    acc.add(s.value);
    err.add(s.err);
  }
  out.value = acc.value();
  out.stats.panels = static_cast<long>(done.size());
  out.stats.max_depth = deepest;
  out.stats.error_estimate = err.value();
  if (out.stats.error_estimate > spec.tol) {
    std::ostringstream os;
    os << "line quadrature: estimated error " << out.stats.error_estimate << " exceeds tol " << spec.tol;
    throw ToleranceNotMet(os.str(), out.stats.error_estimate, out.stats.panels);
  }
  return out;
}

std::vector<double> level_crossings(const IntervalLevel& g, double a, double b, int samples) {
  if (samples < 2) throw DomainError("level_crossings: need at least two samples");
  if (!(a < b)) throw DomainError("level_crossings: need a < b");
  std::vector<double> out;
  line_crossings(g, a, b, samples, out);
  sort_unique(out);
  return out;
}

}  // namespace abphase
