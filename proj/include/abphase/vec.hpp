#pragma once

#include <cmath>
#include <ostream>

namespace abphase {

/// Cartesian three-vector. Units depend on context (m, m/s, V/m, T, ...).
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double k) {
    x *= k;
    y *= k;
    z *= k;
    return *this;
  }

  [[nodiscard]] double norm() const { return std::sqrt(x * x + y * y + z * z); }
  [[nodiscard]] constexpr double norm2() const { return x * x + y * y + z * z; }
  [[nodiscard]] bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double k) { return a *= k; }
constexpr Vec3 operator*(double k, Vec3 a) { return a *= k; }
constexpr Vec3 operator/(const Vec3& a, double k) { return {a.x / k, a.y / k, a.z / k}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
  return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
}

/// A point in spacetime: frame time t (s) and position (m).
struct Event {
  double t = 0.0;
  Vec3 pos;

  [[nodiscard]] bool finite() const { return std::isfinite(t) && pos.finite(); }
  friend constexpr bool operator==(const Event&, const Event&) = default;
};

/// A spacetime displacement or tangent vector (dt, dpos).
struct Tangent4 {
  double dt = 0.0;
  Vec3 dpos;

  friend constexpr bool operator==(const Tangent4&, const Tangent4&) = default;
};

constexpr Tangent4 operator+(const Tangent4& a, const Tangent4& b) {
  return {a.dt + b.dt, a.dpos + b.dpos};
}
constexpr Tangent4 operator-(const Tangent4& a, const Tangent4& b) {
  return {a.dt - b.dt, a.dpos - b.dpos};
}
constexpr Tangent4 operator*(double k, const Tangent4& a) { return {k * a.dt, k * a.dpos}; }

constexpr Tangent4 operator-(const Event& a, const Event& b) { return {a.t - b.t, a.pos - b.pos}; }
constexpr Event operator+(const Event& e, const Tangent4& d) { return {e.t + d.dt, e.pos + d.dpos}; }

/// Affine combination (1 - w) a + w b.
constexpr Event lerp(const Event& a, const Event& b, double w) {
  return {(1.0 - w) * a.t + w * b.t, (1.0 - w) * a.pos + w * b.pos};
}

inline std::ostream& operator<<(std::ostream& os, const Event& e) {
  return os << "(t=" << e.t << "; " << e.pos << ')';
}

}  // namespace abphase
