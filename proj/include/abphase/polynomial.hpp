#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "abphase/vec.hpp"

namespace abphase {

/// Sparse polynomial in the spacetime coordinates (t, x, y, z).
class Polynomial4 {
 public:
  enum Var : int { T = 0, X = 1, Y = 2, Z = 3 };

  struct Term {
    double coef = 0.0;
    std::array<std::uint8_t, 4> exps{};
  };

  Polynomial4() = default;
  explicit Polynomial4(std::vector<Term> terms) : terms_(std::move(terms)) {}

  static Polynomial4 constant(double c) { return Polynomial4(std::vector<Term>{Term{c, {0, 0, 0, 0}}}); }

  /// Every monomial of total degree <= degree with coefficients uniform in [-scale, scale].
  static Polynomial4 random(std::mt19937_64& rng, int degree, double scale = 1.0);

  [[nodiscard]] double operator()(double t, double x, double y, double z) const;
  [[nodiscard]] double operator()(const Event& e) const { return (*this)(e.t, e.pos.x, e.pos.y, e.pos.z); }

  [[nodiscard]] Polynomial4 derivative(Var v) const;
  [[nodiscard]] int degree() const;
  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }

  friend Polynomial4 operator+(const Polynomial4& a, const Polynomial4& b);
  friend Polynomial4 operator*(double k, const Polynomial4& a);

 private:
  std::vector<Term> terms_;
};

}  // namespace abphase
