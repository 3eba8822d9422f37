#include "abphase/polynomial.hpp"

#include <algorithm>

namespace abphase {

Polynomial4 Polynomial4::random(std::mt19937_64& rng, int degree, double scale) {
  std::uniform_real_distribution<double> coef(-scale, scale);
  std::vector<Term> terms;
  for (int a = 0; a <= degree; ++a) {
    for (int b = 0; a + b <= degree; ++b) {
      for (int c = 0; a + b + c <= degree; ++c) {
        for (int d = 0; a + b + c + d <= degree; ++d) {
          Term term;
          term.coef = coef(rng);
          term.exps = {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), static_cast<std::uint8_t>(c),
                       static_cast<std::uint8_t>(d)};
          terms.push_back(term);
        }
      }
    }
  }
  return Polynomial4(std::move(terms));
}

double Polynomial4::operator()(double t, double x, double y, double z) const {
  const std::array<double, 4> v{t, x, y, z};
  double sum = 0.0;
  for (const auto& term : terms_) {
    double p = term.coef;
    for (int k = 0; k < 4; ++k) {
      for (int e = 0; e < term.exps[k]; ++e) p *= v[k];
    }
    sum += p;
  }
  return sum;
}

Polynomial4 Polynomial4::derivative(Var v) const {
  std::vector<Term> out;
  for (const auto& term : terms_) {
    if (term.exps[v] == 0) continue;
    Term d = term;
    d.coef *= term.exps[v];
    d.exps[v] = static_cast<std::uint8_t>(term.exps[v] - 1);
    out.push_back(d);
  }
  return Polynomial4(std::move(out));
}

int Polynomial4::degree() const {
  int deg = 0;
  for (const auto& term : terms_) {
    deg = std::max(deg, term.exps[0] + term.exps[1] + term.exps[2] + term.exps[3]);
  }
  return deg;
}

Polynomial4 operator+(const Polynomial4& a, const Polynomial4& b) {
  auto terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return Polynomial4(std::move(terms));
}

Polynomial4 operator*(double k, const Polynomial4& a) {
  auto terms = a.terms_;
  for (auto& t : terms) t.coef *= k;
  return Polynomial4(std::move(terms));
}

}  // namespace abphase
