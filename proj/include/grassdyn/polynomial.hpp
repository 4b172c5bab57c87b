#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include <json.hpp>

namespace grassdyn {

using Rational = mpq_class;

/// "num/den", always with an explicit denominator.
[[nodiscard]] std::string to_string(const Rational& q);
/// Accepts "num/den", an integer, or a finite decimal such as "0.9".
[[nodiscard]] Rational rational_from_string(const std::string& s);

/// Polynomial with exact rational coefficients, index = degree.
/// Trailing zeros are pruned so the zero polynomial has no coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coeffs);
  Polynomial(std::initializer_list<Rational> coeffs);

  static Polynomial constant(const Rational& c);
  static Polynomial monomial(std::size_t degree, const Rational& c = 1);

  /// -1 for the zero polynomial.
  [[nodiscard]] int degree() const { return static_cast<int>(c_.size()) - 1; }
  [[nodiscard]] bool is_zero() const { return c_.empty(); }
  [[nodiscard]] const std::vector<Rational>& coeffs() const { return c_; }
  [[nodiscard]] Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
  [[nodiscard]] Rational l1() const;
  /// Leading coefficient cd(P); zero for the zero polynomial.
  [[nodiscard]] Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

  /// Multiplication by X^k.
  [[nodiscard]] Polynomial shifted(std::size_t k) const;

  /// "[c0, c1, ...]" with each coefficient as "num/den".
  [[nodiscard]] std::string str() const;

 private:
  void prune();
  std::vector<Rational> c_;
};

[[nodiscard]] nlohmann::json to_json(const Polynomial& p);
[[nodiscard]] Polynomial polynomial_from_json(const nlohmann::json& j);

}  // namespace grassdyn
