#include "grassdyn/polynomial.hpp"

#include <algorithm>

#include "grassdyn/error.hpp"

namespace grassdyn {

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational rational_from_string(const std::string& s) {
  Rational q;
  const auto dot = s.find('.');
  if (dot != std::string::npos && s.find('/') == std::string::npos) {
    const std::string frac = s.substr(dot + 1);
    mpz_class num;
    if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos ||
        num.set_str(s.substr(0, dot) + frac, 10) != 0) {
      throw Error(Errc::config, "not a rational: '" + s + "'");
    }
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    q = Rational(num, den);
    q.canonicalize();
    return q;
  }
  if (q.set_str(s, 10) != 0 || q.get_den() == 0) throw Error(Errc::config, "not a rational: '" + s + "'");
  q.canonicalize();
  return q;
}

Polynomial::Polynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { prune(); }

Polynomial::Polynomial(std::initializer_list<Rational> coeffs) : c_(coeffs) { prune(); }

Polynomial Polynomial::constant(const Rational& c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(std::size_t degree, const Rational& c) {
  std::vector<Rational> v(degree + 1);
  v[degree] = c;
  return Polynomial(std::move(v));
}

void Polynomial::prune() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational Polynomial::l1() const {
  Rational s = 0;
  for (const auto& x : c_) s += abs(x);
  return s;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  prune();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  prune();
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& s) {
  if (s == 0) {
    c_.clear();
    return *this;
  }
  for (auto& x : c_) x *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  }
  return Polynomial(std::move(out));
}

Polynomial Polynomial::shifted(std::size_t k) const {
  if (is_zero()) return {};
  std::vector<Rational> out(k, Rational(0));
  out.insert(out.end(), c_.begin(), c_.end());
  return Polynomial(std::move(out));
}

std::string Polynomial::str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) s += ", ";
    s += to_string(c_[i]);
  }
  return s + "]";
}

nlohmann::json to_json(const Polynomial& p) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& c : p.coeffs()) a.push_back(to_string(c));
  return a;
}

Polynomial polynomial_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(Errc::config, "polynomial: expected an array of coefficients");
  std::vector<Rational> c;
  for (const auto& x : j) {
    if (x.is_string()) {
      c.push_back(rational_from_string(x.get<std::string>()));
    } else if (x.is_number_integer()) {
      c.emplace_back(x.get<long>());
    } else {
      throw Error(Errc::config, "polynomial: coefficients must be integers or \"num/den\" strings");
    }
  }
  return Polynomial(std::move(c));
}

}  // namespace grassdyn
