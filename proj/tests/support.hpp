#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "grassdyn/polynomial.hpp"
#include "grassdyn/space.hpp"

// Seeded generators for the property tests.
namespace gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(eng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(eng_);
  }
  bool coin() { return integer(0, 1) == 1; }

 private:
  std::mt19937_64 eng_;
};

inline grassdyn::Scalar scalar(Rng& r, bool complex_field) {
  return {r.normal(), complex_field ? r.normal() : 0.0};
}

// Random vector of dimension dim with roughly `density` of its coordinates set.
inline grassdyn::Vector vector(Rng& r, std::size_t dim, double density = 0.5, bool complex_field = false) {
  grassdyn::Vector v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (r.uniform(0.0, 1.0) < density) v.set(i, scalar(r, complex_field));
  }
  if (v.is_zero() && dim > 0) v.set(r.index(0, dim - 1), 1.0);
  return v;
}

inline std::vector<grassdyn::Vector> tuple(Rng& r, std::size_t n, std::size_t dim, bool complex_field = false) {
  std::vector<grassdyn::Vector> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(vector(r, dim, 1.0, complex_field));
  return out;
}

inline grassdyn::Rational rational(Rng& r, long height) {
  grassdyn::Rational q(r.integer(-height, height), r.integer(1, height));
  q.canonicalize();
  return q;
}

inline grassdyn::Polynomial polynomial(Rng& r, int max_degree, long height) {
  std::vector<grassdyn::Rational> c;
  const long deg = r.integer(-1, max_degree);
  for (long i = 0; i <= deg; ++i) c.push_back(rational(r, height));
  return grassdyn::Polynomial(std::move(c));
}

// Well-conditioned random invertible matrix: identity plus a small perturbation.
inline Eigen::MatrixXcd invertible(Rng& r, std::size_t n, bool complex_field = false) {
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = 0; j < nn; ++j) A(i, j) += 0.3 * scalar(r, complex_field);
  }
  return A;
}

}  // namespace gen

inline double rel_diff(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) / scale;
}
