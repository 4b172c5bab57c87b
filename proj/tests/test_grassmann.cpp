#include <doctest.h>

#include <cmath>
#include <numbers>

#include "grassdyn/error.hpp"
#include "grassdyn/grassmann.hpp"
#include "support.hpp"

using namespace grassdyn;

namespace {

Vector e(std::size_t N, std::size_t i, double s = 1.0) { return Vector::basis(N, i, s); }

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& err) {
    return err.code();
  }
  FAIL("expected an error");
  return Errc::config;
}

double max_coordinate_distance(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, l2_norm(a[i] - b[i]));
  return d;
}

Subspace random_subspace(gen::Rng& rng, std::size_t n, std::size_t N, bool cplx) {
  return pi_n(gen::tuple(rng, n, N, cplx));
}

}  // namespace

TEST_CASE("pi_n examples") {
  const Subspace s = pi_n({e(4, 0), e(4, 1)});
  CHECK(s.n() == 2);
  CHECK(s.dim() == 4);
  CHECK(grassmann_distance(s, Subspace(Eigen::MatrixXcd::Identity(4, 2))) < 1e-15);
  CHECK(code_of([] { (void)pi_n({e(4, 0), e(4, 0, 2.0)}); }) == Errc::rank_deficient);
  const Subspace t = pi_n({e(4, 0) + e(4, 1), e(4, 0) - e(4, 1)});
  CHECK(grassmann_distance(s, t) < 1e-15);
}

TEST_CASE("pi_n error message names the complement of X_n") {
  try {
    (void)pi_n({e(3, 0), Vector(3)});
    FAIL("expected rank deficiency");
  } catch (const Error& err) {
    CHECK(std::string(err.what()) == "tuple not in X_n");
  }
}

TEST_CASE("perturb_to_independent examples") {
  const std::vector<Vector> dependent{e(6, 0), e(6, 0, 2.0)};
  const auto p = perturb_to_independent(dependent, 1e-3, 17);
  CHECK_NOTHROW((void)pi_n(p));
  CHECK(max_coordinate_distance(p, dependent) <= 1e-3);
  CHECK(perturb_to_independent(dependent, 1e-3, 17) == p);

  const std::vector<Vector> independent{e(6, 0), e(6, 1)};
  CHECK(perturb_to_independent(independent, 1e-6, 3) == independent);

  const std::vector<Vector> zeros{Vector(2), Vector(2)};
  const auto z = perturb_to_independent(zeros, 0.1, 5);
  CHECK_NOTHROW((void)pi_n(z));
  for (const auto& v : z) CHECK(l2_norm(v) <= 0.1);

  CHECK(code_of([&] { (void)perturb_to_independent(zeros, 0.0, 5); }) == Errc::precondition);
}

TEST_CASE("grassmann distance examples") {
  const Subspace a = pi_n({e(3, 0)});
  CHECK(grassmann_distance(a, pi_n({e(3, 0) + e(3, 1)})) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-10));
  CHECK(grassmann_distance(a, a) == 0.0);
  CHECK(grassmann_distance(a, pi_n({e(3, 1)})) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
  CHECK(code_of([&] { (void)grassmann_distance(a, pi_n({e(3, 0), e(3, 1)})); }) == Errc::dimension_mismatch);
}

TEST_CASE("largest principal angle against a rotation oracle") {
  // span(e0, e1) against span(e0, cos t e1 + sin t e2): the angles are {0, t}.
  gen::Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const double t = rng.uniform(0.0, std::numbers::pi / 2);
    const Subspace A = pi_n({e(5, 0), e(5, 1)});
    const Subspace B = pi_n({e(5, 0), e(5, 1, std::cos(t)) + e(5, 2, std::sin(t))});
    CHECK(std::abs(grassmann_distance(A, B) - t) < 1e-10);
    const auto angles = principal_angles(A, B);
    REQUIRE(angles.size() == 2);
    CHECK(std::abs(angles[0]) < 1e-10);
    CHECK(std::abs(angles[1] - t) < 1e-10);
  }
}

TEST_CASE("push_forward examples") {
  const Subspace plane = pi_n({e(2, 0), e(2, 1)});
  CHECK(grassmann_distance(push_forward(diagonal({2.0, 3.0}), plane), plane) < 1e-15);
  CHECK(code_of([] { (void)push_forward(backward_shift(4), pi_n({e(4, 0)})); }) == Errc::dimension_drop);
  const Subspace img = push_forward(scaled(2.0, backward_shift(8)), pi_n({e(8, 3)}));
  CHECK(grassmann_distance(img, pi_n({e(8, 2)})) < 1e-15);
}

TEST_CASE("sphere deviation examples") {
  gen::Rng rng(2);
  const Subspace E = random_subspace(rng, 3, 8, false);
  CHECK(sphere_deviation(E, E, 200, 4) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(sphere_deviation(E, E, 200, 4) < 1e-10);
  const double orth = sphere_deviation(pi_n({e(3, 0)}), pi_n({e(3, 1)}), 50, 9);
  CHECK(std::abs(orth - std::sqrt(2.0)) < 1e-6);
  CHECK(sphere_deviation(E, E, 10, 4) == sphere_deviation(E, E, 10, 4));
}

TEST_CASE("sphere convergence for 1/n perturbations of a basis") {
  gen::Rng rng(3);
  const std::size_t N = 12;
  const std::size_t h = 3;
  std::vector<Vector> u;
  for (std::size_t i = 0; i < h; ++i) u.push_back(e(N, i));
  std::vector<Vector> w;
  for (std::size_t i = 0; i < h; ++i) {
    Vector d = gen::vector(rng, N, 1.0);
    w.push_back((1.0 / l2_norm(d)) * d);
  }
  const Subspace E = pi_n(u);
  double prev = std::numeric_limits<double>::infinity();
  std::size_t n0 = 0;
  double first = 0.0;
  for (std::size_t n = 10; n <= 10240; n *= 2) {
    std::vector<Vector> v;
    for (std::size_t i = 0; i < h; ++i) {
      v.push_back(u[i] + (1.0 / static_cast<double>(n)) * w[i]);
      CHECK(std::abs(l2_norm(v[i] - u[i]) - 1.0 / static_cast<double>(n)) < 1e-15);
    }
    const double dev = sphere_deviation(E, pi_n(v), 400, 21);
    if (n == 10) first = dev * 10.0;
    CHECK(dev <= prev * (1 + 1e-9));
    CHECK(dev <= 2.0 * first / static_cast<double>(n));
    if (n0 == 0 && dev < 0.01) n0 = n;
    prev = dev;
  }
  MESSAGE("sphere deviation below 0.01 from n0 = " << n0);
  CHECK(n0 > 0);
}

TEST_CASE("property: metric axioms") {
  gen::Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t N = rng.index(2, 10);
    const std::size_t n = rng.index(1, N);
    const bool cplx = rng.coin();
    const Subspace a = random_subspace(rng, n, N, cplx);
    const Subspace b = random_subspace(rng, n, N, cplx);
    const Subspace c = random_subspace(rng, n, N, cplx);
    const double ab = grassmann_distance(a, b);
    CHECK(ab == grassmann_distance(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= std::numbers::pi / 2 + 1e-12);
    CHECK(grassmann_distance(a, c) <= ab + grassmann_distance(b, c) + 1e-9);
    CHECK(grassmann_distance(a, a) < 1e-8);
  }
}

TEST_CASE("property: frames are orthonormal and GL-invariant") {
  gen::Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t N = rng.index(2, 12);
    const std::size_t n = rng.index(1, std::min<std::size_t>(N, 4));
    const bool cplx = rng.coin();
    const auto tuple = gen::tuple(rng, n, N, cplx);
    const Subspace s = pi_n(tuple);
    const auto nn = static_cast<Eigen::Index>(n);
    CHECK((s.frame().adjoint() * s.frame() - Eigen::MatrixXcd::Identity(nn, nn)).norm() < 1e-10);

    const Eigen::MatrixXcd A = gen::invertible(rng, n, cplx);
    const Eigen::MatrixXcd mixed = tuple_matrix(tuple) * A;
    CHECK(grassmann_distance(orthonormalize(mixed), s) < 1e-10);
    const double c = std::pow(2.0, static_cast<double>(rng.integer(-20, 20)));
    CHECK(grassmann_distance(orthonormalize(c * tuple_matrix(tuple)), s) < 1e-10);
  }
}

TEST_CASE("property: push_forward equals pi_n of the image tuple") {
  gen::Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t N = rng.index(3, 12);
    const std::size_t n = rng.index(1, 2);
    const OperatorSpec op = rng.coin() ? adjoint_multiplication(rng.uniform(0.5, 2.0), N)
                                       : scaled(2.0, backward_shift(N));
    const auto tuple = gen::tuple(rng, n, N);
    std::vector<Vector> image;
    for (const auto& v : tuple) image.push_back(apply(op, v).value);
    Subspace direct;
    try {
      direct = pi_n(image);
    } catch (const Error&) {
      continue;
    }
    CHECK(grassmann_distance(push_forward(op, pi_n(tuple)), direct) < 1e-10);
  }
}

TEST_CASE("subspace JSON round trip") {
  gen::Rng rng(8);
  const Subspace s = random_subspace(rng, 2, 5, true);
  const json j = to_json(s);
  CHECK(j["n"] == 2);
  CHECK(j["dim"] == 5);
  CHECK(grassmann_distance(subspace_from_json(j), s) < 1e-15);
}
