#include <doctest.h>

#include <cmath>
#include <numbers>

#include "grassdyn/construction.hpp"
#include "grassdyn/error.hpp"
#include "grassdyn/operators.hpp"
#include "support.hpp"

using namespace grassdyn;

namespace {

Vector dense(std::initializer_list<double> xs) {
  Vector v(xs.size());
  std::size_t i = 0;
  for (double x : xs) v.set(i++, x);
  return v;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::config;
}

// Random operator of a given variant family, used by the matrix/apply properties.
OperatorSpec random_op(gen::Rng& rng, int variant, std::size_t dim, bool cplx) {
  auto weights = [&](std::size_t n) {
    std::vector<double> w;
    for (std::size_t i = 0; i + 1 < n; ++i) w.push_back(rng.uniform(0.5, 3.0));
    return w;
  };
  switch (variant) {
    case 0: {
      std::vector<Scalar> l;
      for (std::size_t i = 0; i < dim; ++i) l.push_back(gen::scalar(rng, cplx));
      return diagonal(l);
    }
    case 1:
      return backward_shift(dim, weights(dim));
    case 2:
      return forward_shift(dim, weights(dim));
    case 3:
      return adjoint_multiplication(gen::scalar(rng, cplx), dim);
    case 4:
      return scaled(gen::scalar(rng, cplx) + 0.1, backward_shift(dim));
    default: {
      const std::size_t a = dim / 2;
      return direct_sum({diagonal(std::vector<Scalar>(a, 0.5)), adjoint_multiplication(1.0, dim - a)});
    }
  }
}

}  // namespace

TEST_CASE("apply examples") {
  const auto r = apply(backward_shift(5), dense({1, 2, 3, 0, 0}));
  CHECK(r.value == dense({2, 3, 0, 0, 0}));
  CHECK(r.mass_lost == 0.0);
  CHECK(apply(diagonal({2.0, 3.0}), dense({1, 1})).value == dense({2, 3}));
  const Vector e1 = Vector::basis(4, 1);
  CHECK(apply(adjoint_multiplication(1.0, 4), e1).value == Vector::basis(4, 0) + Vector::basis(4, 1));
  CHECK(apply(identity(3), dense({1, 2, 3})).value == dense({1, 2, 3}));
}

TEST_CASE("forward shift reports the dropped mass") {
  const auto r = apply(forward_shift(3, {2.0, 3.0}), dense({1, 1, 5}));
  CHECK(r.value == dense({0, 2, 3}));
  CHECK(r.mass_lost == doctest::Approx(5.0));
}

TEST_CASE("weighted backward shift") {
  const auto r = apply(backward_shift(3, {2.0, 3.0}), dense({1, 1, 1}));
  CHECK(r.value == dense({2, 3, 0}));
}

TEST_CASE("apply and construction errors") {
  CHECK(code_of([] { (void)apply(backward_shift(4), Vector(5)); }) == Errc::dimension_mismatch);
  CHECK(code_of([] { (void)scaled(0.0, identity(2)); }) == Errc::precondition);
  CHECK(code_of([] { (void)backward_shift(3, {1.0, -1.0}); }) == Errc::precondition);
  CHECK(code_of([] { (void)truncated_matrix(identity(10), 5); }) == Errc::cap_exceeded);
}

TEST_CASE("truncated matrix examples") {
  Eigen::MatrixXcd B(2, 2);
  B << 0, 1, 0, 0;
  CHECK(truncated_matrix(backward_shift(2)) == B);
  const Eigen::MatrixXcd D = truncated_matrix(diagonal({5.0}));
  CHECK(D.rows() == 1);
  CHECK(D(0, 0) == Scalar(5.0));
}

TEST_CASE("perturbed shift column b1-1 matches eps_1 e_5 + f_1") {
  // pow2p1, p = 2: b_0 = 1, b_1 = 5. The n = 0 relation gives T e_0 = e_1, so with
  // P_1 = 1 + X/2, f_1 = eps_1 (e_0 + e_1 / 2) and eps_1 = 1/(w_2 w_3 w_4).
  ConstructionParams params;
  params.p = 2;
  params.scheme = IndexScheme::pow2p1;
  params.source = SourceKind::explicit_list;
  params.explicit_polys[1] = Polynomial{1, Rational(1, 2)};
  const double eps1 = 1.0 / ((4 - std::sqrt(2.0)) * (4 - 2 / std::sqrt(3.0)) * 3.0);
  CHECK(eps1 == doctest::Approx(0.04531).epsilon(1e-4));

  const Eigen::MatrixXcd M = truncated_matrix(build_operator(params, 12));
  const EpsilonF ef = epsilon_f(params, 1);
  CHECK(rel_diff(ef.epsilon, eps1) < 1e-14);
  for (Eigen::Index i = 0; i < 12; ++i) {
    double expected = 0.0;
    if (i == 5) expected = ef.epsilon;
    expected += ef.f[static_cast<std::size_t>(i)].real() * (i < 5 ? 1.0 : 0.0);
    CHECK(std::abs(M(i, 4) - expected) < 1e-15);
    const double oracle = (i == 0 || i == 5) ? eps1 : (i == 1 ? eps1 / 2 : 0.0);
    CHECK(std::abs(M(i, 4).real() - oracle) < 1e-15);
  }
  // column 0 is the n = 0 relation, the rest the plain weighted shift
  CHECK(M(1, 0) == Scalar(1.0));
  CHECK(std::abs(M(2, 1) - weight(2)) < 1e-15);
  CHECK(std::abs(M(7, 6) - weight(7)) < 1e-15);
}

TEST_CASE("operator norm estimates") {
  CHECK(operator_norm_estimate(backward_shift(50), 50) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(operator_norm_estimate(diagonal({1.0, -2.0, 0.5}), 200) == doctest::Approx(2.0).epsilon(1e-6));
  for (IndexScheme scheme : {IndexScheme::pow2p1, IndexScheme::pow5}) {
    ConstructionParams params;
    params.p = 2;
    params.scheme = scheme;
    params.source = SourceKind::classic;
    const double est = operator_norm_estimate(build_operator(params, 200), 100);
    CHECK(est > 0.0);
    CHECK(est <= 6.0);
  }
}

TEST_CASE("property: norm estimate is nondecreasing in iterations and below the SVD norm") {
  gen::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const OperatorSpec op = random_op(rng, static_cast<int>(rng.index(0, 5)), rng.index(2, 20), rng.coin());
    const double exact = truncated_matrix(op).jacobiSvd().singularValues()(0);
    double prev = 0.0;
    for (int it : {0, 1, 2, 5, 10, 40}) {
      const double est = operator_norm_estimate(op, it);
      CHECK(est >= prev);
      CHECK(est <= exact * (1 + 1e-12));
      prev = est;
    }
  }
}

TEST_CASE("analytic spectrum examples") {
  const OperatorSpec third = direct_sum({diagonal({-1.0, -0.5}), adjoint_multiplication(1.0, 8)});
  const SpectrumDescription s = analytic_spectrum(third);
  REQUIRE(s.components.size() == 3);
  CHECK(s.components[0].kind == SpectrumComponent::Kind::point);
  CHECK(s.components[0].center == Scalar(-1.0));
  CHECK(s.components[1].center == Scalar(-0.5));
  CHECK(s.components[2].kind == SpectrumComponent::Kind::disk);
  CHECK(s.components[2].center == Scalar(1.0));
  CHECK(s.components[2].r_out == 1.0);

  const SpectrumDescription d = analytic_spectrum(adjoint_multiplication({1.0, 1.0}, 4));
  REQUIRE(d.components.size() == 1);
  CHECK(d.components[0].center == Scalar(1.0, 1.0));
  CHECK(d.components[0].r_out == 1.0);

  const SpectrumDescription p = analytic_spectrum(diagonal({3.0}));
  REQUIRE(p.components.size() == 1);
  CHECK(p.components[0].center == Scalar(3.0));

  const SpectrumDescription sc = analytic_spectrum(scaled(2.0, adjoint_multiplication(1.0, 4)));
  CHECK(sc.components[0].center == Scalar(2.0));
  CHECK(sc.components[0].r_out == 2.0);

  CHECK(code_of([] { (void)analytic_spectrum(backward_shift(4)); }) == Errc::unsupported);
  CHECK(code_of([] { (void)analytic_spectrum(forward_shift(4)); }) == Errc::unsupported);
}

TEST_CASE("circles meeting every component") {
  const SpectrumDescription third = analytic_spectrum(direct_sum({diagonal({-1.0, -0.5}), adjoint_multiplication(1.0, 8)}));
  for (double R = 0.0; R <= 3.0; R += 0.01) CHECK_FALSE(circle_intersects_all_components(third, R));
  CHECK_FALSE(passing_radii(third).has_value());

  SpectrumDescription two;
  two.components.push_back({SpectrumComponent::Kind::point, std::polar(2.0, 0.7), 0.0, 0.0});
  two.components.push_back({SpectrumComponent::Kind::disk, 2.0, 0.0, 0.5});
  CHECK(circle_intersects_all_components(two, 2.0));
  CHECK_FALSE(circle_intersects_all_components(two, 2.4));

  CHECK(circle_intersects_all_components(SpectrumDescription{}, 1.0));

  const SpectrumDescription disk = analytic_spectrum(adjoint_multiplication(1.0, 4));
  const auto radii = passing_radii(disk);
  REQUIRE(radii.has_value());
  CHECK(radii->first == doctest::Approx(0.0));
  CHECK(radii->second == doctest::Approx(2.0));

  const SpectrumDescription conj = analytic_spectrum(diagonal({Scalar(0, 1), Scalar(0, -1)}));
  CHECK(circle_intersects_all_components(conj, 1.0));
}

TEST_CASE("radial interval of an off-center annulus") {
  SpectrumComponent a{SpectrumComponent::Kind::annulus, Scalar(3.0), 1.0, 2.0};
  const auto [lo, hi] = radial_interval(a);
  CHECK(lo == doctest::Approx(1.0));
  CHECK(hi == doctest::Approx(5.0));
  SpectrumComponent centered{SpectrumComponent::Kind::annulus, Scalar(0.0), 1.0, 2.0};
  CHECK(radial_interval(centered).first == doctest::Approx(1.0));
}

TEST_CASE("mixing commutation") {
  gen::Rng rng(5);
  const OperatorSpec S = scaled(2.0, backward_shift(10));
  const auto tuple = gen::tuple(rng, 2, 10);
  CHECK(mixing_commutation_check(S, Eigen::MatrixXcd::Identity(2, 2), tuple, 3));
  Eigen::MatrixXcd A(2, 2);
  A << 1, 1, 0, 1;
  CHECK(mixing_commutation_check(S, A, tuple, 5));
  Eigen::MatrixXcd Z(2, 2);
  Z << 1, 1, 1, 1;
  CHECK(code_of([&] { (void)mixing_commutation_check(S, Z, tuple, 5); }) == Errc::singular);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t p = rng.index(1, 4);
    CHECK(mixing_commutation_check(S, gen::invertible(rng, p, true), gen::tuple(rng, p, 10, true),
                                   static_cast<int>(rng.index(0, 12))));
  }
}

TEST_CASE("property: apply agrees with the truncated matrix") {
  gen::Rng rng(9);
  for (int variant = 0; variant < 6; ++variant) {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t dim = rng.index(2, 16);
      const bool cplx = rng.coin();
      const OperatorSpec op = random_op(rng, variant, dim, cplx);
      const Vector v = gen::vector(rng, dim, 0.6, cplx);
      const Eigen::VectorXcd mv = truncated_matrix(op) * v.to_dense();
      const Eigen::VectorXcd av = apply(op, v).value.to_dense();
      CHECK((mv - av).norm() <= 1e-12 * std::max(1.0, mv.norm()));
    }
  }
}

TEST_CASE("property: linearity, scaling and blockwise direct sums") {
  gen::Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = rng.index(2, 16);
    const bool cplx = rng.coin();
    const OperatorSpec op = random_op(rng, static_cast<int>(rng.index(0, 5)), dim, cplx);
    const Vector u = gen::vector(rng, dim, 0.6, cplx);
    const Vector v = gen::vector(rng, dim, 0.6, cplx);
    const Scalar a = gen::scalar(rng, cplx);
    const Scalar b = gen::scalar(rng, cplx);
    const Eigen::VectorXcd lhs = apply(op, a * u + b * v).value.to_dense();
    const Eigen::VectorXcd rhs = (a * apply(op, u).value + b * apply(op, v).value).to_dense();
    CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, rhs.norm()));

    const Scalar c = gen::scalar(rng, cplx) + 0.5;
    CHECK(apply(scaled(c, op), u).value == c * apply(op, u).value);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const OperatorSpec A = random_op(rng, static_cast<int>(rng.index(0, 4)), rng.index(2, 8), false);
    const OperatorSpec B = random_op(rng, static_cast<int>(rng.index(0, 4)), rng.index(2, 8), false);
    const DirectSumVector x({gen::vector(rng, A.dim()), gen::vector(rng, B.dim())});
    const DirectSumVector y = apply(direct_sum({A, B}), x);
    CHECK(y.blocks()[0] == apply(A, x.blocks()[0]).value);
    CHECK(y.blocks()[1] == apply(B, x.blocks()[1]).value);
    const Vector flat = apply(direct_sum({A, B}), x.concatenated()).value;
    CHECK(flat == y.concatenated());
  }
}

TEST_CASE("direct sum dimension and json description") {
  const OperatorSpec op = direct_sum({diagonal({1.0, 2.0}), backward_shift(5)});
  CHECK(op.dim() == 7);
  CHECK(op.block_dims() == std::vector<std::size_t>{2, 5});
  const json j = to_json(op);
  CHECK(j["variant"] == "direct_sum");
  CHECK(to_json(analytic_spectrum(diagonal({1.0}))).is_array());
}
