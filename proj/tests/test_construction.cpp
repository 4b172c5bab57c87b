#include <doctest.h>

#include <cmath>
#include <numbers>

#include "grassdyn/construction.hpp"
#include "grassdyn/error.hpp"
#include "support.hpp"

using namespace grassdyn;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::config;
}

ConstructionParams make(IndexScheme scheme, int p, SourceKind source) {
  ConstructionParams params;
  params.p = p;
  params.scheme = scheme;
  params.source = source;
  return params;
}

// Independent evaluation of the control recursion in long double, scanning u upward.
std::vector<long> control_oracle(IndexScheme scheme, int p, std::size_t N, long double c) {
  auto b = [&](std::size_t n) -> long double {
    if (scheme == IndexScheme::pow5) return n == 0 ? 0.0L : std::pow(5.0L, static_cast<long double>(n));
    return n == 0 ? 1.0L : std::pow(static_cast<long double>(2 * p + 1), static_cast<long double>(n));
  };
  std::vector<long> u{0};
  for (std::size_t n = 1; n <= N; ++n) {
    const long prev = u.back();
    const long double bp = b(n - 1);
    const long double bn = b(n);
    auto ok = [&](long x) {
      const long double first = std::pow(4.0L, static_cast<long double>(std::max(x, prev))) *
                                (std::ldexp(static_cast<long double>(x), -static_cast<int>(std::min(bp, 100000.0L))) +
                                 static_cast<long double>(prev) * std::exp(-c * std::sqrt(bp)));
      const long double second =
          std::pow(4.0L, static_cast<long double>(x)) * static_cast<long double>(x) * std::exp(-c * std::sqrt(bn));
      return first <= 1.0L && second <= 0.5L;
    };
    long x = 0;
    while (ok(x + 1)) ++x;
    u.push_back(x);
  }
  return u;
}

// log of w_from * ... * w_to, in long double.
long double log_weights(std::size_t from, std::size_t to) {
  long double s = 0.0L;
  for (std::size_t i = from; i <= to; ++i) s += std::log(4.0L * (1.0L - 0.5L / std::sqrt(static_cast<long double>(i))));
  return s;
}

}  // namespace

TEST_CASE("weight examples") {
  CHECK(weight(1) == 2.0);
  CHECK(weight(4) == 3.0);
  CHECK(weight(1000000) == doctest::Approx(3.998).epsilon(1e-3));
  CHECK(code_of([] { (void)weight(0); }) == Errc::precondition);
  for (std::size_t n = 1; n < 5000; n += 7) {
    CHECK(weight(n) >= 2.0);
    CHECK(weight(n) < 4.0);
  }
}

TEST_CASE("index_b examples") {
  CHECK(index_b(1, IndexScheme::pow2p1, 2) == 5);
  CHECK(index_b(0, IndexScheme::pow2p1, 2) == 1);
  CHECK(index_b(0, IndexScheme::pow5, 2) == 0);
  CHECK(index_b(3, IndexScheme::pow5, 7) == 125);
  CHECK(index_b(2, IndexScheme::pow2p1, 3) == 49);
  CHECK(code_of([] { (void)index_b(28, IndexScheme::pow5, 2); }) == Errc::cap_exceeded);
  CHECK(log_index_b(27, IndexScheme::pow5, 2) == doctest::Approx(27 * std::log(5.0)));
  CHECK(std::isinf(log_index_b(0, IndexScheme::pow5, 2)));
}

TEST_CASE("derived control sequence against an independent scan") {
  const double c = default_bound_constant();
  CHECK(c == doctest::Approx(std::log(4.0 / 3.0)));
  struct Case {
    IndexScheme scheme;
    int p;
    std::size_t N;
  };
  for (const Case& k : {Case{IndexScheme::pow5, 2, 12}, Case{IndexScheme::pow2p1, 2, 10},
                        Case{IndexScheme::pow2p1, 3, 9}}) {
    const auto got = derive_control_sequence(k.scheme, k.p, k.N);
    const auto want = control_oracle(k.scheme, k.p, k.N, c);
    REQUIRE(got.size() == want.size());
    for (std::size_t n = 0; n < got.size(); ++n) CHECK(got[n] == want[n]);
  }
  const std::vector<std::int64_t> pow5_head{0, 0, 0, 1, 2, 4, 10};
  const auto pow5 = derive_control_sequence(IndexScheme::pow5, 2, 6);
  CHECK(pow5 == pow5_head);
  CHECK(derive_control_sequence(IndexScheme::pow2p1, 2, 6) == pow5_head);
  const std::vector<std::int64_t> p3_head{0, 0, 0, 2, 3, 9, 25};
  CHECK(derive_control_sequence(IndexScheme::pow2p1, 3, 6) == p3_head);
  CHECK(code_of([] { (void)derive_control_sequence(IndexScheme::pow5, 2, 0); }) == Errc::precondition);
  CHECK(code_of([] { (void)derive_control_sequence(IndexScheme::pow5, 2, 4, -1.0); }) == Errc::precondition);
}

TEST_CASE("derived control sequence is nondecreasing and grows") {
  const auto u = derive_control_sequence(IndexScheme::pow5, 2, 20);
  CHECK(u[1] >= 0);
  CHECK(u[3] >= 1);
  for (std::size_t n = 1; n < u.size(); ++n) CHECK(u[n] >= u[n - 1]);
  CHECK(u[20] > u[10]);
  ControlTable table(IndexScheme::pow5, 2, default_bound_constant());
  for (std::size_t n = 0; n <= 20; ++n) CHECK(table.at(n) == u[n]);
}

TEST_CASE("controlled_by examples") {
  const AdmissibleSequence zero(make(IndexScheme::pow5, 2, SourceKind::zero));
  CHECK(controlled_by(zero, std::vector<std::int64_t>(10, 1), 9));

  ConstructionParams cubic = make(IndexScheme::pow2p1, 2, SourceKind::explicit_list);
  cubic.explicit_polys[1] = Polynomial::monomial(3);
  CHECK_FALSE(controlled_by(AdmissibleSequence(cubic), {0, 3}, 1));
  CHECK(controlled_by(AdmissibleSequence(cubic), {0, 4}, 1));

  const AdmissibleSequence inter(make(IndexScheme::pow5, 2, SourceKind::interleaved));
  CHECK(controlled_by(inter, derive_control_sequence(IndexScheme::pow5, 2, 50), 50));
  const AdmissibleSequence classic(make(IndexScheme::pow5, 2, SourceKind::classic));
  CHECK(controlled_by(classic, derive_control_sequence(IndexScheme::pow5, 2, 12), 12));
}

TEST_CASE("classic enumeration head and locator") {
  const Construction c(make(IndexScheme::pow5, 2, SourceKind::classic));
  CHECK(c.P(0).is_zero());
  CHECK(c.P(1).is_zero());
  CHECK(c.P(2).is_zero());
  CHECK(c.P(3) == Polynomial{-1});
  CHECK(c.P(4) == Polynomial{1});
  CHECK(c.P(5) == (Polynomial{-2, -2}));
  const Polynomial target{1, Rational(1, 2)};
  const std::size_t n = c.sequence().locate(target);
  CHECK(c.P(n) == target);
  CHECK(c.sequence().locate(Polynomial{}) == 0);
}

TEST_CASE("height alphabet") {
  const auto a = height_alphabet(1);
  CHECK(a == std::vector<Rational>{-1, 0, 1});
  const auto b = height_alphabet(2);
  CHECK(b.size() == 7);  // -2, -1, -1/2, 0, 1/2, 1, 2
  CHECK(std::is_sorted(b.begin(), b.end()));
}

TEST_CASE("epsilon_n against a log-domain product") {
  for (IndexScheme scheme : {IndexScheme::pow5, IndexScheme::pow2p1}) {
    const ConstructionParams params = make(scheme, 2, SourceKind::classic);
    auto c = std::make_shared<const Construction>(params);
    Engine<Real2048> e(c, 700);
    for (std::size_t n = 1; n <= 5; ++n) {
      const std::size_t lo = static_cast<std::size_t>(c->b(n - 1)) + 1;
      const std::size_t hi = static_cast<std::size_t>(c->b(n)) - 1;
      const long double oracle = -log_weights(lo, hi);
      const Real2048 eps = e.epsilon(n);
      CHECK(eps <= Real2048(1));
      CHECK(eps > Real2048(0));
      const double got = static_cast<double>(log(eps));
      CHECK(std::abs(got - static_cast<double>(oracle)) <= 1e-12 * std::max(1.0, std::abs(got)));
    }
  }
  CHECK(code_of([] { (void)epsilon_f(make(IndexScheme::pow5, 2, SourceKind::zero), 0); }) == Errc::precondition);
}

TEST_CASE("epsilon_f collapses for zero polynomials") {
  const EpsilonF z = epsilon_f(make(IndexScheme::pow5, 2, SourceKind::zero), 3);
  CHECK(z.f.is_zero());
  CHECK(z.epsilon > 0.0);
  CHECK(z.epsilon <= 1.0);
  const EpsilonF one = epsilon_f(make(IndexScheme::pow2p1, 2, SourceKind::zero), 1);
  const double eps1 = 1.0 / ((4 - std::sqrt(2.0)) * (4 - 2 / std::sqrt(3.0)) * 3.0);
  CHECK(rel_diff(one.epsilon, eps1) < 1e-14);
}

TEST_CASE("f_3 and f_4 of the classic pow5 sequence against a hand expansion") {
  // P_3 = -1 and P_4 = 1, so f_3 = -eps_3 e_0 and, with W(x) = w_126 ... w_x,
  // f_4 = eps_4 (2 e_0 - e_125 + W(250) e_250 - W(375) e_375 + W(500) e_500).
  auto c = std::make_shared<const Construction>(make(IndexScheme::pow5, 2, SourceKind::classic));
  Engine<Real512> e(c, 700);
  const auto f3 = e.f(3);
  REQUIRE(f3.size() == 1);
  CHECK(f3.begin()->first == 0);
  CHECK(static_cast<double>(f3.begin()->second / -e.epsilon(3)) == doctest::Approx(1.0).epsilon(1e-15));

  const long double log_eps4 = -log_weights(126, 624);
  struct Term {
    std::size_t index;
    int sign;
    long double log_mag;
  };
  const std::vector<Term> oracle{{0, 1, std::log(2.0L) + log_eps4},
                                 {125, -1, log_eps4},
                                 {250, 1, log_weights(126, 250) + log_eps4},
                                 {375, -1, log_weights(126, 375) + log_eps4},
                                 {500, 1, log_weights(126, 500) + log_eps4}};
  const auto f4 = e.f(4);
  REQUIRE(f4.size() == oracle.size());
  for (const Term& t : oracle) {
    REQUIRE(f4.count(t.index) == 1);
    const Real512 v = f4.at(t.index);
    CHECK((v > 0 ? 1 : -1) == t.sign);
    const double lg = static_cast<double>(log(abs(v)));
    CHECK(std::abs(lg - static_cast<double>(t.log_mag)) <= 1e-12 * std::abs(lg));
  }
}

TEST_CASE("build_operator with zero polynomials is the weighted shift with eps columns") {
  for (IndexScheme scheme : {IndexScheme::pow5, IndexScheme::pow2p1}) {
    const ConstructionParams params = make(scheme, 2, SourceKind::zero);
    const std::size_t N = 40;
    const Eigen::MatrixXcd M = truncated_matrix(build_operator(params, N));
    const Construction c(params);
    for (std::size_t j = 0; j + 1 < N; ++j) {
      std::optional<std::size_t> special;
      for (std::size_t n = 0; n < 4; ++n) {
        if (c.b(n) >= 1 && c.b(n) - 1 == j) special = n;
      }
      double expected = weight(j + 1);
      if (special) expected = *special == 0 ? 1.0 : epsilon_f(params, *special).epsilon;
      for (std::size_t i = 0; i < N; ++i) {
        const double want = i == j + 1 ? expected : 0.0;
        CHECK(std::abs(M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - want) <= 1e-14 * std::max(1.0, want));
      }
    }
  }
}

TEST_CASE("non-ambiguity violations are rejected") {
  ConstructionParams params = make(IndexScheme::pow5, 2, SourceKind::explicit_list);
  params.explicit_polys[1] = Polynomial::monomial(4);
  CHECK(code_of([&] { (void)build_operator(params, 20); }) == Errc::non_ambiguity);
  params.explicit_polys[1] = Polynomial::monomial(2);  // 3 deg >= b_1
  CHECK(code_of([&] { (void)build_operator(params, 20); }) == Errc::non_ambiguity);
}

TEST_CASE("orbit coordinates: triangularity and the defining relation") {
  for (const auto& params : {make(IndexScheme::pow5, 2, SourceKind::classic), make(IndexScheme::pow5, 3, SourceKind::interleaved),
                             make(IndexScheme::pow2p1, 2, SourceKind::classic)}) {
    auto c = std::make_shared<const Construction>(params);
    Engine<Real256> e(c, 700);
    CHECK(e.orbit(0) == Engine<Real256>::Sparse{{0, Real256(1)}});
    for (std::size_t i = 0; i <= 200; ++i) {
      const auto x = e.orbit(i);
      REQUIRE_FALSE(x.empty());
      CHECK(x.rbegin()->first == i);
    }
    for (std::size_t n = 0; c->b(n) <= 625; ++n) {
      const auto bn = static_cast<std::size_t>(c->b(n));
      auto lhs = e.orbit(bn);
      for (const auto& [j, v] : e.poly_applied(c->P(n))) lhs[j] -= v;
      Real256 err = 0;
      for (const auto& [j, v] : lhs) err += abs(j == bn ? v - 1 : v);
      CHECK(static_cast<double>(err) < 1e-60);
    }
  }
  const Vector o = orbit_vector_coords(make(IndexScheme::pow5, 2, SourceKind::classic), 125);
  CHECK(o.dim() == 126);
  CHECK(o[0] == Scalar(-1.0));
  CHECK(o[125] == Scalar(1.0));
  CHECK(o.support_size() == 2);
}

TEST_CASE("iterating the built operator reproduces the defining relation") {
  for (const auto& params : {make(IndexScheme::pow5, 2, SourceKind::classic), make(IndexScheme::pow5, 2, SourceKind::interleaved),
                             make(IndexScheme::pow5, 3, SourceKind::interleaved), make(IndexScheme::pow2p1, 2, SourceKind::classic)}) {
    auto c = std::make_shared<const Construction>(params);
    for (std::size_t n = 0; c->b(n) <= 700; ++n) {
      const ClosureCheck r = check_defining_relation(c, n);
      CHECK(r.pass);
      CHECK(r.relative_error <= 1e-8);
    }
    // double-precision oracle: apply the truncated operator b_2 times
    const auto b2 = static_cast<std::size_t>(c->b(2));
    const OperatorSpec T = build_operator(params, b2 + 1);
    Vector x = Vector::basis(b2 + 1, 0);
    for (std::size_t t = 0; t < b2; ++t) x = apply(T, x).value;
    const Vector want = orbit_vector_coords(params, b2);
    Vector padded(b2 + 1);
    for (const auto& [j, v] : want.coords()) padded.set(j, v);
    CHECK(l2_norm(x - padded) <= 1e-8 * l2_norm(padded));
  }
}

TEST_CASE("f_n bounds") {
  const FBound z = check_f_bound(make(IndexScheme::pow5, 2, SourceKind::zero), 2);
  CHECK(z.lhs == 0.0);
  CHECK(z.pass);
  for (const auto& params : {make(IndexScheme::pow5, 2, SourceKind::interleaved), make(IndexScheme::pow5, 2, SourceKind::classic),
                             make(IndexScheme::pow2p1, 2, SourceKind::classic), make(IndexScheme::pow5, 3, SourceKind::interleaved)}) {
    auto c = std::make_shared<const Construction>(params);
    const auto cap = static_cast<std::size_t>(c->b(5)) + 1;
    Engine<Real256> lo(c, cap);
    Engine<Real512> hi(c, cap);
    for (std::size_t n = 1; n <= 5; ++n) {
      const FBound a = check_f_bound(lo, n);
      const FBound b = check_f_bound(hi, n);
      CHECK(a.pass);
      CHECK(a.lhs <= 1.0);
      CHECK(a.lhs <= a.rhs);
      CHECK(a.pass == b.pass);
      CHECK(rel_diff(a.lhs, b.lhs) < 1e-30 + 1e-15 * a.lhs);
    }
  }
  ConstructionParams big = make(IndexScheme::pow5, 2, SourceKind::explicit_list);
  big.explicit_polys[1] = Polynomial{1000};
  CHECK(check_f_bound(big, 1).lhs > 1.0);
  CHECK(code_of([&] { (void)check_f_bound(big, 2); }) == Errc::hypothesis);
}

TEST_CASE("interleaved enumeration: zero prefixes, caps and triangle indexing") {
  auto control = std::make_shared<const ControlTable>(IndexScheme::pow5, 2, default_bound_constant());
  const InterleavedEnumeration en(control);
  for (std::size_t n = 0; n <= 5; ++n) {
    const PolyTuple t = en.S(0, n);
    CHECK(t.size() == 1);
    CHECK(t[0].is_zero());
  }
  for (std::size_t i = 0; i <= 3; ++i) {
    for (std::size_t n = 0; n <= 200; ++n) {
      const PolyTuple t = en.S(i, n);
      REQUIRE(t.size() == i + 1);
      const std::int64_t u = control->at(n);
      for (const Polynomial& P : t) {
        if (n <= index_b(i + 1, IndexScheme::pow5, 2)) CHECK(P.is_zero());
        if (P.is_zero()) continue;
        CHECK(P.degree() < u);
        CHECK(P.l1() <= Rational(static_cast<long>(u)));
        CHECK(3 * static_cast<std::uint64_t>(P.degree()) < index_b_saturated(n, IndexScheme::pow5, 2));
      }
    }
  }

  using QC = std::pair<std::size_t, std::size_t>;
  CHECK(InterleavedEnumeration::q_coordinates(0) == QC{0, 0});
  CHECK(InterleavedEnumeration::q_coordinates(1) == QC{0, 1});
  CHECK(InterleavedEnumeration::q_coordinates(2) == QC{1, 0});
  CHECK(InterleavedEnumeration::q_coordinates(3) == QC{0, 2});
  CHECK(InterleavedEnumeration::q_coordinates(4) == QC{1, 1});
  CHECK(InterleavedEnumeration::q_coordinates(5) == QC{2, 0});
  for (std::size_t N = 0; N < 5000; ++N) {
    // triangle-block formula: N in [j(j+1)/2, (j+1)(j+2)/2) gives (N - j(j+1)/2, j(j+3)/2 - N)
    std::size_t j = 0;
    while ((j + 1) * (j + 2) / 2 <= N) ++j;
    const QC want{N - j * (j + 1) / 2, j * (j + 3) / 2 - N};
    const QC got = InterleavedEnumeration::q_coordinates(N);
    CHECK(got == want);
    CHECK(InterleavedEnumeration::q_index(got.first, got.second) == N);
  }
  CHECK(en.Q(21) == en.S(0, 6));
}

TEST_CASE("interleaved enumeration: locators and repetition blocks") {
  auto control = std::make_shared<const ControlTable>(IndexScheme::pow5, 2, default_bound_constant());
  const InterleavedEnumeration en(control);
  const Polynomial P{1, Rational(1, 2)};
  const std::size_t n = en.locate(P, 0);
  CHECK(en.S(0, n) == PolyTuple{P});
  for (std::size_t i = 0; i <= 2; ++i) {
    const std::size_t r = en.locate_repetition(P, i);
    const PolyTuple t = en.S(i, r);
    for (const Polynomial& Q : t) CHECK(Q == Rational(static_cast<long>(i + 1)) * P);
  }
  CHECK(code_of([&] { (void)en.locate(Polynomial{}, 0); }) == Errc::precondition);

  CHECK(en.admissible(2, 0).is_zero());
  CHECK(en.admissible(3, 2).is_zero());
  CHECK(en.admissible(2, 21) == Polynomial{-1});
  CHECK(en.admissible(2, 28) == Polynomial{-1});
  CHECK(code_of([&] { (void)en.admissible(1, 3); }) == Errc::precondition);

  for (int p : {2, 3, 4}) {
    const AdmissibleSequence seq(make(IndexScheme::pow5, p, SourceKind::interleaved));
    const std::size_t N = seq.locate(P);
    CHECK(seq.at(N) == P);
    CHECK(seq.at(0).is_zero());
  }
}

TEST_CASE("claim: low indices vanish for every p") {
  for (int p = 2; p <= 16; ++p) CHECK(verify_claim(p));
  CHECK(code_of([] { (void)verify_claim(1); }) == Errc::precondition);
}

TEST_CASE("direct sum of perturbed shifts") {
  const DirectSumBuild one = build_direct_sum(2, 40);
  CHECK(one.vector.blocks().size() == 1);
  CHECK(one.vector.blocks()[0] == Vector::basis(40, 0, 0.5));
  CHECK(code_of([] { (void)build_direct_sum(1, 40); }) == Errc::precondition);

  const DirectSumBuild three = build_direct_sum(3, 150);
  CHECK(three.op.block_dims() == std::vector<std::size_t>{150, 150});
  CHECK(operator_norm_estimate(three.op, 60) <= 6.0);
  const DirectSumVector y = apply(three.op, three.vector);
  for (int p = 2; p <= 3; ++p) {
    ConstructionParams params;
    params.p = p;
    params.scheme = IndexScheme::pow5;
    const Vector block = apply(build_operator(params, 150), Vector::basis(150, 0, 1.0 / p)).value;
    CHECK(y.blocks()[static_cast<std::size_t>(p - 2)] == block);
  }
}

TEST_CASE("repetition blocks: scaled iterates approach P(T) of the candidate vector") {
  // With P_n = lambda P, (1/lambda) T^{b_n} (+ e_0/p) - P(T)(+ e_0/p) = (+ e_{b_n}/p) / lambda,
  // whose norm is sqrt(sum 1/p^2) / lambda.
  const Polynomial P{1, Rational(1, 2)};
  std::vector<std::shared_ptr<const Construction>> blocks;
  for (int p = 2; p <= 3; ++p) {
    ConstructionParams params = make(IndexScheme::pow5, p, SourceKind::explicit_list);
    params.explicit_polys[3] = Rational(2) * P;
    params.explicit_polys[4] = Rational(3) * P;
    blocks.push_back(std::make_shared<const Construction>(params));
  }
  const double scale = std::sqrt(1.0 / 4 + 1.0 / 9);
  const double e3 = repetition_error(blocks, 3, 2, P);
  const double e4 = repetition_error(blocks, 4, 3, P);
  CHECK(rel_diff(e3, scale / 2) < 1e-12);
  CHECK(rel_diff(e4, scale / 3) < 1e-12);
  CHECK(e4 < e3);
}

TEST_CASE("construction params JSON round trip") {
  ConstructionParams params = make(IndexScheme::pow2p1, 3, SourceKind::explicit_list);
  params.explicit_polys[2] = Polynomial{1, Rational(-1, 3)};
  params.explicit_control = {0, 1, 2};
  const ConstructionParams back = construction_params_from_json(to_json(params));
  CHECK(back.p == 3);
  CHECK(back.scheme == IndexScheme::pow2p1);
  CHECK(back.source == SourceKind::explicit_list);
  CHECK(back.explicit_polys.at(2) == params.explicit_polys.at(2));
  CHECK(back.explicit_control == params.explicit_control);
  CHECK(scheme_from_string(to_string(IndexScheme::pow5)) == IndexScheme::pow5);
  CHECK(source_from_string("interleaved") == SourceKind::interleaved);
  CHECK_THROWS_AS((void)source_from_string("nonsense"), Error);
}

TEST_CASE("decimal rendering") {
  CHECK(decimal(Real256(1) / 3, 5) == "3.3333e-01");
}
