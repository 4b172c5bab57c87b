#include "grassdyn/functionals.hpp"

#include <algorithm>

#include "grassdyn/error.hpp"

namespace grassdyn {

std::size_t window_offset(IndexScheme scheme, int p) {
  if (scheme == IndexScheme::pow2p1) return 1;
  const auto two_p = static_cast<std::uint64_t>(2 * p);
  std::size_t m = 1;
  while (!(index_b(m - 1, scheme, p) < two_p && two_p < index_b(m, scheme, p))) ++m;
  return m;
}

FunctionalTable::FunctionalTable(ConstructionParams params, std::size_t delta)
    : c_(std::make_shared<const Construction>(std::move(params))), delta_(delta) {
  init();
}

FunctionalTable::FunctionalTable(std::shared_ptr<const Construction> c, std::size_t delta)
    : c_(std::move(c)), delta_(delta) {
  init();
}

void FunctionalTable::init() {
  const int p = c_->params().p;
  if (delta_ >= static_cast<std::size_t>(2 * p)) {
    throw Error(Errc::precondition, "delta must satisfy 0 <= delta < 2p = " + std::to_string(2 * p));
  }
  m_ = window_offset(c_->params().scheme, p);
  window_end_ = c_->b(m_) - 1;
}

void FunctionalTable::ensure(std::size_t i) const {
  std::lock_guard lock(mu_);
  if (memo_.size() > i) return;
  memo_.reserve(i + 1);
  depth_.reserve(i + 1);
  while (memo_.size() <= i) {
    const std::size_t t = memo_.size();
    Rational v = 0;
    std::size_t depth = 0;
    if (t <= window_end_) {
      v = (t == delta_) ? 1 : 0;
    } else {
      const std::size_t n = *c_->block_of(t);
      const std::uint64_t bn = c_->b(n);
      const bool lower = 2 * static_cast<std::uint64_t>(t) < 3 * bn;
      const bool upper = 4 * bn <= 2 * static_cast<std::uint64_t>(t) && 2 * static_cast<std::uint64_t>(t) < 5 * bn;
      if (lower || upper) {
        const Polynomial P = c_->P(n);
        for (std::size_t j = 0; j < P.coeffs().size(); ++j) {
          const std::size_t idx = t - bn + j;
          if (idx >= t) throw Error(Errc::non_ambiguity, "phi recursion does not descend at i = " + std::to_string(t));
          if (P.coeffs()[j] == 0) continue;
          v += P.coeffs()[j] * memo_[idx];
          depth = std::max(depth, depth_[idx] + 1);
        }
      }
    }
    v.canonicalize();
    memo_.push_back(std::move(v));
    depth_.push_back(depth);
    max_depth_ = std::max(max_depth_, depth);
  }
}

Rational FunctionalTable::value(std::size_t i) const {
  ensure(i);
  std::lock_guard lock(mu_);
  return memo_[i];
}

Rational phi_value(const FunctionalTable& t, std::size_t i) { return t.value(i); }

Rational phi_on_polynomial(const FunctionalTable& t, const Polynomial& P) {
  if (P.is_zero()) return 0;
  t.ensure(static_cast<std::size_t>(P.degree()));
  Rational s = 0;
  for (std::size_t i = 0; i < P.coeffs().size(); ++i) {
    if (P.coeffs()[i] != 0) s += P.coeffs()[i] * t.value_unchecked(i);
  }
  return s;
}

Polynomial model_product(const Polynomial& P, const Polynomial& Q) { return P * Q; }

bool phi_kronecker_check(const ConstructionParams& params) {
  auto c = std::make_shared<const Construction>(params);
  const std::size_t m = window_offset(params.scheme, params.p);
  for (std::size_t n = 0; n < m; ++n) {
    if (!c->P(n).is_zero()) return false;
  }
  for (std::size_t d = 0; d < static_cast<std::size_t>(2 * params.p); ++d) {
    FunctionalTable t(c, d);
    for (std::size_t i = 0; i <= t.window_end(); ++i) {
      if (t.value(i) != (i == d ? 1 : 0)) return false;
    }
  }
  return true;
}

Polynomial y_polynomial(const Construction& c, std::size_t k, std::size_t u, std::size_t l, std::size_t v) {
  const Polynomial a = Polynomial::monomial(static_cast<std::size_t>(c.b(k))) - c.P(k);
  const Polynomial b = Polynomial::monomial(static_cast<std::size_t>(c.b(l))) - c.P(l);
  return (a * b).shifted(u + v);
}

Rational y_value(const FunctionalTable& t, std::size_t k, std::size_t u, std::size_t l, std::size_t v) {
  const Construction& c = t.construction();
  if (k > l) throw Error(Errc::precondition, "y_value: requires k <= l");
  if (u >= c.b(k + 1) - c.b(k)) throw Error(Errc::precondition, "y_value: requires u < b_{k+1} - b_k");
  if (v >= c.b(l + 1) - c.b(l)) throw Error(Errc::precondition, "y_value: requires v < b_{l+1} - b_l");
  return phi_on_polynomial(t, y_polynomial(c, k, u, l, v));
}

Rational m_l_bound(const Construction& c, std::size_t l) {
  Rational mx = 1;
  for (std::size_t j = 0; j <= l; ++j) {
    const Rational a = 1 + c.P(j).l1();
    mx = std::max(mx, Rational(a * a));
  }
  Rational prod = 1;
  for (std::size_t j = 1; j <= l + 1; ++j) {
    const Rational a = std::max(Rational(1), c.P(j).l1());
    prod *= a * a;
  }
  return mx * prod;
}

Rational m_l_bound(const ConstructionParams& params, std::size_t l) { return m_l_bound(Construction(params), l); }

namespace {

struct Piece {
  std::size_t k = 0;
  std::size_t u = 0;
  Polynomial P;  // P_k, zero for the leading e_0 of pow2p1
  std::uint64_t bk = 0;
  bool plain = false;  // e_r = T^r e_0 exactly
};

// sum_j a_j Phi(shift + j)
Rational shifted_phi(const FunctionalTable& t, const Polynomial& P, std::size_t shift) {
  Rational s = 0;
  for (std::size_t j = 0; j < P.coeffs().size(); ++j) {
    if (P.coeffs()[j] != 0) s += P.coeffs()[j] * t.value_unchecked(shift + j);
  }
  return s;
}

Real256 row_sum(const FunctionalTable& t, const std::vector<Piece>& pc, const std::vector<Real256>& W, std::size_t r,
                std::size_t R) {
  Real256 acc = 0;
  const Piece& a = pc[r];
  for (std::size_t q = 0; q <= R; ++q) {
    const Piece& b = pc[q];
    // E_r E_q = X^{r+q} - P_k X^{q+u} - P_l X^{r+v} + P_k P_l X^{u+v}
    Rational y = t.value_unchecked(r + q);
    if (!a.plain && !a.P.is_zero()) y -= shifted_phi(t, a.P, q + a.u);
    if (!b.plain && !b.P.is_zero()) y -= shifted_phi(t, b.P, r + b.u);
    if (!a.plain && !b.plain && !a.P.is_zero() && !b.P.is_zero()) {
      y += shifted_phi(t, a.P * b.P, a.u + b.u);
    }
    if (y == 0) continue;
    const Rational ay = abs(y);
    const Real256 yr = Real256(ay.get_num().get_str()) / Real256(ay.get_den().get_str());
    acc += yr / (W[r] * W[q]);
  }
  return acc;
}

}  // namespace

SummabilityResult summability_partial(const FunctionalTable& t, std::size_t R, Exec exec, std::size_t cap) {
  const Construction& c = t.construction();
  if (2 * R >= cap) {
    throw Error(Errc::cap_exceeded, "summability: 2R = " + std::to_string(2 * R) + " exceeds cap " + std::to_string(cap));
  }
  std::vector<Piece> pc(R + 1);
  std::vector<Real256> W(R + 1);
  int maxdeg = 0;
  for (std::size_t r = 0; r <= R; ++r) {
    Piece& x = pc[r];
    const auto blk = c.block_of(r);
    if (!blk) {
      x.plain = true;
      W[r] = 1;
      continue;
    }
    x.k = *blk;
    x.bk = c.b(x.k);
    x.u = r - static_cast<std::size_t>(x.bk);
    x.P = c.P(x.k);
    maxdeg = std::max(maxdeg, x.P.degree());
    W[r] = x.u == 0 ? Real256(1) : W[r - 1] * Engine<Real256>::weight(r);
  }
  t.ensure(2 * R + 2 * static_cast<std::size_t>(std::max(maxdeg, 0)) + 1);

  std::vector<Real256> rows(R + 1);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t r = 0; r <= static_cast<std::ptrdiff_t>(R); ++r) {
      rows[static_cast<std::size_t>(r)] = row_sum(t, pc, W, static_cast<std::size_t>(r), R);
    }
  } else {
    for (std::size_t r = 0; r <= R; ++r) rows[r] = row_sum(t, pc, W, r, R);
  }
  SummabilityResult out;
  out.R = R;
  Real256 total = 0;
  out.row_sums.reserve(R + 1);
  for (const auto& x : rows) {
    total += x;
    out.row_sums.push_back(static_cast<double>(x));
  }
  out.value = static_cast<double>(total);
  out.value_text = decimal(total, 30);
  return out;
}

VanishingResult vanishing_exhaustive(const FunctionalTable& t, std::size_t l_max, std::size_t l_min) {
  const Construction& c = t.construction();
  VanishingResult out;
  for (std::size_t l = l_min; l <= l_max; ++l) {
    const std::uint64_t bl = c.b(l);
    for (std::size_t k = 0; k <= l; ++k) {
      const std::uint64_t ku = c.b(k + 1) - c.b(k);
      const std::uint64_t lv = c.b(l + 1) - bl;
      for (std::uint64_t u = 0; u < ku && 6 * u < bl; ++u) {
        for (std::uint64_t v = 0; v < lv && 6 * (u + v) < bl; ++v) {
          ++out.checked;
          Rational y = y_value(t, k, u, l, v);
          if (y != 0 && out.pass) {
            out.pass = false;
            out.k = k;
            out.u = u;
            out.l = l;
            out.v = v;
            out.y = y;
          }
        }
      }
    }
  }
  return out;
}

CriterionReport criterion_report(const ConstructionParams& params, std::size_t R, std::size_t window,
                                 double tail_threshold) {
  if (params.p < 2) throw Error(Errc::precondition, "criterion_report: p must be >= 2");
  if (window > R) throw Error(Errc::precondition, "criterion_report: window exceeds R");
  CriterionReport rep;
  rep.params = params;
  rep.R = R;
  rep.window = window;
  rep.tail_threshold = tail_threshold;
  auto c = std::make_shared<const Construction>(params);
  const std::size_t m = window_offset(params.scheme, params.p);
  rep.protected_prefix_pass = true;
  for (std::size_t n = 0; n < m; ++n) {
    if (!c->P(n).is_zero()) rep.protected_prefix_pass = false;
  }
  const auto nd = static_cast<std::size_t>(2 * params.p);
  std::vector<std::unique_ptr<FunctionalTable>> tables;
  std::vector<bool> kron(nd);
  std::vector<double> tails(nd);
  rep.vanishing_pass = true;
  for (std::size_t d = 0; d < nd; ++d) {
    tables.push_back(std::make_unique<FunctionalTable>(c, d));
    const FunctionalTable& t = *tables.back();
    bool ok = true;
    for (std::size_t i = 0; i <= t.window_end(); ++i) ok = ok && t.value(i) == (i == d ? 1 : 0);
    kron[d] = ok;
    if (!vanishing_exhaustive(t, std::max<std::size_t>(3, m), m).pass) rep.vanishing_pass = false;
    const double full = summability_partial(t, R).value;
    const double part = summability_partial(t, R - window).value;
    tails[d] = full - part;
  }
  rep.valid = rep.protected_prefix_pass && rep.vanishing_pass;
  for (int h = 2; h <= params.p; ++h) {
    CriterionEntry e;
    e.h = h;
    e.kronecker_pass = true;
    for (std::size_t d = 0; d < static_cast<std::size_t>(2 * h); ++d) {
      e.kronecker_pass = e.kronecker_pass && kron[d];
      e.summability_tail = std::max(e.summability_tail, tails[d]);
    }
    e.summability_pass = e.summability_tail < tail_threshold;
    const bool ok = e.kronecker_pass && e.summability_pass && rep.protected_prefix_pass && rep.vanishing_pass;
    e.verdict = ok ? "criterion hypotheses verified at desk scale for h = " + std::to_string(h)
                   : "criterion hypotheses not verified for h = " + std::to_string(h);
    const auto hh = static_cast<std::size_t>(h);
    for (std::size_t i = 0; i < hh; ++i) {
      for (std::size_t j = 0; j < hh; ++j) {
        for (std::size_t pw : {i, hh + j}) {
          const Rational a = tables[i]->value(pw);
          const Rational b = tables[hh + j]->value(pw);
          e.spots.push_back({"Psi", i, j, pw, a + b});
          e.spots.push_back({"Psi~", i, j, pw, a + 2 * b});
        }
      }
    }
    rep.valid = rep.valid && ok;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

json to_json(const CriterionReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    json spots = json::array();
    for (const auto& s : e.spots) {
      spots.push_back({{"form", s.form}, {"i", s.i}, {"j", s.j}, {"power", s.power}, {"value", to_string(s.value)}});
    }
    entries.push_back({{"h", e.h},
                       {"kronecker_pass", e.kronecker_pass},
                       {"summability_tail", e.summability_tail},
                       {"summability_pass", e.summability_pass},
                       {"verdict", e.verdict},
                       {"psi_spots", spots}});
  }
  return {{"params", to_json(r.params)},
          {"R", r.R},
          {"window", r.window},
          {"tail_threshold", r.tail_threshold},
          {"protected_prefix_pass", r.protected_prefix_pass},
          {"vanishing_pass", r.vanishing_pass},
          {"valid", r.valid},
          {"entries", entries}};
}

}  // namespace grassdyn
