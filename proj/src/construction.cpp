#include "grassdyn/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "grassdyn/error.hpp"

namespace grassdyn {

namespace {

template <class Real>
Real to_real(const Rational& q) {
  if (q.get_den() == 1 && q.get_num().fits_slong_p()) return Real(q.get_num().get_si());
  return Real(q.get_num().get_str()) / Real(q.get_den().get_str());
}

template <class Real>
void axpy(std::map<std::size_t, Real>& y, const Real& a, const std::map<std::size_t, Real>& x) {
  for (const auto& [i, v] : x) {
    auto it = y.find(i);
    if (it == y.end()) {
      Real t = a * v;
      if (t != 0) y.emplace(i, std::move(t));
    } else {
      it->second += a * v;
      if (it->second == 0) y.erase(it);
    }
  }
}

template <class Real>
void add_at(std::map<std::size_t, Real>& y, std::size_t i, const Real& v) {
  if (v == 0) return;
  auto it = y.find(i);
  if (it == y.end()) {
    y.emplace(i, v);
  } else {
    it->second += v;
    if (it->second == 0) y.erase(it);
  }
}

}  // namespace

template <class Real>
std::string decimal(const Real& x, int digits) {
  return x.str(std::max(digits - 1, 0), std::ios_base::scientific);
}

template std::string decimal<Real256>(const Real256&, int);
template std::string decimal<Real512>(const Real512&, int);
template std::string decimal<Real2048>(const Real2048&, int);

Construction::Construction(ConstructionParams params) : params_(std::move(params)), seq_(params_) {
  if (params_.p < 2) throw Error(Errc::precondition, "construction: p must be >= 2");
}

std::optional<std::size_t> Construction::block_of(std::uint64_t i) const {
  if (i < b(0)) return std::nullopt;
  std::size_t n = 0;
  while (index_b_saturated(n + 1, params_.scheme, params_.p) <= i) ++n;
  return n;
}

void Construction::validate_upto(std::uint64_t limit) const {
  for (std::size_t n = 0;; ++n) {
    const std::uint64_t bn = index_b_saturated(n, params_.scheme, params_.p);
    if (bn > limit) break;
    const Polynomial P = seq_.at(n);
    if (P.is_zero()) continue;
    const auto d = static_cast<std::int64_t>(P.degree());
    const auto bi = static_cast<std::int64_t>(bn);
    if (d >= bi - 1) {
      throw Error(Errc::non_ambiguity, "non-ambiguity condition violated: deg P_" + std::to_string(n) + " = " +
                                           std::to_string(d) + " >= b_n - 1 = " + std::to_string(bi - 1));
    }
    if (3 * d >= bi) {
      throw Error(Errc::non_ambiguity, "degree condition violated: deg P_" + std::to_string(n) + " = " +
                                           std::to_string(d) + " is not < b_n / 3");
    }
  }
}

template <class Real>
Engine<Real>::Engine(std::shared_ptr<const Construction> c, std::size_t cap) : c_(std::move(c)), cap_(cap) {}

template <class Real>
Real Engine<Real>::weight(std::size_t i) {
  if (i == 0) throw Error(Errc::precondition, "weight: index must be >= 1");
  return Real(4) - Real(2) / sqrt(Real(static_cast<unsigned long long>(i)));
}

template <class Real>
Real Engine<Real>::weight_product(std::size_t from, std::size_t to) {
  Real r = 1;
  for (std::size_t m = from; m <= to; ++m) r *= weight(m);
  return r;
}

template <class Real>
void Engine<Real>::fill_to(std::size_t i) const {
  if (i >= cap_) {
    throw Error(Errc::truncation, "truncation insufficient: T^" + std::to_string(i) + " e_0 needs memo cap > " +
                                      std::to_string(i) + " (cap " + std::to_string(cap_) + ")");
  }
  const Construction& c = *c_;
  while (memo_.size() <= i) {
    const std::size_t t = memo_.size();
    Sparse r;
    const auto blk = c.block_of(t);
    if (!blk) {
      r.emplace(t, Real(1));
    } else {
      const std::size_t n = *blk;
      const std::uint64_t bn = c.b(n);
      const Polynomial P = c.P(n);
      for (std::size_t j = 0; j < P.coeffs().size(); ++j) {
        if (P.coeffs()[j] == 0) continue;
        const std::size_t idx = t - bn + j;
        if (idx >= t) throw Error(Errc::non_ambiguity, "non-ambiguity condition violated at n = " + std::to_string(n));
        axpy(r, to_real<Real>(P.coeffs()[j]), memo_[idx]);
      }
      Real w = 1;
      if (t > bn) {
        // coefficient of e_{t-1} in T^{t-1} e_0 from the same block, times w_t
        w = memo_[t - 1].rbegin()->second * weight(t);
      }
      add_at(r, t, w);
    }
    memo_.push_back(std::move(r));
  }
}

template <class Real>
typename Engine<Real>::Sparse Engine<Real>::orbit(std::size_t i) const {
  std::lock_guard lock(mu_);
  fill_to(i);
  return memo_[i];
}

template <class Real>
typename Engine<Real>::Sparse Engine<Real>::poly_applied(const Polynomial& P) const {
  Sparse r;
  if (P.is_zero()) return r;
  std::lock_guard lock(mu_);
  fill_to(static_cast<std::size_t>(P.degree()));
  for (std::size_t j = 0; j < P.coeffs().size(); ++j) {
    if (P.coeffs()[j] != 0) axpy(r, to_real<Real>(P.coeffs()[j]), memo_[j]);
  }
  return r;
}

template <class Real>
Real Engine<Real>::epsilon(std::size_t n) const {
  const Construction& c = *c_;
  if (n == 0) {
    if (c.params().scheme == IndexScheme::pow5) throw Error(Errc::precondition, "epsilon: n must be >= 1");
    return Real(1);
  }
  return Real(1) / weight_product(static_cast<std::size_t>(c.b(n - 1)) + 1, static_cast<std::size_t>(c.b(n)) - 1);
}

template <class Real>
const std::pair<Real, typename Engine<Real>::Sparse>& Engine<Real>::column_special(std::size_t n) const {
  std::lock_guard lock(mu_);
  auto it = special_.find(n);
  if (it != special_.end()) return it->second;
  const Construction& c = *c_;
  const Real eps = epsilon(n);
  Sparse f;
  if (n > 0) {
    const Polynomial Pn = c.P(n);
    const Polynomial Pp = c.P(n - 1);
    const std::size_t shift = static_cast<std::size_t>(c.b(n) - c.b(n - 1));
    if (!Pp.is_zero()) fill_to(shift + static_cast<std::size_t>(Pp.degree()));
    Sparse acc = poly_applied(Pn);
    for (std::size_t j = 0; j < Pp.coeffs().size(); ++j) {
      if (Pp.coeffs()[j] != 0) axpy(acc, Real(-to_real<Real>(Pp.coeffs()[j])), memo_[shift + j]);
    }
    for (auto& [i, v] : acc) {
      Real t = eps * v;
      if (t != 0) f.emplace(i, std::move(t));
    }
  }
  return special_.emplace(n, std::make_pair(eps, std::move(f))).first->second;
}

template <class Real>
typename Engine<Real>::Sparse Engine<Real>::f(std::size_t n) const {
  if (n == 0 && c_->params().scheme == IndexScheme::pow5) throw Error(Errc::precondition, "f: n must be >= 1");
  return column_special(n).second;
}

template <class Real>
typename Engine<Real>::Sparse Engine<Real>::apply(const Sparse& x, std::size_t N, Real* lost) const {
  const Construction& c = *c_;
  Sparse y;
  Real dropped = 0;
  for (const auto& [j, v] : x) {
    if (j >= N) throw Error(Errc::dimension_mismatch, "apply: coordinate beyond truncation");
    const auto blk = c.block_of(j + 1);
    if (blk && c.b(*blk) == j + 1) {
      const auto& [eps, f] = column_special(*blk);
      if (j + 1 < N) {
        add_at(y, j + 1, Real(v * eps));
      } else {
        dropped += abs(v * eps);
      }
      axpy(y, v, f);
    } else {
      Real t = v * weight(j + 1);
      if (j + 1 < N) {
        add_at(y, j + 1, t);
      } else {
        dropped += abs(t);
      }
    }
  }
  if (lost) *lost = dropped;
  return y;
}

template <class Real>
Real Engine<Real>::l1(const Sparse& x) {
  Real s = 0;
  for (const auto& [i, v] : x) s += abs(v);
  return s;
}

template <class Real>
Real Engine<Real>::l2(const Sparse& x) {
  Real s = 0;
  for (const auto& [i, v] : x) s += v * v;
  return sqrt(s);
}

template class Engine<Real256>;
template class Engine<Real512>;
template class Engine<Real2048>;

EpsilonF epsilon_f(const ConstructionParams& params, std::size_t n) {
  auto c = std::make_shared<const Construction>(params);
  if (n == 0 && params.scheme == IndexScheme::pow5) throw Error(Errc::precondition, "epsilon_f: n must be >= 1");
  const std::size_t bn = static_cast<std::size_t>(c->b(n));
  Engine<Real256> e(c, params.memo_cap);
  EpsilonF out;
  out.epsilon = static_cast<double>(e.epsilon(n));
  out.f = Vector(bn);
  for (const auto& [i, v] : e.f(n)) out.f.set(i, static_cast<double>(v));
  return out;
}

PerturbedShiftMap::PerturbedShiftMap(std::shared_ptr<const Construction> c, std::size_t N) : c_(std::move(c)), N_(N) {
  Engine<Real256> e(c_, std::max(c_->params().memo_cap, N_));
  for (std::size_t n = 0;; ++n) {
    const std::uint64_t bn = index_b_saturated(n, c_->params().scheme, c_->params().p);
    if (bn > N_) break;
    if (bn == 0) continue;
    Vector col(N_);
    const Real256 eps = e.epsilon(n);
    if (bn < N_) {
      col.set(static_cast<std::size_t>(bn), static_cast<double>(eps));
    } else {
      last_eps_ = static_cast<double>(eps);
    }
    for (const auto& [i, v] : e.f(n)) col.set(i, col[i] + static_cast<double>(v));
    special_.emplace(static_cast<std::size_t>(bn - 1), std::move(col));
  }
}

ApplyResult PerturbedShiftMap::apply(const Vector& v) const {
  if (v.dim() != N_) throw Error(Errc::dimension_mismatch, "apply: vector dimension does not match operator");
  Vector out(N_);
  double lost = 0.0;
  for (const auto& [j, x] : v.coords()) {
    auto it = special_.find(j);
    if (it != special_.end()) {
      out += x * it->second;
      if (j + 1 == N_) lost += std::abs(x) * last_eps_;
    } else if (j + 1 < N_) {
      out.set(j + 1, out[j + 1] + weight(j + 1) * x);
    } else {
      lost += std::abs(x) * weight(j + 1);
    }
  }
  return {std::move(out), lost};
}

json PerturbedShiftMap::describe() const { return {{"construction", to_json(c_->params())}, {"N", N_}}; }

OperatorSpec build_operator(const ConstructionParams& params, std::size_t N) {
  auto c = std::make_shared<const Construction>(params);
  if (N < c->b(1) + 1) {
    throw Error(Errc::precondition, "build_operator: N must be at least b_1 + 1 = " + std::to_string(c->b(1) + 1));
  }
  c->validate_upto(N);
  return perturbed_forward_shift(std::make_shared<const PerturbedShiftMap>(c, N));
}

Vector orbit_vector_coords(const ConstructionParams& params, std::size_t i) {
  auto c = std::make_shared<const Construction>(params);
  Engine<Real256> e(c, std::max(params.memo_cap, i + 1));
  Vector out(i + 1);
  for (const auto& [j, v] : e.orbit(i)) out.set(j, static_cast<double>(v));
  return out;
}

double f_bound_rhs(const Polynomial& Pn, const Polynomial& Pprev, double log_b_prev, double c) {
  const double d = static_cast<double>(std::max(Pn.degree(), Pprev.degree()) + 1);
  const double l1n = Pn.l1().get_d();
  const double l1p = Pprev.l1().get_d();
  const double neg_inf = -std::numeric_limits<double>::infinity();
  const double b_prev = log_b_prev == neg_inf ? 0.0 : std::exp(log_b_prev);
  const double sqrt_b = log_b_prev == neg_inf ? 0.0 : std::exp(0.5 * log_b_prev);
  const double t1 = l1n > 0 ? std::log(l1n) - b_prev * std::log(2.0) : neg_inf;
  const double t2 = l1p > 0 ? std::log(l1p) - c * sqrt_b : neg_inf;
  const double m = std::max(t1, t2);
  if (m == neg_inf) return 0.0;
  return std::exp(d * std::log(4.0) + m + std::log(std::exp(t1 - m) + std::exp(t2 - m)));
}

template <class Real>
FBound check_f_bound(const Engine<Real>& engine, std::size_t n) {
  const Construction& c = engine.construction();
  if (n == 0) throw Error(Errc::precondition, "check_f_bound: n must be >= 1");
  for (std::size_t k = 1; k < n; ++k) {
    if (Engine<Real>::l1(engine.f(k)) > 1) {
      throw Error(Errc::hypothesis, "f_n bound hypothesis fails: ||f_" + std::to_string(k) + "||_1 > 1");
    }
  }
  FBound out;
  out.n = n;
  const Real lhs = Engine<Real>::l1(engine.f(n));
  out.lhs = static_cast<double>(lhs);
  out.lhs_text = decimal(lhs, 30);
  out.rhs = f_bound_rhs(c.P(n), c.P(n - 1), log_index_b(n - 1, c.params().scheme, c.params().p), c.params().c);
  out.pass = out.lhs <= out.rhs;
  return out;
}

template FBound check_f_bound<Real256>(const Engine<Real256>&, std::size_t);
template FBound check_f_bound<Real512>(const Engine<Real512>&, std::size_t);
template FBound check_f_bound<Real2048>(const Engine<Real2048>&, std::size_t);

FBound check_f_bound(const ConstructionParams& params, std::size_t n) {
  auto c = std::make_shared<const Construction>(params);
  Engine<Real256> e(c, std::max(params.memo_cap, static_cast<std::size_t>(c->b(n))));
  return check_f_bound(e, n);
}

ClosureCheck check_defining_relation(const std::shared_ptr<const Construction>& c, std::size_t n, double tol) {
  ClosureCheck out;
  out.n = n;
  out.b_n = c->b(n);
  const auto bn = static_cast<std::size_t>(out.b_n);
  c->validate_upto(out.b_n);
  Engine<Real2048> e(c, std::max(c->params().memo_cap, bn + 1));
  Engine<Real2048>::Sparse x{{0, Real2048(1)}};
  Real2048 lost_total = 0;
  for (std::size_t t = 0; t < bn; ++t) {
    Real2048 lost = 0;
    x = e.apply(x, bn + 1, &lost);
    lost_total += lost;
  }
  Engine<Real2048>::Sparse expected = e.poly_applied(c->P(n));
  expected[bn] += 1;
  Engine<Real2048>::Sparse diff = x;
  for (const auto& [i, v] : expected) diff[i] -= v;
  const Real2048 scale = Engine<Real2048>::l2(expected);
  out.relative_error = static_cast<double>(Engine<Real2048>::l2(diff) / scale);
  out.pass = out.relative_error <= tol && lost_total == 0;
  return out;
}

DirectSumBuild build_direct_sum(int p_max, std::size_t N_per_block, const ConstructionParams& base) {
  if (p_max < 2) throw Error(Errc::precondition, "build_direct_sum: p_max must be >= 2");
  std::vector<OperatorSpec> ops;
  std::vector<Vector> blocks;
  for (int p = 2; p <= p_max; ++p) {
    ConstructionParams params = base;
    params.p = p;
    params.scheme = IndexScheme::pow5;
    ops.push_back(build_operator(params, N_per_block));
    blocks.push_back(Vector::basis(N_per_block, 0, 1.0 / p));
  }
  return {direct_sum(std::move(ops)), DirectSumVector(std::move(blocks))};
}

double repetition_error(const std::vector<std::shared_ptr<const Construction>>& blocks, std::size_t n,
                        const Rational& lambda, const Polynomial& P) {
  const Real2048 lam = to_real<Real2048>(lambda);
  Real2048 total = 0;
  for (const auto& c : blocks) {
    const auto bn = static_cast<std::size_t>(c->b(n));
    c->validate_upto(bn);
    Engine<Real2048> e(c, std::max(c->params().memo_cap, bn + 1));
    const Real2048 inv_p = Real2048(1) / Real2048(c->params().p);
    Engine<Real2048>::Sparse x{{0, inv_p}};
    for (std::size_t t = 0; t < bn; ++t) x = e.apply(x, bn + 1);
    Engine<Real2048>::Sparse diff;
    for (const auto& [i, v] : x) diff[i] = v / lam;
    for (const auto& [i, v] : e.poly_applied(P)) diff[i] -= v * inv_p;
    const Real2048 l = Engine<Real2048>::l2(diff);
    total += l * l;
  }
  return static_cast<double>(sqrt(total));
}

}  // namespace grassdyn
