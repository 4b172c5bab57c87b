#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "grassdyn/construction.hpp"
#include "grassdyn/error.hpp"

namespace grassdyn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t base_of(IndexScheme scheme, int p) {
  return scheme == IndexScheme::pow5 ? 5u : static_cast<std::uint64_t>(2 * p + 1);
}

double sqrt_from_log(double lb) { return lb == kNegInf ? 0.0 : std::exp(0.5 * lb); }
double value_from_log(double lb) { return lb == kNegInf ? 0.0 : std::exp(lb); }

bool control_ok(std::int64_t u, std::int64_t uprev, double log_b_prev, double log_b, double c) {
  const double ln4 = std::log(4.0);
  const double ln2 = std::log(2.0);
  const double U = static_cast<double>(u);
  const double Up = static_cast<double>(uprev);
  const double t1 = u > 0 ? std::log(U) - value_from_log(log_b_prev) * ln2 : kNegInf;
  const double t2 = uprev > 0 ? std::log(Up) - c * sqrt_from_log(log_b_prev) : kNegInf;
  const double m = std::max(t1, t2);
  if (m > kNegInf) {
    const double s = m + std::log(std::exp(t1 - m) + std::exp(t2 - m));
    if (std::max(U, Up) * ln4 + s > 1e-12) return false;
  }
  if (u > 0) {
    const double lhs = U * ln4 + std::log(U) - c * sqrt_from_log(log_b);
    if (lhs > -ln2 + 1e-12) return false;
  }
  return true;
}

std::int64_t control_step(std::int64_t uprev, double log_b_prev, double log_b, double c) {
  if (uprev >= kUnboundedControl) return kUnboundedControl;
  std::int64_t lo = 0;
  std::int64_t hi = 1;
  while (hi < kUnboundedControl && control_ok(hi, uprev, log_b_prev, log_b, c)) {
    lo = hi;
    hi *= 2;
  }
  if (hi >= kUnboundedControl && control_ok(kUnboundedControl, uprev, log_b_prev, log_b, c)) {
    return kUnboundedControl;
  }
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (control_ok(mid, uprev, log_b_prev, log_b, c)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

bool tuple_zero(const PolyTuple& t) {
  return std::all_of(t.begin(), t.end(), [](const Polynomial& p) { return p.is_zero(); });
}

bool tuple_fits(const PolyTuple& t, std::int64_t u, std::uint64_t b) {
  return std::all_of(t.begin(), t.end(), [&](const Polynomial& p) { return fits_caps(p, u, b); });
}

constexpr std::size_t kScanLimit = 50'000'000;

}  // namespace

std::string to_string(IndexScheme s) { return s == IndexScheme::pow5 ? "pow5" : "pow2p1"; }

IndexScheme scheme_from_string(const std::string& s) {
  if (s == "pow5") return IndexScheme::pow5;
  if (s == "pow2p1") return IndexScheme::pow2p1;
  throw Error(Errc::config, "unknown index scheme '" + s + "' (expected pow5 or pow2p1)");
}

std::string to_string(SourceKind s) {
  switch (s) {
    case SourceKind::zero:
      return "zero";
    case SourceKind::classic:
      return "classic";
    case SourceKind::interleaved:
      return "interleaved";
    case SourceKind::explicit_list:
      return "explicit";
  }
  return "zero";
}

SourceKind source_from_string(const std::string& s) {
  if (s == "zero") return SourceKind::zero;
  if (s == "classic") return SourceKind::classic;
  if (s == "interleaved") return SourceKind::interleaved;
  if (s == "explicit") return SourceKind::explicit_list;
  throw Error(Errc::config, "unknown admissible source '" + s + "' (expected zero, classic, interleaved or explicit)");
}

double default_bound_constant() { return std::log(4.0 / 3.0); }

double weight(std::size_t n) {
  if (n == 0) throw Error(Errc::precondition, "weight: index must be >= 1");
  return 4.0 * (1.0 - 1.0 / (2.0 * std::sqrt(static_cast<double>(n))));
}

std::uint64_t index_b_saturated(std::size_t n, IndexScheme scheme, int p) {
  if (n == 0) return scheme == IndexScheme::pow5 ? 0 : 1;
  const std::uint64_t base = base_of(scheme, p);
  std::uint64_t b = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (b > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    b *= base;
  }
  return b;
}

std::uint64_t index_b(std::size_t n, IndexScheme scheme, int p) {
  if (scheme == IndexScheme::pow2p1 && p < 1) throw Error(Errc::precondition, "index_b: p must be positive");
  std::uint64_t b = index_b_saturated(n, scheme, p);
  if (b == std::numeric_limits<std::uint64_t>::max()) {
    throw Error(Errc::cap_exceeded, "index_b: b_" + std::to_string(n) + " exceeds 64 bits");
  }
  return b;
}

double log_index_b(std::size_t n, IndexScheme scheme, int p) {
  if (n == 0) return scheme == IndexScheme::pow5 ? kNegInf : 0.0;
  return static_cast<double>(n) * std::log(static_cast<double>(base_of(scheme, p)));
}

std::vector<std::int64_t> derive_control_sequence(IndexScheme scheme, int p, std::size_t N, double c) {
  if (N < 1) throw Error(Errc::precondition, "derive_control_sequence: N must be >= 1");
  if (!(c > 0.0)) throw Error(Errc::precondition, "derive_control_sequence: c must be positive");
  std::vector<std::int64_t> u{0};
  for (std::size_t n = 1; n <= N; ++n) {
    u.push_back(control_step(u.back(), log_index_b(n - 1, scheme, p), log_index_b(n, scheme, p), c));
    if (n >= 3 && u.back() == 0) {
      throw Error(Errc::no_control, "no admissible control value u_" + std::to_string(n) + " >= 1");
    }
  }
  return u;
}

ControlTable::ControlTable(IndexScheme scheme, int p, double c, std::vector<std::int64_t> explicit_values)
    : scheme_(scheme), p_(p), c_(c) {
  if (!explicit_values.empty()) {
    explicit_ = true;
    u_ = std::move(explicit_values);
  } else {
    u_.push_back(0);
  }
}

std::int64_t ControlTable::at(std::size_t n) const {
  std::lock_guard lock(mu_);
  if (explicit_) return n < u_.size() ? u_[n] : u_.back();
  while (u_.size() <= n) {
    const std::size_t k = u_.size();
    u_.push_back(control_step(u_.back(), log_index_b(k - 1, scheme_, p_), log_index_b(k, scheme_, p_), c_));
  }
  return u_[n];
}

std::vector<Rational> height_alphabet(int H) {
  std::set<Rational> s;
  for (int q = 1; q <= H; ++q) {
    for (int p = -H; p <= H; ++p) {
      Rational r(p, q);
      r.canonicalize();
      s.insert(r);
    }
  }
  return {s.begin(), s.end()};
}

TupleCursor::TupleCursor(std::size_t width) : width_(width) { start_block(1); }

void TupleCursor::start_block(int H) {
  H_ = H;
  alphabet_ = height_alphabet(H);
  digits_.assign(width_ * static_cast<std::size_t>(H), 0);
  fresh_ = true;
}

PolyTuple TupleCursor::next() {
  for (;;) {
    if (fresh_) {
      fresh_ = false;
    } else {
      std::size_t i = 0;
      while (i < digits_.size()) {
        if (++digits_[i] < alphabet_.size()) break;
        digits_[i] = 0;
        ++i;
      }
      if (i == digits_.size()) {
        start_block(H_ + 1);
        fresh_ = false;
      }
    }
    PolyTuple t;
    t.reserve(width_);
    for (std::size_t c = 0; c < width_; ++c) {
      std::vector<Rational> coeffs(static_cast<std::size_t>(H_));
      for (int d = 0; d < H_; ++d) coeffs[static_cast<std::size_t>(d)] = alphabet_[digits_[c * H_ + d]];
      t.emplace_back(std::move(coeffs));
    }
    if (!tuple_zero(t)) return t;
  }
}

bool fits_caps(const Polynomial& P, std::int64_t u, std::uint64_t b) {
  if (P.is_zero()) return true;
  const auto deg = static_cast<std::int64_t>(P.degree());
  if (deg >= u) return false;
  if (P.l1() > Rational(static_cast<long>(u))) return false;
  if (b == std::numeric_limits<std::uint64_t>::max()) return true;
  const auto bd = static_cast<std::int64_t>(b);
  return 3 * deg < bd && deg < bd - 1;
}

ClassicEnumeration::ClassicEnumeration(IndexScheme scheme, int p, std::shared_ptr<const ControlTable> control)
    : scheme_(scheme), p_(p), control_(std::move(control)) {}

bool ClassicEnumeration::consume_next() const {
  Polynomial cand = cursor_.next()[0];
  std::size_t n = at_.empty() ? 1 : at_.back() + 1;
  const std::size_t start = n;
  while (!fits_caps(cand, control_->at(n), index_b_saturated(n, scheme_, p_))) {
    if (++n - start > kScanLimit) throw Error(Errc::cap_exceeded, "classic enumeration: control never admits candidate");
  }
  at_.push_back(n);
  poly_.push_back(std::move(cand));
  return true;
}

void ClassicEnumeration::extend_to(std::size_t n) const {
  while (at_.empty() || at_.back() < n) consume_next();
}

Polynomial ClassicEnumeration::at(std::size_t n) const {
  if (n == 0) return {};
  std::lock_guard lock(mu_);
  extend_to(n);
  auto it = std::lower_bound(at_.begin(), at_.end(), n);
  if (it != at_.end() && *it == n) return poly_[static_cast<std::size_t>(it - at_.begin())];
  return {};
}

std::size_t ClassicEnumeration::locate(const Polynomial& P, std::size_t max_candidates) const {
  if (P.is_zero()) return 0;
  std::lock_guard lock(mu_);
  for (std::size_t k = 0; k < max_candidates; ++k) {
    if (k == poly_.size()) consume_next();
    if (poly_[k] == P) return at_[k];
  }
  throw Error(Errc::cap_exceeded, "classic enumeration: polynomial not reached within the candidate budget");
}

InterleavedEnumeration::InterleavedEnumeration(std::shared_ptr<const ControlTable> control)
    : control_(std::move(control)) {}

InterleavedEnumeration::Stream& InterleavedEnumeration::stream(std::size_t i) const {
  auto& slot = streams_[i];
  if (!slot) slot = std::make_unique<Stream>(i + 1);
  return *slot;
}

void InterleavedEnumeration::consume_next(std::size_t i, Stream& s) const {
  const std::size_t slot = s.next_slot++;
  PolyTuple cand;
  bool rep = false;
  if (slot % 2 == 0) {
    cand = s.tuples.next();
  } else {
    Polynomial P = s.singles.next()[0];
    cand.assign(i + 1, Rational(static_cast<long>(i + 1)) * P);
    rep = true;
  }
  const std::uint64_t zero_prefix = index_b_saturated(i + 1, IndexScheme::pow5, 2);
  if (zero_prefix == std::numeric_limits<std::uint64_t>::max()) {
    throw Error(Errc::cap_exceeded, "interleaved enumeration: b_{i+1} exceeds 64 bits");
  }
  std::size_t n = static_cast<std::size_t>(zero_prefix) + 1;
  if (!s.at.empty()) n = std::max(n, s.at.back() + 1);
  const std::size_t start = n;
  while (!tuple_fits(cand, control_->at(n), index_b_saturated(n, IndexScheme::pow5, 2))) {
    if (++n - start > kScanLimit) throw Error(Errc::cap_exceeded, "interleaved enumeration: control never admits candidate");
  }
  s.at.push_back(n);
  s.value.push_back(std::move(cand));
  s.repetition.push_back(rep);
}

PolyTuple InterleavedEnumeration::S(std::size_t i, std::size_t n) const {
  const std::uint64_t zero_prefix = index_b_saturated(i + 1, IndexScheme::pow5, 2);
  if (n <= zero_prefix) return PolyTuple(i + 1);
  std::lock_guard lock(mu_);
  Stream& s = stream(i);
  while (s.at.empty() || s.at.back() < n) consume_next(i, s);
  auto it = std::lower_bound(s.at.begin(), s.at.end(), n);
  if (it != s.at.end() && *it == n) return s.value[static_cast<std::size_t>(it - s.at.begin())];
  return PolyTuple(i + 1);
}

std::pair<std::size_t, std::size_t> InterleavedEnumeration::q_coordinates(std::size_t N) {
  auto tri = [](std::size_t j) { return j * (j + 1) / 2; };
  auto j = static_cast<std::size_t>((std::sqrt(8.0 * static_cast<double>(N) + 1.0) - 1.0) / 2.0);
  while (tri(j) > N) --j;
  while (tri(j + 1) <= N) ++j;
  const std::size_t i = N - tri(j);
  const std::size_t n = tri(j) + j - N;
  return {i, n};
}

std::size_t InterleavedEnumeration::q_index(std::size_t i, std::size_t n) { return (i + n) * (i + n + 1) / 2 + i; }

PolyTuple InterleavedEnumeration::Q(std::size_t N) const {
  auto [i, n] = q_coordinates(N);
  return S(i, n);
}

Polynomial InterleavedEnumeration::admissible(int p, std::size_t N) const {
  if (p < 2) throw Error(Errc::precondition, "admissible_for_p: p must be >= 2");
  auto [i, n] = q_coordinates(N);
  const auto k = static_cast<std::size_t>(p - 2);
  if (k > i) return {};
  return S(i, n)[k];
}

std::size_t InterleavedEnumeration::locate(const Polynomial& P, std::size_t component, std::size_t max_candidates) const {
  if (P.is_zero()) throw Error(Errc::precondition, "locate: the zero polynomial is not enumerated");
  PolyTuple target(component + 1);
  target[component] = P;
  std::lock_guard lock(mu_);
  Stream& s = stream(component);
  for (std::size_t k = 0; k < max_candidates; ++k) {
    if (k == s.value.size()) consume_next(component, s);
    if (s.value[k] == target) return s.at[k];
  }
  throw Error(Errc::cap_exceeded, "locate: polynomial not reached within the candidate budget");
}

std::size_t InterleavedEnumeration::locate_repetition(const Polynomial& P, std::size_t i,
                                                    std::size_t max_candidates) const {
  if (P.is_zero()) throw Error(Errc::precondition, "locate_repetition: the zero polynomial is not enumerated");
  const Polynomial scaled = Rational(static_cast<long>(i + 1)) * P;
  std::lock_guard lock(mu_);
  Stream& s = stream(i);
  for (std::size_t k = 0; k < max_candidates; ++k) {
    if (k == s.value.size()) consume_next(i, s);
    if (s.repetition[k] && s.value[k][0] == scaled) return s.at[k];
  }
  throw Error(Errc::cap_exceeded, "locate_repetition: block not reached within the candidate budget");
}

bool verify_claim(int p) {
  if (p < 2) throw Error(Errc::precondition, "verify_claim: p must be >= 2");
  static const InterleavedEnumeration enumeration(
      std::make_shared<const ControlTable>(IndexScheme::pow5, 2, default_bound_constant()));
  for (std::size_t j = 0; j <= static_cast<std::size_t>(2 * p); ++j) {
    if (!enumeration.admissible(p, j).is_zero()) return false;
  }
  return true;
}

json to_json(const ConstructionParams& p) {
  json polys = json::object();
  for (const auto& [n, P] : p.explicit_polys) polys[std::to_string(n)] = to_json(P);
  return {{"p", p.p},
          {"scheme", to_string(p.scheme)},
          {"source", to_string(p.source)},
          {"c", p.c},
          {"explicit_control", p.explicit_control},
          {"explicit_polys", polys},
          {"memo_cap", p.memo_cap}};
}

ConstructionParams construction_params_from_json(const json& j) {
  ConstructionParams p;
  if (!j.is_object()) throw Error(Errc::config, "construction: expected an object");
  for (const auto& [key, _] : j.items()) {
    static const std::set<std::string> known{"p", "scheme", "source", "c", "explicit_control", "explicit_polys",
                                             "memo_cap"};
    if (!known.count(key)) throw Error(Errc::config, "construction: unknown field '" + key + "'");
  }
  try {
    if (j.contains("p")) p.p = j.at("p").get<int>();
    if (j.contains("scheme")) p.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    if (j.contains("source")) p.source = source_from_string(j.at("source").get<std::string>());
    if (j.contains("c")) p.c = j.at("c").get<double>();
    if (j.contains("explicit_control")) p.explicit_control = j.at("explicit_control").get<std::vector<std::int64_t>>();
    if (j.contains("explicit_polys")) {
      for (const auto& [k, v] : j.at("explicit_polys").items()) p.explicit_polys[std::stoul(k)] = polynomial_from_json(v);
    }
    if (j.contains("memo_cap")) p.memo_cap = j.at("memo_cap").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(Errc::config, std::string("construction: ") + e.what());
  }
  if (p.p < 2) throw Error(Errc::precondition, "construction: p must be >= 2");
  if (!(p.c > 0.0)) throw Error(Errc::config, "construction.c: must be positive");
  return p;
}

AdmissibleSequence::AdmissibleSequence(const ConstructionParams& params)
    : params_(params),
      control_(std::make_shared<const ControlTable>(params.scheme, params.p, params.c, params.explicit_control)) {
  switch (params.source) {
    case SourceKind::classic:
      classic_ = std::make_shared<ClassicEnumeration>(params.scheme, params.p, control_);
      break;
    case SourceKind::interleaved:
      if (params.scheme != IndexScheme::pow5) {
        throw Error(Errc::config, "the interleaved source is defined for the pow5 scheme only");
      }
      interleaved_ = std::make_shared<InterleavedEnumeration>(control_);
      break;
    default:
      break;
  }
}

Polynomial AdmissibleSequence::at(std::size_t n) const {
  switch (params_.source) {
    case SourceKind::zero:
      return {};
    case SourceKind::classic:
      return classic_->at(n);
    case SourceKind::interleaved:
      return interleaved_->admissible(params_.p, n);
    case SourceKind::explicit_list: {
      auto it = params_.explicit_polys.find(n);
      return it == params_.explicit_polys.end() ? Polynomial{} : it->second;
    }
  }
  return {};
}

std::size_t AdmissibleSequence::locate(const Polynomial& P) const {
  switch (params_.source) {
    case SourceKind::classic:
      return classic_->locate(P);
    case SourceKind::interleaved: {
      const auto k = static_cast<std::size_t>(params_.p - 2);
      return InterleavedEnumeration::q_index(k, interleaved_->locate(P, k));
    }
    default:
      throw Error(Errc::unsupported, "locate: only the classic and interleaved sources enumerate Q[X]");
  }
}

bool controlled_by(const AdmissibleSequence& seq, const std::vector<std::int64_t>& c, std::size_t upto) {
  for (std::size_t n = 0; n <= upto; ++n) {
    if (n >= c.size()) return false;
    const Polynomial P = seq.at(n);
    if (static_cast<std::int64_t>(P.degree()) >= c[n]) return false;
    if (P.l1() > Rational(static_cast<long>(c[n]))) return false;
  }
  return true;
}

}  // namespace grassdyn
