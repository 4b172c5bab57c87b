#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "grassdyn/operators.hpp"
#include "grassdyn/polynomial.hpp"
#include "grassdyn/space.hpp"

namespace grassdyn {

namespace mp = boost::multiprecision;
using Real256 = mp::number<mp::cpp_bin_float<256, mp::digit_base_2>, mp::et_off>;
using Real512 = mp::number<mp::cpp_bin_float<512, mp::digit_base_2>, mp::et_off>;
using Real2048 = mp::number<mp::cpp_bin_float<2048, mp::digit_base_2>, mp::et_off>;

enum class IndexScheme { pow2p1, pow5 };
enum class SourceKind { zero, classic, interleaved, explicit_list };

[[nodiscard]] std::string to_string(IndexScheme s);
[[nodiscard]] IndexScheme scheme_from_string(const std::string& s);
[[nodiscard]] std::string to_string(SourceKind s);
[[nodiscard]] SourceKind source_from_string(const std::string& s);

/// Numerical constant of the f_n bound; ln(4/3).
[[nodiscard]] double default_bound_constant();

/// Control values at or above this are treated as unbounded.
inline constexpr std::int64_t kUnboundedControl = std::int64_t{1} << 40;

/// w_n = 4(1 - 1/(2 sqrt n)), n >= 1.
[[nodiscard]] double weight(std::size_t n);

/// b_n; throws Errc::cap_exceeded if it does not fit in 64 bits.
[[nodiscard]] std::uint64_t index_b(std::size_t n, IndexScheme scheme, int p);
/// ln b_n (minus infinity for b_0 = 0 under pow5); never overflows.
[[nodiscard]] double log_index_b(std::size_t n, IndexScheme scheme, int p);

/// u_0 .. u_N. u_n is the largest u >= 0 with
///   4^max(u, u_{n-1}) (u / 2^b_{n-1} + u_{n-1} exp(-c sqrt b_{n-1})) <= 1   and
///   4^u u exp(-c sqrt b_n) <= 1/2.
/// The second condition keeps u_n admissible for the first one at n + 1, so the
/// sequence is nondecreasing. Throws Errc::no_control if u_n = 0 for some n >= 3.
[[nodiscard]] std::vector<std::int64_t> derive_control_sequence(IndexScheme scheme, int p, std::size_t N,
                                                                double c = default_bound_constant());

/// Lazily extended derived control sequence, safe for concurrent readers.
class ControlTable {
 public:
  ControlTable(IndexScheme scheme, int p, double c, std::vector<std::int64_t> explicit_values = {});
  [[nodiscard]] std::int64_t at(std::size_t n) const;
  [[nodiscard]] double constant() const { return c_; }
  [[nodiscard]] bool is_explicit() const { return explicit_; }

 private:
  IndexScheme scheme_;
  int p_;
  double c_;
  bool explicit_ = false;
  mutable std::mutex mu_;
  mutable std::vector<std::int64_t> u_;
};

using PolyTuple = std::vector<Polynomial>;

/// Height-block enumeration of nonzero tuples in Q[X]^width. Block H lists the
/// tuples whose components have degree < H and coefficients in
/// {p/q : |p| <= H, 1 <= q <= H}, in mixed-radix order (first coefficient of the
/// first component varies fastest). Later blocks repeat earlier tuples.
class TupleCursor {
 public:
  explicit TupleCursor(std::size_t width);
  [[nodiscard]] PolyTuple next();
  [[nodiscard]] int height() const { return H_; }

 private:
  void start_block(int H);
  std::size_t width_;
  int H_ = 0;
  std::vector<Rational> alphabet_;
  std::vector<std::size_t> digits_;
  bool fresh_ = true;
};

[[nodiscard]] std::vector<Rational> height_alphabet(int H);

/// b_n, saturated at UINT64_MAX instead of overflowing.
[[nodiscard]] std::uint64_t index_b_saturated(std::size_t n, IndexScheme scheme, int p);

/// Degree/l1/size caps shared by both enumerations: deg < u_n, |.|_1 <= u_n,
/// 3 deg < b_n and deg < b_n - 1.
[[nodiscard]] bool fits_caps(const Polynomial& P, std::int64_t u, std::uint64_t b);

/// Classic admissible enumeration: P_0 = 0 and, for n >= 1, P_n is the next
/// enumerated polynomial if it fits the caps at n, else 0.
class ClassicEnumeration {
 public:
  ClassicEnumeration(IndexScheme scheme, int p, std::shared_ptr<const ControlTable> control);
  [[nodiscard]] Polynomial at(std::size_t n) const;
  /// First index n carrying P (P nonzero).
  [[nodiscard]] std::size_t locate(const Polynomial& P, std::size_t max_candidates = 1000000) const;

 private:
  void extend_to(std::size_t n) const;
  bool consume_next() const;
  IndexScheme scheme_;
  int p_;
  std::shared_ptr<const ControlTable> control_;
  mutable std::mutex mu_;
  mutable TupleCursor cursor_{1};
  mutable std::vector<std::size_t> at_;
  mutable std::vector<Polynomial> poly_;
};

/// The S^i_n / Q_n enumeration behind the p-indexed admissible sequences.
/// Candidates of S^i alternate between the tuple enumeration of Q[X]^(i+1)
/// (even slots) and repetition blocks ((i+1)P, ..., (i+1)P) with i+1 copies
/// (odd slots). S^i_n = 0 for n <= b_{i+1}; otherwise S^i_n is the next
/// candidate when every component fits the caps at n, else 0.
class InterleavedEnumeration {
 public:
  explicit InterleavedEnumeration(std::shared_ptr<const ControlTable> control);

  [[nodiscard]] PolyTuple S(std::size_t i, std::size_t n) const;
  [[nodiscard]] PolyTuple Q(std::size_t N) const;
  /// (i, n) with Q_N = S^i_n.
  [[nodiscard]] static std::pair<std::size_t, std::size_t> q_coordinates(std::size_t N);
  [[nodiscard]] static std::size_t q_index(std::size_t i, std::size_t n);
  /// P^p_N = component p-2 of Q_N.
  [[nodiscard]] Polynomial admissible(int p, std::size_t N) const;

  /// S-index n of the first S^k_n equal to (0, ..., 0, P) with P at position k.
  [[nodiscard]] std::size_t locate(const Polynomial& P, std::size_t component,
                                   std::size_t max_candidates = 1000000) const;
  /// S-index n of the repetition block ((i+1)P, ..., (i+1)P) in S^i.
  [[nodiscard]] std::size_t locate_repetition(const Polynomial& P, std::size_t i,
                                              std::size_t max_candidates = 1000000) const;

 private:
  struct Stream {
    TupleCursor tuples;
    TupleCursor singles{1};
    std::size_t next_slot = 0;
    std::vector<std::size_t> at;
    std::vector<PolyTuple> value;
    std::vector<bool> repetition;
    explicit Stream(std::size_t width) : tuples(width) {}
  };
  Stream& stream(std::size_t i) const;
  void consume_next(std::size_t i, Stream& s) const;
  std::shared_ptr<const ControlTable> control_;
  mutable std::mutex mu_;
  mutable std::map<std::size_t, std::unique_ptr<Stream>> streams_;
};

[[nodiscard]] bool verify_claim(int p);

struct ConstructionParams {
  int p = 2;
  IndexScheme scheme = IndexScheme::pow5;
  SourceKind source = SourceKind::interleaved;
  double c = default_bound_constant();
  std::vector<std::int64_t> explicit_control;
  std::map<std::size_t, Polynomial> explicit_polys;
  std::size_t memo_cap = 700;
};

[[nodiscard]] json to_json(const ConstructionParams& p);
[[nodiscard]] ConstructionParams construction_params_from_json(const json& j);

class AdmissibleSequence {
 public:
  explicit AdmissibleSequence(const ConstructionParams& params);
  [[nodiscard]] Polynomial at(std::size_t n) const;
  [[nodiscard]] std::shared_ptr<const ControlTable> control() const { return control_; }
  /// Index carrying P for the classic and interleaved sources.
  [[nodiscard]] std::size_t locate(const Polynomial& P) const;

 private:
  ConstructionParams params_;
  std::shared_ptr<const ControlTable> control_;
  std::shared_ptr<ClassicEnumeration> classic_;
  std::shared_ptr<InterleavedEnumeration> interleaved_;
};

[[nodiscard]] bool controlled_by(const AdmissibleSequence& seq, const std::vector<std::int64_t>& c, std::size_t upto);

/// Weight-free data of one construction instance.
class Construction {
 public:
  explicit Construction(ConstructionParams params);

  [[nodiscard]] const ConstructionParams& params() const { return params_; }
  [[nodiscard]] const AdmissibleSequence& sequence() const { return seq_; }
  [[nodiscard]] Polynomial P(std::size_t n) const { return seq_.at(n); }
  [[nodiscard]] std::uint64_t b(std::size_t n) const { return index_b(n, params_.scheme, params_.p); }
  /// Block index n with b_n <= i < b_{n+1}; nullopt when i < b_0.
  [[nodiscard]] std::optional<std::size_t> block_of(std::uint64_t i) const;
  /// Throws Errc::non_ambiguity when deg P_n >= b_n - 1 or 3 deg P_n >= b_n for some n with b_n <= limit.
  void validate_upto(std::uint64_t limit) const;

 private:
  ConstructionParams params_;
  AdmissibleSequence seq_;
};

/// High-precision layer: coordinates of T^i e_0, epsilon_n, f_n and the exact
/// action of the perturbed shift, all carried in Real.
template <class Real>
class Engine {
 public:
  using Sparse = std::map<std::size_t, Real>;

  Engine(std::shared_ptr<const Construction> c, std::size_t cap);

  [[nodiscard]] const Construction& construction() const { return *c_; }
  [[nodiscard]] std::size_t cap() const { return cap_; }
  [[nodiscard]] static Real weight(std::size_t i);
  /// prod_{m=from}^{to} w_m, 1 when from > to.
  [[nodiscard]] static Real weight_product(std::size_t from, std::size_t to);

  /// Coordinates of T^i e_0; throws Errc::truncation when i >= cap.
  [[nodiscard]] Sparse orbit(std::size_t i) const;
  [[nodiscard]] Sparse poly_applied(const Polynomial& P) const;
  [[nodiscard]] Real epsilon(std::size_t n) const;
  [[nodiscard]] Sparse f(std::size_t n) const;
  /// T x with indices >= N dropped; the modulus of dropped entries goes to *lost.
  [[nodiscard]] Sparse apply(const Sparse& x, std::size_t N, Real* lost = nullptr) const;
  [[nodiscard]] static Real l1(const Sparse& x);
  [[nodiscard]] static Real l2(const Sparse& x);

 private:
  void fill_to(std::size_t i) const;
  const std::pair<Real, Sparse>& column_special(std::size_t n) const;
  std::shared_ptr<const Construction> c_;
  std::size_t cap_;
  mutable std::recursive_mutex mu_;
  mutable std::deque<Sparse> memo_;
  mutable std::map<std::size_t, std::pair<Real, Sparse>> special_;
};

extern template class Engine<Real256>;
extern template class Engine<Real512>;
extern template class Engine<Real2048>;

struct EpsilonF {
  double epsilon = 0.0;
  Vector f;
};

[[nodiscard]] EpsilonF epsilon_f(const ConstructionParams& params, std::size_t n);

/// Double-precision view of the perturbed forward shift on indices < N.
class PerturbedShiftMap : public LinearMap {
 public:
  PerturbedShiftMap(std::shared_ptr<const Construction> c, std::size_t N);
  [[nodiscard]] std::size_t dim() const override { return N_; }
  [[nodiscard]] ApplyResult apply(const Vector& v) const override;
  [[nodiscard]] json describe() const override;
  [[nodiscard]] const std::shared_ptr<const Construction>& construction() const { return c_; }

 private:
  std::shared_ptr<const Construction> c_;
  std::size_t N_;
  std::map<std::size_t, Vector> special_;  // column b_n - 1 -> eps_n e_{b_n} + f_n
  double last_eps_ = 0.0;                  // eps_n when b_n = N
};

/// Throws Errc::non_ambiguity when some P_n with b_n <= N violates the degree
/// conditions, Errc::precondition when N < b_1 + 1.
[[nodiscard]] OperatorSpec build_operator(const ConstructionParams& params, std::size_t N);

[[nodiscard]] Vector orbit_vector_coords(const ConstructionParams& params, std::size_t i);

struct FBound {
  std::size_t n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  std::string lhs_text;  // 30 significant digits
};

/// lhs = ||f_n||_1 at Real precision, rhs the majorization bound with c from params.
/// Throws Errc::hypothesis unless ||f_k||_1 <= 1 for 1 <= k < n.
template <class Real>
[[nodiscard]] FBound check_f_bound(const Engine<Real>& engine, std::size_t n);
[[nodiscard]] FBound check_f_bound(const ConstructionParams& params, std::size_t n);

[[nodiscard]] double f_bound_rhs(const Polynomial& Pn, const Polynomial& Pprev, double log_b_prev, double c);

struct ClosureCheck {
  std::size_t n = 0;
  std::uint64_t b_n = 0;
  double relative_error = 0.0;
  bool pass = false;
};

/// Applies T b_n times to e_0 (2048-bit arithmetic) and compares with P_n(T)e_0 + e_{b_n}.
[[nodiscard]] ClosureCheck check_defining_relation(const std::shared_ptr<const Construction>& c, std::size_t n,
                                                   double tol = 1e-8);

struct DirectSumBuild {
  OperatorSpec op;
  DirectSumVector vector;
};

/// Blocks p = 2..p_max with the pow5 scheme and base params copied from `base`
/// (source, control, explicit table); vector block p is e_0 / p.
[[nodiscard]] DirectSumBuild build_direct_sum(int p_max, std::size_t N_per_block,
                                              const ConstructionParams& base = {});

/// Scripted repetition-block check: for Q-like data P^p_n = lambda P on blocks
/// p = 2..m+1, returns || (1/lambda) T^{b_n} v - P(T) v ||_2 with v = (+) e_0/p.
[[nodiscard]] double repetition_error(const std::vector<std::shared_ptr<const Construction>>& blocks, std::size_t n,
                                      const Rational& lambda, const Polynomial& P);

template <class Real>
[[nodiscard]] std::string decimal(const Real& x, int digits = 30);

}  // namespace grassdyn
