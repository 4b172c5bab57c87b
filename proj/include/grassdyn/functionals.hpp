#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "grassdyn/construction.hpp"

namespace grassdyn {

enum class Exec { serial, parallel };

/// Exact values Phi_delta(T^i e_0), filled on demand.
class FunctionalTable {
 public:
  /// Throws Errc::precondition unless 0 <= delta < 2p.
  FunctionalTable(ConstructionParams params, std::size_t delta);
  FunctionalTable(std::shared_ptr<const Construction> c, std::size_t delta);

  [[nodiscard]] const Construction& construction() const { return *c_; }
  [[nodiscard]] std::shared_ptr<const Construction> construction_ptr() const { return c_; }
  [[nodiscard]] std::size_t delta() const { return delta_; }
  /// m of the base window [0, b_m - 1].
  [[nodiscard]] std::size_t offset() const { return m_; }
  [[nodiscard]] std::uint64_t window_end() const { return window_end_; }

  [[nodiscard]] Rational value(std::size_t i) const;
  /// Fills the memo through index i; afterwards value_unchecked(j) is safe for j <= i.
  void ensure(std::size_t i) const;
  [[nodiscard]] const Rational& value_unchecked(std::size_t i) const { return memo_[i]; }
  /// Largest number of nested unfoldings seen so far.
  [[nodiscard]] std::size_t max_depth() const { return max_depth_; }

 private:
  void init();
  std::shared_ptr<const Construction> c_;
  std::size_t delta_;
  std::size_t m_ = 1;
  std::uint64_t window_end_ = 0;
  mutable std::mutex mu_;
  mutable std::vector<Rational> memo_;
  mutable std::vector<std::size_t> depth_;
  mutable std::size_t max_depth_ = 0;
};

/// Minimal m with b_{m-1} < 2p < b_m (pow5), 1 for pow2p1.
[[nodiscard]] std::size_t window_offset(IndexScheme scheme, int p);

[[nodiscard]] Rational phi_value(const FunctionalTable& t, std::size_t i);
[[nodiscard]] Rational phi_on_polynomial(const FunctionalTable& t, const Polynomial& P);
[[nodiscard]] Polynomial model_product(const Polynomial& P, const Polynomial& Q);

/// Kronecker property on the base window for every delta in 0..2p-1, together with
/// P_n = 0 for n < m so that no block inside the window carries a polynomial.
[[nodiscard]] bool phi_kronecker_check(const ConstructionParams& params);

/// (X^{b_k} - P_k)(X^{b_l} - P_l) X^{u+v}.
[[nodiscard]] Polynomial y_polynomial(const Construction& c, std::size_t k, std::size_t u, std::size_t l,
                                      std::size_t v);
/// Phi_delta of the y element; throws Errc::precondition unless k <= l,
/// u < b_{k+1} - b_k and v < b_{l+1} - b_l.
[[nodiscard]] Rational y_value(const FunctionalTable& t, std::size_t k, std::size_t u, std::size_t l,
                               std::size_t v);
[[nodiscard]] Rational m_l_bound(const ConstructionParams& params, std::size_t l);
[[nodiscard]] Rational m_l_bound(const Construction& c, std::size_t l);

struct SummabilityResult {
  std::size_t R = 0;
  double value = 0.0;
  std::string value_text;
  std::vector<double> row_sums;  // row r: sum over q <= R of |Phi(e_r e_q)|
};

/// sum_{r, q <= R} |Phi_delta(e_r . e_q)|; throws Errc::cap_exceeded when 2R exceeds the cap.
[[nodiscard]] SummabilityResult summability_partial(const FunctionalTable& t, std::size_t R,
                                                    Exec exec = Exec::parallel, std::size_t cap = 20000);

struct PsiSpot {
  std::string form;  // "Psi" or "Psi~"
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t power = 0;
  Rational value;
};

struct CriterionEntry {
  int h = 0;
  bool kronecker_pass = false;
  double summability_tail = 0.0;
  bool summability_pass = false;
  std::string verdict;
  std::vector<PsiSpot> spots;
};

struct CriterionReport {
  ConstructionParams params;
  bool protected_prefix_pass = false;
  bool vanishing_pass = false;
  bool valid = false;
  std::size_t R = 0;
  std::size_t window = 200;
  double tail_threshold = 1e-3;
  std::vector<CriterionEntry> entries;
};

/// Hypothesis check of the non-strong-h-supercyclicity criterion for h = 2..p.
[[nodiscard]] CriterionReport criterion_report(const ConstructionParams& params, std::size_t R = 800,
                                               std::size_t window = 200, double tail_threshold = 1e-3);

struct VanishingResult {
  bool pass = true;
  std::size_t checked = 0;
  // first counterexample (k, u, l, v) and its y-value
  std::size_t k = 0, u = 0, l = 0, v = 0;
  Rational y;
};

/// Exhaustive vanishing check: y = 0 for k <= l, l_min <= l <= l_max and u + v < b_l / 6.
[[nodiscard]] VanishingResult vanishing_exhaustive(const FunctionalTable& t, std::size_t l_max, std::size_t l_min = 0);

[[nodiscard]] json to_json(const CriterionReport& r);

}  // namespace grassdyn
