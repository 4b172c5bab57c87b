#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "grassdyn/functionals.hpp"
#include "grassdyn/grassmann.hpp"
#include "grassdyn/operators.hpp"
#include "grassdyn/polynomial.hpp"
#include "grassdyn/space.hpp"

namespace grassdyn {

struct OrbitTrace {
  std::vector<std::pair<std::size_t, double>> records;  // (k, distance)
  std::size_t argmin_k = 0;
  double min_distance = 0.0;
  // subspace probes stop at the first k whose image loses dimension
  std::optional<std::size_t> dropped_at;
};

struct DensityReport {
  std::size_t targets = 0;
  std::size_t hits = 0;
  double threshold = 0.0;
  std::size_t K = 0;
  std::vector<OrbitTrace> traces;  // ordered by target index
  [[nodiscard]] double hit_fraction() const {
    return targets == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(targets);
  }
};

/// Distances ||T^k x - target||_2 for k = 0..K on raw iterates. Throws
/// Errc::leakage when an iterate loses more than 1e-9 ||T^k x|| past the truncation.
[[nodiscard]] OrbitTrace vector_orbit_min_distance(const OperatorSpec& op, const Vector& x, const Vector& target,
                                                   std::size_t K);

/// Gap between span(T^k x) and span(target), renormalizing every step.
/// Throws Errc::kernel_hit ("orbit hits kernel") when T^k x = 0.
[[nodiscard]] OrbitTrace projective_orbit_min_distance(const OperatorSpec& op, const Vector& x, const Vector& target,
                                                       std::size_t K);

/// grassmann_distance(push_forward^k(L), target), k = 0..K, iterating the truncated matrix.
[[nodiscard]] OrbitTrace subspace_orbit_min_distance(const OperatorSpec& op, const Subspace& L, const Subspace& target,
                                                     std::size_t K);
[[nodiscard]] OrbitTrace subspace_orbit_min_distance(const Eigen::MatrixXcd& m, const Subspace& L,
                                                     const Subspace& target, std::size_t K);

/// n-dimensional target subspaces sampled in `support`; target t uses seed stream derive_seed(seed, t).
[[nodiscard]] std::vector<Subspace> sample_targets(std::size_t dim, std::size_t n, std::size_t count,
                                                   IndexRange support, std::uint64_t seed);

/// Hit fraction of the orbit of L against sampled targets (threshold > 0).
[[nodiscard]] DensityReport strong_n_supercyclicity_score(const OperatorSpec& op, const Subspace& L, std::size_t n,
                                                          std::size_t targets, IndexRange support, std::size_t K,
                                                          double threshold, std::uint64_t seed,
                                                          Exec exec = Exec::parallel);
/// Same, against explicit targets.
[[nodiscard]] DensityReport score_against(const OperatorSpec& op, const Subspace& L,
                                          const std::vector<Subspace>& targets, std::size_t K, double threshold,
                                          Exec exec = Exec::parallel);

struct TransitivityHit {
  std::size_t k = 0;
  std::size_t sample = 0;
  double residual = 0.0;  // max_i ||(+T)^k x_i - v_i||
};

/// Samples frames in the U-ball (Gaussian perturbation, then a GL change of
/// basis), iterates (+T)^k and picks the GL mixing x = F G with (+T)^k x closest
/// to V in least squares. Returns the first k with every component inside the V-ball.
[[nodiscard]] std::optional<TransitivityHit> transitivity_probe(const OperatorSpec& op, std::size_t n,
                                                                const Subspace& U_center, double U_radius,
                                                                const std::vector<Vector>& V_center, double V_radius,
                                                                std::size_t K, std::uint64_t seed,
                                                                std::size_t samples = 8);

struct ScWitnessRecord {
  std::size_t k = 0;
  double product = 0.0;         // ||T^k x|| ||S_k y||
  bool right_inverse = false;   // T^k S_k y == y, exact rational arithmetic
};

struct ScWitnessReport {
  Rational lambda;
  IndexRange support;
  std::size_t K = 0;
  std::size_t samples = 0;
  std::size_t horizon = 0;  // end of support
  std::vector<std::vector<ScWitnessRecord>> runs;
  double max_tail_product = 0.0;
  double final_product = 0.0;
  bool right_inverse_exact = false;
  bool tail_monotone = false;
  bool pass = false;
};

/// T = B / lambda, S_k = lambda^k F^k on finitely supported vectors. Pairs:
/// (e_0, e_0), (e_3, e_2) and `samples` seeded pairs supported in `support`.
/// Throws Errc::hypothesis unless 0 < |lambda| < 1.
[[nodiscard]] ScWitnessReport sc_criterion_witness(const Rational& lambda, IndexRange support, std::size_t samples,
                                                   std::size_t K, std::uint64_t seed, double final_tol = 1e-6);

struct ObstructionCertificate {
  std::size_t n = 0;
  std::size_t k_sub = 0;
  std::size_t K = 0;
  double max_deviation = 0.0;  // max_k |distance - pi/2|
  std::vector<double> distances;
  bool pass = false;
};

/// T = Id on K^n (+) S; L = span{(e_i, s_i) : i < k_sub}; the target contains
/// e_{n-1}, which stays orthogonal to every T^k L. Throws Errc::precondition when k_sub >= n.
[[nodiscard]] ObstructionCertificate identity_block_obstruction_witness(std::size_t n, std::size_t k_sub,
                                                                        const OperatorSpec& S, std::size_t K,
                                                                        double tol = 1e-12);

/// Backward-forward seed for the shifts B / lambda_i: y_i[k_t + j] = lambda_i^{k_t} x_{t,i}[j]
/// with k_t = start + t * spacing. targets[t][i] must be supported below `spacing`.
struct HypercyclicTuple {
  std::vector<Vector> y;
  std::vector<std::size_t> times;
};
[[nodiscard]] HypercyclicTuple backward_forward_tuple(const std::vector<Scalar>& lambdas, std::size_t N,
                                                      const std::vector<std::vector<Vector>>& targets,
                                                      std::size_t spacing, std::size_t start);

/// The subspace M = span{(e_i, y_i)} in K^n (+) K^N.
[[nodiscard]] Subspace span_construction(const std::vector<Vector>& y);

/// Coordinates (x_1, ..., x_n) with target = span{(e_i, x_i)}; nullopt when the
/// projection onto K^n is not invertible. Each x_i has dimension dim - n.
[[nodiscard]] std::optional<std::vector<Vector>> graph_coordinates(const Subspace& target, std::size_t n);

/// Recovered tuple (B^k y_i / lambda_i^k) at the best k of each trace versus the
/// graph coordinates of each target; returns the max relative l2 error.
[[nodiscard]] double recovered_tuple_error(const std::vector<Scalar>& lambdas, const std::vector<Vector>& y,
                                           const std::vector<Subspace>& targets, const DensityReport& report);

[[nodiscard]] json to_json(const OrbitTrace& t);
[[nodiscard]] json to_json(const DensityReport& r);
[[nodiscard]] json to_json(const ScWitnessReport& r);
[[nodiscard]] json to_json(const ObstructionCertificate& c);

}  // namespace grassdyn
