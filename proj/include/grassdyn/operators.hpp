#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "grassdyn/space.hpp"

namespace grassdyn {

struct ApplyResult {
  Vector value;
  /// Modulus of everything pushed past index N-1 by this call.
  double mass_lost = 0.0;
};

/// Operator whose action is supplied by another module (the perturbed
/// forward shift of the construction layer).
class LinearMap {
 public:
  virtual ~LinearMap() = default;
  [[nodiscard]] virtual std::size_t dim() const = 0;
  [[nodiscard]] virtual ApplyResult apply(const Vector& v) const = 0;
  [[nodiscard]] virtual json describe() const = 0;
};

class OperatorSpec;

struct DiagonalOp {
  std::vector<Scalar> lambda;
};

/// B e_0 = 0, B e_i = w_i e_{i-1}; weights[i-1] = w_i, unit when empty.
struct BackwardShiftOp {
  std::size_t dim = 0;
  std::vector<double> weights;
};

/// F e_i = w_{i+1} e_{i+1}; weights[i] = w_{i+1}, unit when empty.
/// The image of e_{N-1} is dropped and reported as lost mass.
struct ForwardShiftOp {
  std::size_t dim = 0;
  std::vector<double> weights;
};

/// a Id + B, the coefficient model of the adjoint of multiplication by a + z.
struct AdjointMultiplicationOp {
  std::size_t dim = 0;
  Scalar a;
};

struct ScaledOp {
  Scalar c;
  std::shared_ptr<const OperatorSpec> inner;
};

struct DirectSumOp {
  std::vector<OperatorSpec> blocks;
};

struct PerturbedForwardShiftOp {
  std::shared_ptr<const LinearMap> map;
};

class OperatorSpec {
 public:
  using Variant = std::variant<DiagonalOp, BackwardShiftOp, ForwardShiftOp, AdjointMultiplicationOp, ScaledOp,
                               DirectSumOp, PerturbedForwardShiftOp>;

  explicit OperatorSpec(Variant v);

  [[nodiscard]] const Variant& variant() const { return v_; }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::string kind() const;
  /// Block dimensions for a DirectSum, {dim()} otherwise.
  [[nodiscard]] std::vector<std::size_t> block_dims() const;

 private:
  Variant v_;
  std::size_t dim_ = 0;
};

[[nodiscard]] OperatorSpec diagonal(std::vector<Scalar> lambda);
[[nodiscard]] OperatorSpec backward_shift(std::size_t dim, std::vector<double> weights = {});
[[nodiscard]] OperatorSpec forward_shift(std::size_t dim, std::vector<double> weights = {});
[[nodiscard]] OperatorSpec adjoint_multiplication(Scalar a, std::size_t dim);
[[nodiscard]] OperatorSpec scaled(Scalar c, OperatorSpec inner);
[[nodiscard]] OperatorSpec direct_sum(std::vector<OperatorSpec> blocks);
[[nodiscard]] OperatorSpec perturbed_forward_shift(std::shared_ptr<const LinearMap> map);
[[nodiscard]] OperatorSpec identity(std::size_t dim);

[[nodiscard]] ApplyResult apply(const OperatorSpec& op, const Vector& v);
/// Blockwise action; op must be a DirectSum with matching block dimensions,
/// or a single operator acting on a one-block vector.
[[nodiscard]] DirectSumVector apply(const OperatorSpec& op, const DirectSumVector& v, double* mass_lost = nullptr);

inline constexpr std::size_t kDefaultMatrixCap = 4096;

[[nodiscard]] Eigen::MatrixXcd truncated_matrix(const OperatorSpec& op, std::size_t cap = kDefaultMatrixCap);

/// Power iteration on M^H M; returns the running maximum of ||M v|| over the
/// unit iterates, so the value is a lower bound and nondecreasing in iterations.
[[nodiscard]] double operator_norm_estimate(const OperatorSpec& op, int iterations,
                                            std::size_t cap = kDefaultMatrixCap);

struct SpectrumComponent {
  enum class Kind { point, disk, annulus };
  Kind kind = Kind::point;
  Scalar center;
  double r_in = 0.0;
  double r_out = 0.0;
};

struct SpectrumDescription {
  std::vector<SpectrumComponent> components;
};

[[nodiscard]] SpectrumDescription analytic_spectrum(const OperatorSpec& op);

/// Radial interval [lo, hi] of moduli attained by a component.
[[nodiscard]] std::pair<double, double> radial_interval(const SpectrumComponent& c);
[[nodiscard]] bool circle_intersects_all_components(const SpectrumDescription& s, double R);

/// Intersection of all radial intervals (points widened by 1e-12); nullopt when empty.
[[nodiscard]] std::optional<std::pair<double, double>> passing_radii(const SpectrumDescription& s);

/// (+S)^k (A tuple) == A ((+S)^k tuple) up to 1e-10 relative, where
/// (A tuple)_i = sum_j A_ij tuple_j.
[[nodiscard]] bool mixing_commutation_check(const OperatorSpec& S, const Eigen::MatrixXcd& A,
                                            const std::vector<Vector>& tuple, int k);

[[nodiscard]] json to_json(const SpectrumDescription& s);
[[nodiscard]] json to_json(const OperatorSpec& op);

}  // namespace grassdyn
