#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "grassdyn/operators.hpp"
#include "grassdyn/space.hpp"

namespace grassdyn {

inline constexpr double kRankTolerance = 1e-10;

/// Point of the Grassmannian: an orthonormal N x n frame.
class Subspace {
 public:
  Subspace() = default;
  /// Takes ownership of a frame that already has orthonormal columns.
  explicit Subspace(Eigen::MatrixXcd frame);

  [[nodiscard]] const Eigen::MatrixXcd& frame() const { return frame_; }
  [[nodiscard]] std::size_t n() const { return static_cast<std::size_t>(frame_.cols()); }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(frame_.rows()); }

 private:
  Eigen::MatrixXcd frame_;
};

/// Columns of the returned matrix are the tuple vectors.
[[nodiscard]] Eigen::MatrixXcd tuple_matrix(const std::vector<Vector>& tuple);

/// Orthonormal frame of span(columns); throws Errc::rank_deficient
/// ("tuple not in X_n") when sigma_min < 1e-10 sigma_max.
[[nodiscard]] Subspace orthonormalize(const Eigen::MatrixXcd& columns);
[[nodiscard]] Subspace pi_n(const std::vector<Vector>& tuple);

/// Returns the tuple itself when it already passes pi_n, otherwise the tuple
/// plus coordinate noise of per-vector norm < eps, redrawn until independent.
[[nodiscard]] std::vector<Vector> perturb_to_independent(const std::vector<Vector>& tuple, double eps,
                                                         std::uint64_t seed, int max_retries = 64);

/// Largest principal angle, atan2(sigma_max((I - A A^H) B), sigma_min(A^H B)).
[[nodiscard]] double grassmann_distance(const Subspace& a, const Subspace& b);
/// All principal angles, ascending.
[[nodiscard]] std::vector<double> principal_angles(const Subspace& a, const Subspace& b);

/// Image of L under op (or under its truncated matrix), re-orthonormalized;
/// throws Errc::dimension_drop when the image has rank < n.
[[nodiscard]] Subspace push_forward(const OperatorSpec& op, const Subspace& L);
[[nodiscard]] Subspace push_forward(const Eigen::MatrixXcd& m, const Subspace& L);

/// Monte-Carlo estimate of sup_{z in F, |z|=1} inf_{x in E, |x|=1} |x - z|.
[[nodiscard]] double sphere_deviation(const Subspace& E, const Subspace& F, int samples, std::uint64_t seed);

[[nodiscard]] json to_json(const Subspace& s);
[[nodiscard]] Subspace subspace_from_json(const json& j);

}  // namespace grassdyn
