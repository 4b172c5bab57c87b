#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace grassdyn {

using Scalar = std::complex<double>;
using json = nlohmann::json;

/// Scalar field of an experiment. Real experiments keep every imaginary part
/// at exactly zero; the storage type is complex in both cases.
enum class Field { real, complex };

/// Half-open coordinate range [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  [[nodiscard]] std::size_t size() const { return end > begin ? end - begin : 0; }
  [[nodiscard]] bool empty() const { return size() == 0; }
};

/// Finitely supported coordinate sequence truncated to indices < dim.
/// Exact zeros are never stored.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim) : dim_(dim) {}

  static Vector basis(std::size_t dim, std::size_t index, Scalar value = 1.0);
  static Vector from_dense(std::span<const Scalar> values);
  static Vector from_dense(const Eigen::VectorXcd& values);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] Scalar operator[](std::size_t index) const;
  void set(std::size_t index, Scalar value);

  [[nodiscard]] const std::map<std::size_t, Scalar>& coords() const { return coords_; }
  [[nodiscard]] std::size_t support_size() const { return coords_.size(); }
  [[nodiscard]] bool is_zero() const { return coords_.empty(); }

  [[nodiscard]] Eigen::VectorXcd to_dense() const;

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(Scalar factor);

  friend Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
  friend Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
  friend Vector operator*(Scalar factor, Vector v) { return v *= factor; }
  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::size_t dim_ = 0;
  std::map<std::size_t, Scalar> coords_;
};

/// Element of an l2 direct sum; block p models the p-th summand.
class DirectSumVector {
 public:
  DirectSumVector() = default;
  explicit DirectSumVector(std::vector<Vector> blocks) : blocks_(std::move(blocks)) {}

  [[nodiscard]] const std::vector<Vector>& blocks() const { return blocks_; }
  [[nodiscard]] std::vector<Vector>& blocks() { return blocks_; }
  [[nodiscard]] std::size_t total_dim() const;

  /// Concatenation of the blocks into one vector of dimension total_dim().
  [[nodiscard]] Vector concatenated() const;
  [[nodiscard]] static DirectSumVector split(const Vector& flat, std::span<const std::size_t> block_dims);

 private:
  std::vector<Vector> blocks_;
};

[[nodiscard]] double l1_norm(const Vector& v);
[[nodiscard]] double l2_norm(const Vector& v);
[[nodiscard]] double l2_norm(const DirectSumVector& v);

/// Gaussian sample supported on `support`; bit-identical for a fixed seed.
/// Throws Errc::empty_support for an empty range.
[[nodiscard]] Vector sample_vector(std::size_t dim, IndexRange support, std::uint64_t seed,
                                   Field field = Field::real);

/// Seed derivation shared by every sampler in the library (splitmix64 step).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

[[nodiscard]] json to_json(const Vector& v);
[[nodiscard]] Vector vector_from_json(const json& j);
[[nodiscard]] json to_json(const DirectSumVector& v);

}  // namespace grassdyn
