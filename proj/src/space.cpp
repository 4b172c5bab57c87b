#include "grassdyn/space.hpp"

#include <cmath>
#include <random>

#include "grassdyn/error.hpp"

namespace grassdyn {

Vector Vector::basis(std::size_t dim, std::size_t index, Scalar value) {
  Vector v(dim);
  v.set(index, value);
  return v;
}

Vector Vector::from_dense(std::span<const Scalar> values) {
  Vector v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v.set(i, values[i]);
  return v;
}

Vector Vector::from_dense(const Eigen::VectorXcd& values) {
  Vector v(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) v.set(static_cast<std::size_t>(i), values[i]);
  return v;
}

Scalar Vector::operator[](std::size_t index) const {
  auto it = coords_.find(index);
  return it == coords_.end() ? Scalar{} : it->second;
}

void Vector::set(std::size_t index, Scalar value) {
  if (index >= dim_) {
    throw Error(Errc::dimension_mismatch, "coordinate index " + std::to_string(index) +
                                              " outside truncation " + std::to_string(dim_));
  }
  if (value == Scalar{}) {
    coords_.erase(index);
  } else {
    coords_[index] = value;
  }
}

Eigen::VectorXcd Vector::to_dense() const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim_));
  for (const auto& [i, x] : coords_) out[static_cast<Eigen::Index>(i)] = x;
  return out;
}

Vector& Vector::operator+=(const Vector& other) {
  if (other.dim_ != dim_) throw Error(Errc::dimension_mismatch, "vector dimensions differ");
  for (const auto& [i, x] : other.coords_) set(i, (*this)[i] + x);
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  if (other.dim_ != dim_) throw Error(Errc::dimension_mismatch, "vector dimensions differ");
  for (const auto& [i, x] : other.coords_) set(i, (*this)[i] - x);
  return *this;
}

Vector& Vector::operator*=(Scalar factor) {
  if (factor == Scalar{}) {
    coords_.clear();
    return *this;
  }
  for (auto& [i, x] : coords_) x *= factor;
  return *this;
}

std::size_t DirectSumVector::total_dim() const {
  std::size_t total = 0;
  for (const auto& b : blocks_) total += b.dim();
  return total;
}

Vector DirectSumVector::concatenated() const {
  Vector flat(total_dim());
  std::size_t offset = 0;
  for (const auto& b : blocks_) {
    for (const auto& [i, x] : b.coords()) flat.set(offset + i, x);
    offset += b.dim();
  }
  return flat;
}

DirectSumVector DirectSumVector::split(const Vector& flat, std::span<const std::size_t> block_dims) {
  std::size_t total = 0;
  for (auto d : block_dims) total += d;
  if (total != flat.dim()) throw Error(Errc::dimension_mismatch, "block dimensions do not add up");
  std::vector<Vector> blocks;
  blocks.reserve(block_dims.size());
  std::size_t offset = 0;
  for (auto d : block_dims) {
    Vector b(d);
    for (auto it = flat.coords().lower_bound(offset); it != flat.coords().end() && it->first < offset + d; ++it) {
      b.set(it->first - offset, it->second);
    }
    blocks.push_back(std::move(b));
    offset += d;
  }
  return DirectSumVector(std::move(blocks));
}

double l1_norm(const Vector& v) {
  double s = 0.0;
  for (const auto& [i, x] : v.coords()) s += std::abs(x);
  return s;
}

double l2_norm(const Vector& v) {
  // scaled accumulation so huge orbit coordinates do not overflow
  double scale = 0.0;
  for (const auto& [i, x] : v.coords()) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& [i, x] : v.coords()) s += std::norm(x / scale);
  return scale * std::sqrt(s);
}

double l2_norm(const DirectSumVector& v) {
  double s = 0.0;
  for (const auto& b : v.blocks()) {
    double n = l2_norm(b);
    s += n * n;
  }
  return std::sqrt(s);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Vector sample_vector(std::size_t dim, IndexRange support, std::uint64_t seed, Field field) {
  if (support.empty()) throw Error(Errc::empty_support, "empty support");
  if (support.end > dim) throw Error(Errc::dimension_mismatch, "support exceeds truncation");
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    Vector v(dim);
    for (std::size_t i = support.begin; i < support.end; ++i) {
      double re = gauss(rng);
      double im = field == Field::complex ? gauss(rng) : 0.0;
      v.set(i, Scalar(re, im));
    }
    if (!v.is_zero()) return v;
  }
}

json to_json(const Vector& v) {
  json coords = json::array();
  for (const auto& [i, x] : v.coords()) coords.push_back({i, x.real(), x.imag()});
  return {{"dim", v.dim()}, {"coords", coords}};
}

Vector vector_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("coords")) {
    throw Error(Errc::config, "vector: expected object with fields 'dim' and 'coords'");
  }
  Vector v(j.at("dim").get<std::size_t>());
  for (const auto& entry : j.at("coords")) {
    if (!entry.is_array() || entry.size() < 2 || entry.size() > 3) {
      throw Error(Errc::config, "vector.coords: each entry must be [index, re] or [index, re, im]");
    }
    double im = entry.size() == 3 ? entry[2].get<double>() : 0.0;
    v.set(entry[0].get<std::size_t>(), Scalar(entry[1].get<double>(), im));
  }
  return v;
}

json to_json(const DirectSumVector& v) {
  json blocks = json::array();
  for (const auto& b : v.blocks()) blocks.push_back(to_json(b));
  return {{"blocks", blocks}};
}

}  // namespace grassdyn
