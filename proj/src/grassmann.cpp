#include "grassdyn/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "grassdyn/error.hpp"

namespace grassdyn {

Subspace::Subspace(Eigen::MatrixXcd frame) : frame_(std::move(frame)) {
  if (frame_.cols() < 1 || frame_.cols() > frame_.rows()) {
    throw Error(Errc::precondition, "subspace dimension must satisfy 1 <= n <= N");
  }
}

Eigen::MatrixXcd tuple_matrix(const std::vector<Vector>& tuple) {
  if (tuple.empty()) throw Error(Errc::precondition, "empty tuple");
  const auto N = static_cast<Eigen::Index>(tuple.front().dim());
  Eigen::MatrixXcd m(N, static_cast<Eigen::Index>(tuple.size()));
  for (std::size_t j = 0; j < tuple.size(); ++j) {
    if (static_cast<Eigen::Index>(tuple[j].dim()) != N) throw Error(Errc::dimension_mismatch, "tuple dimensions differ");
    m.col(static_cast<Eigen::Index>(j)) = tuple[j].to_dense();
  }
  return m;
}

Subspace orthonormalize(const Eigen::MatrixXcd& columns) {
  if (columns.cols() < 1) throw Error(Errc::precondition, "empty tuple");
  if (columns.cols() > columns.rows()) throw Error(Errc::rank_deficient, "tuple not in X_n");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(columns);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0 || !(s[s.size() - 1] >= kRankTolerance * s[0])) {
    throw Error(Errc::rank_deficient, "tuple not in X_n");
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(columns);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(columns.rows(), columns.cols());
  return Subspace(std::move(q));
}

Subspace pi_n(const std::vector<Vector>& tuple) { return orthonormalize(tuple_matrix(tuple)); }

std::vector<Vector> perturb_to_independent(const std::vector<Vector>& tuple, double eps, std::uint64_t seed,
                                           int max_retries) {
  if (!(eps > 0.0)) throw Error(Errc::precondition, "perturbation radius must be positive");
  try {
    (void)pi_n(tuple);
    return tuple;
  } catch (const Error& e) {
    if (e.code() != Errc::rank_deficient) throw;
  }
  const std::size_t N = tuple.front().dim();
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::vector<Vector> out = tuple;
    for (std::size_t j = 0; j < out.size(); ++j) {
      Vector noise = sample_vector(N, {0, N}, derive_seed(seed, static_cast<std::uint64_t>(attempt) * 1024 + j));
      noise *= Scalar(0.5 * eps / l2_norm(noise));
      out[j] += noise;
    }
    try {
      (void)pi_n(out);
      return out;
    } catch (const Error& e) {
      if (e.code() != Errc::rank_deficient) throw;
    }
  }
  throw Error(Errc::retries_exhausted, "perturb_to_independent: no independent tuple found");
}

namespace {

// Fixed operand order so that d(a, b) and d(b, a) round identically.
bool frame_less(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
  const auto* p = reinterpret_cast<const double*>(x.data());
  const auto* q = reinterpret_cast<const double*>(y.data());
  return std::lexicographical_compare(p, p + 2 * x.size(), q, q + 2 * y.size());
}

}  // namespace

double grassmann_distance(const Subspace& a, const Subspace& b) {
  if (a.n() != b.n() || a.dim() != b.dim()) throw Error(Errc::dimension_mismatch, "subspace dimensions differ");
  const bool swap = frame_less(b.frame(), a.frame());
  const Eigen::MatrixXcd& A = swap ? b.frame() : a.frame();
  const Eigen::MatrixXcd& B = swap ? a.frame() : b.frame();
  const Eigen::MatrixXcd C = A.adjoint() * B;
  const Eigen::MatrixXcd R = B - A * C;
  const double cos_min = Eigen::JacobiSVD<Eigen::MatrixXcd>(C).singularValues().minCoeff();
  const double sin_max = Eigen::JacobiSVD<Eigen::MatrixXcd>(R).singularValues().maxCoeff();
  return std::atan2(sin_max, cos_min);
}

std::vector<double> principal_angles(const Subspace& a, const Subspace& b) {
  if (a.n() != b.n() || a.dim() != b.dim()) throw Error(Errc::dimension_mismatch, "subspace dimensions differ");
  const Eigen::MatrixXcd C = a.frame().adjoint() * b.frame();
  Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXcd>(C).singularValues();
  std::vector<double> out;
  for (Eigen::Index i = 0; i < s.size(); ++i) out.push_back(std::acos(std::clamp(s[i], 0.0, 1.0)));
  std::sort(out.begin(), out.end());
  return out;
}

Subspace push_forward(const Eigen::MatrixXcd& m, const Subspace& L) {
  if (m.cols() != static_cast<Eigen::Index>(L.dim())) throw Error(Errc::dimension_mismatch, "push_forward: dimension");
  try {
    return orthonormalize(m * L.frame());
  } catch (const Error& e) {
    if (e.code() == Errc::rank_deficient) throw Error(Errc::dimension_drop, "dimension drop under T");
    throw;
  }
}

Subspace push_forward(const OperatorSpec& op, const Subspace& L) {
  if (op.dim() != L.dim()) throw Error(Errc::dimension_mismatch, "push_forward: dimension");
  std::vector<Vector> cols;
  for (Eigen::Index j = 0; j < L.frame().cols(); ++j) {
    cols.push_back(apply(op, Vector::from_dense(Eigen::VectorXcd(L.frame().col(j)))).value);
  }
  try {
    return pi_n(cols);
  } catch (const Error& e) {
    if (e.code() == Errc::rank_deficient) throw Error(Errc::dimension_drop, "dimension drop under T");
    throw;
  }
}

double sphere_deviation(const Subspace& E, const Subspace& F, int samples, std::uint64_t seed) {
  if (E.n() != F.n() || E.dim() != F.dim()) throw Error(Errc::dimension_mismatch, "subspace dimensions differ");
  const auto n = static_cast<Eigen::Index>(F.n());
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXcd a(n);
    for (Eigen::Index i = 0; i < n; ++i) a[i] = g(rng);
    Eigen::VectorXcd z = F.frame() * a;
    z.normalize();
    // nearest unit vector of E is the normalized projection
    const Eigen::VectorXcd y = E.frame() * (E.frame().adjoint() * z);
    const double proj = y.norm();
    const double d = proj == 0.0 ? std::sqrt(2.0) : (z - y / proj).norm();
    worst = std::max(worst, d);
  }
  return worst;
}

json to_json(const Subspace& s) {
  json frame = json::array();
  for (Eigen::Index j = 0; j < s.frame().cols(); ++j) {
    for (Eigen::Index i = 0; i < s.frame().rows(); ++i) {
      const Scalar z = s.frame()(i, j);
      frame.push_back(json::array({z.real(), z.imag()}));
    }
  }
  return {{"n", s.n()}, {"dim", s.dim()}, {"frame", frame}};
}

Subspace subspace_from_json(const json& j) {
  const auto n = j.at("n").get<Eigen::Index>();
  const auto N = j.at("dim").get<Eigen::Index>();
  const auto& f = j.at("frame");
  if (static_cast<Eigen::Index>(f.size()) != n * N) throw Error(Errc::config, "subspace.frame: expected n*dim entries");
  Eigen::MatrixXcd m(N, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < N; ++r) {
      const auto& z = f[static_cast<std::size_t>(c * N + r)];
      m(r, c) = Scalar(z.at(0).get<double>(), z.at(1).get<double>());
    }
  }
  return orthonormalize(m);
}

}  // namespace grassdyn
