#include "grassdyn/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "grassdyn/error.hpp"

namespace grassdyn {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};

std::size_t compute_dim(const OperatorSpec::Variant& v) {
  return std::visit(
      overloaded{
          [](const DiagonalOp& d) { return d.lambda.size(); },
          [](const BackwardShiftOp& b) { return b.dim; },
          [](const ForwardShiftOp& f) { return f.dim; },
          [](const AdjointMultiplicationOp& a) { return a.dim; },
          [](const ScaledOp& s) { return s.inner->dim(); },
          [](const DirectSumOp& d) {
            std::size_t n = 0;
            for (const auto& b : d.blocks) n += b.dim();
            return n;
          },
          [](const PerturbedForwardShiftOp& p) { return p.map->dim(); },
      },
      v);
}

double weight_at(const std::vector<double>& w, std::size_t i) {
  if (w.empty()) return 1.0;
  return i < w.size() ? w[i] : 1.0;
}

void check_weights(const std::vector<double>& w) {
  for (double x : w) {
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(Errc::precondition, "shift weights must be strictly positive");
  }
}

json scalar_json(Scalar z) { return json::array({z.real(), z.imag()}); }

}  // namespace

OperatorSpec::OperatorSpec(Variant v) : v_(std::move(v)) { dim_ = compute_dim(v_); }

std::string OperatorSpec::kind() const {
  static const char* names[] = {"diagonal",        "backward_shift", "forward_shift",          "adjoint_multiplication",
                                "scaled",          "direct_sum",     "perturbed_forward_shift"};
  return names[v_.index()];
}

std::vector<std::size_t> OperatorSpec::block_dims() const {
  if (const auto* d = std::get_if<DirectSumOp>(&v_)) {
    std::vector<std::size_t> dims;
    for (const auto& b : d->blocks) dims.push_back(b.dim());
    return dims;
  }
  return {dim_};
}

OperatorSpec diagonal(std::vector<Scalar> lambda) { return OperatorSpec(DiagonalOp{std::move(lambda)}); }

OperatorSpec backward_shift(std::size_t dim, std::vector<double> weights) {
  check_weights(weights);
  if (!weights.empty() && dim > 0 && weights.size() < dim - 1) {
    throw Error(Errc::dimension_mismatch, "backward_shift: need at least N-1 weights");
  }
  return OperatorSpec(BackwardShiftOp{dim, std::move(weights)});
}

OperatorSpec forward_shift(std::size_t dim, std::vector<double> weights) {
  check_weights(weights);
  if (!weights.empty() && dim > 0 && weights.size() < dim - 1) {
    throw Error(Errc::dimension_mismatch, "forward_shift: need at least N-1 weights");
  }
  return OperatorSpec(ForwardShiftOp{dim, std::move(weights)});
}

OperatorSpec adjoint_multiplication(Scalar a, std::size_t dim) {
  return OperatorSpec(AdjointMultiplicationOp{dim, a});
}

OperatorSpec scaled(Scalar c, OperatorSpec inner) {
  if (c == Scalar{}) throw Error(Errc::precondition, "scaled: factor must be nonzero");
  return OperatorSpec(ScaledOp{c, std::make_shared<const OperatorSpec>(std::move(inner))});
}

OperatorSpec direct_sum(std::vector<OperatorSpec> blocks) { return OperatorSpec(DirectSumOp{std::move(blocks)}); }

OperatorSpec perturbed_forward_shift(std::shared_ptr<const LinearMap> map) {
  if (!map) throw Error(Errc::precondition, "perturbed_forward_shift: null map");
  return OperatorSpec(PerturbedForwardShiftOp{std::move(map)});
}

OperatorSpec identity(std::size_t dim) { return diagonal(std::vector<Scalar>(dim, Scalar(1.0))); }

ApplyResult apply(const OperatorSpec& op, const Vector& v) {
  if (v.dim() != op.dim()) {
    throw Error(Errc::dimension_mismatch, "apply: vector dimension " + std::to_string(v.dim()) +
                                              " does not match operator dimension " + std::to_string(op.dim()));
  }
  return std::visit(
      overloaded{
          [&](const DiagonalOp& d) {
            Vector out(v.dim());
            for (const auto& [i, x] : v.coords()) out.set(i, d.lambda[i] * x);
            return ApplyResult{std::move(out), 0.0};
          },
          [&](const BackwardShiftOp& b) {
            Vector out(v.dim());
            for (const auto& [i, x] : v.coords()) {
              if (i > 0) out.set(i - 1, weight_at(b.weights, i - 1) * x);
            }
            return ApplyResult{std::move(out), 0.0};
          },
          [&](const ForwardShiftOp& f) {
            Vector out(v.dim());
            double lost = 0.0;
            for (const auto& [i, x] : v.coords()) {
              Scalar y = weight_at(f.weights, i) * x;
              if (i + 1 < f.dim) {
                out.set(i + 1, y);
              } else {
                lost += std::abs(y);
              }
            }
            return ApplyResult{std::move(out), lost};
          },
          [&](const AdjointMultiplicationOp& a) {
            Vector out(v.dim());
            for (const auto& [i, x] : v.coords()) {
              out.set(i, out[i] + a.a * x);
              if (i > 0) out.set(i - 1, out[i - 1] + x);
            }
            return ApplyResult{std::move(out), 0.0};
          },
          [&](const ScaledOp& s) {
            ApplyResult r = apply(*s.inner, v);
            r.value *= s.c;
            r.mass_lost *= std::abs(s.c);
            return r;
          },
          [&](const DirectSumOp& d) {
            auto split = DirectSumVector::split(v, op.block_dims());
            double lost = 0.0;
            for (std::size_t b = 0; b < d.blocks.size(); ++b) {
              ApplyResult r = apply(d.blocks[b], split.blocks()[b]);
              split.blocks()[b] = std::move(r.value);
              lost += r.mass_lost;
            }
            return ApplyResult{split.concatenated(), lost};
          },
          [&](const PerturbedForwardShiftOp& p) { return p.map->apply(v); },
      },
      op.variant());
}

DirectSumVector apply(const OperatorSpec& op, const DirectSumVector& v, double* mass_lost) {
  const auto* d = std::get_if<DirectSumOp>(&op.variant());
  double lost = 0.0;
  std::vector<Vector> out;
  if (d == nullptr) {
    if (v.blocks().size() != 1) throw Error(Errc::dimension_mismatch, "apply: block count mismatch");
    ApplyResult r = apply(op, v.blocks()[0]);
    lost = r.mass_lost;
    out.push_back(std::move(r.value));
  } else {
    if (d->blocks.size() != v.blocks().size()) throw Error(Errc::dimension_mismatch, "apply: block count mismatch");
    for (std::size_t b = 0; b < d->blocks.size(); ++b) {
      ApplyResult r = apply(d->blocks[b], v.blocks()[b]);
      lost += r.mass_lost;
      out.push_back(std::move(r.value));
    }
  }
  if (mass_lost) *mass_lost = lost;
  return DirectSumVector(std::move(out));
}

Eigen::MatrixXcd truncated_matrix(const OperatorSpec& op, std::size_t cap) {
  const std::size_t n = op.dim();
  if (n > cap) {
    throw Error(Errc::cap_exceeded,
                "truncated_matrix: dimension " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    ApplyResult r = apply(op, Vector::basis(n, j));
    for (const auto& [i, x] : r.value.coords()) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x;
  }
  return m;
}

double operator_norm_estimate(const OperatorSpec& op, int iterations, std::size_t cap) {
  const Eigen::MatrixXcd m = truncated_matrix(op, cap);
  const auto n = m.cols();
  if (n == 0) return 0.0;
  std::mt19937_64 rng(derive_seed(0x6e6f726dULL, 0));
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  v.normalize();
  double best = (m * v).norm();
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXcd w = m.adjoint() * (m * v);
    double nw = w.norm();
    if (nw == 0.0) break;
    v = w / nw;
    best = std::max(best, (m * v).norm());
  }
  return best;
}

SpectrumDescription analytic_spectrum(const OperatorSpec& op) {
  return std::visit(
      overloaded{
          [](const DiagonalOp& d) {
            SpectrumDescription s;
            for (Scalar l : d.lambda) {
              bool seen = std::any_of(s.components.begin(), s.components.end(),
                                      [&](const SpectrumComponent& c) { return c.center == l; });
              if (!seen) s.components.push_back({SpectrumComponent::Kind::point, l, 0.0, 0.0});
            }
            return s;
          },
          [](const AdjointMultiplicationOp& a) {
            SpectrumDescription s;
            s.components.push_back({SpectrumComponent::Kind::disk, a.a, 0.0, 1.0});
            return s;
          },
          [](const ScaledOp& sc) {
            SpectrumDescription s = analytic_spectrum(*sc.inner);
            for (auto& c : s.components) {
              c.center *= sc.c;
              c.r_in *= std::abs(sc.c);
              c.r_out *= std::abs(sc.c);
            }
            return s;
          },
          [](const DirectSumOp& d) {
            SpectrumDescription s;
            for (const auto& b : d.blocks) {
              auto part = analytic_spectrum(b);
              s.components.insert(s.components.end(), part.components.begin(), part.components.end());
            }
            return s;
          },
          [](const auto&) -> SpectrumDescription {
            throw Error(Errc::unsupported, "no analytic spectrum available");
          },
      },
      op.variant());
}

std::pair<double, double> radial_interval(const SpectrumComponent& c) {
  const double m = std::abs(c.center);
  switch (c.kind) {
    case SpectrumComponent::Kind::point:
      return {m, m};
    case SpectrumComponent::Kind::disk:
      return {std::max(0.0, m - c.r_out), m + c.r_out};
    case SpectrumComponent::Kind::annulus:
      return {std::max({0.0, c.r_in - m, m - c.r_out}), m + c.r_out};
  }
  return {m, m};
}

bool circle_intersects_all_components(const SpectrumDescription& s, double R) {
  for (const auto& c : s.components) {
    auto [lo, hi] = radial_interval(c);
    double tol = c.kind == SpectrumComponent::Kind::point ? 1e-12 : 0.0;
    if (R < lo - tol || R > hi + tol) return false;
  }
  return true;
}

std::optional<std::pair<double, double>> passing_radii(const SpectrumDescription& s) {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& c : s.components) {
    auto [a, b] = radial_interval(c);
    double tol = c.kind == SpectrumComponent::Kind::point ? 1e-12 : 0.0;
    lo = std::max(lo, a - tol);
    hi = std::min(hi, b + tol);
  }
  if (lo > hi) return std::nullopt;
  return std::make_pair(std::max(lo, 0.0), hi);
}

bool mixing_commutation_check(const OperatorSpec& S, const Eigen::MatrixXcd& A, const std::vector<Vector>& tuple,
                              int k) {
  const auto p = static_cast<Eigen::Index>(tuple.size());
  if (A.rows() != p || A.cols() != p) throw Error(Errc::dimension_mismatch, "mixing matrix must be p x p");
  if (std::abs(A.determinant()) <= 1e-12) throw Error(Errc::singular, "mixing matrix is singular");
  auto mix = [&](const std::vector<Vector>& t) {
    std::vector<Vector> out;
    for (Eigen::Index i = 0; i < p; ++i) {
      Vector acc(S.dim());
      for (Eigen::Index j = 0; j < p; ++j) acc += A(i, j) * t[static_cast<std::size_t>(j)];
      out.push_back(std::move(acc));
    }
    return out;
  };
  auto iterate = [&](std::vector<Vector> t) {
    for (auto& x : t) {
      for (int s = 0; s < k; ++s) x = apply(S, x).value;
    }
    return t;
  };
  const auto lhs = iterate(mix(tuple));
  const auto rhs = mix(iterate(tuple));
  for (Eigen::Index i = 0; i < p; ++i) {
    const auto& a = lhs[static_cast<std::size_t>(i)];
    const auto& b = rhs[static_cast<std::size_t>(i)];
    double scale = std::max({l2_norm(a), l2_norm(b), 1e-300});
    if (l2_norm(a - b) > 1e-10 * scale) return false;
  }
  return true;
}

json to_json(const SpectrumDescription& s) {
  json out = json::array();
  for (const auto& c : s.components) {
    switch (c.kind) {
      case SpectrumComponent::Kind::point:
        out.push_back({{"kind", "point"}, {"value", scalar_json(c.center)}});
        break;
      case SpectrumComponent::Kind::disk:
        out.push_back({{"kind", "closed-disk"}, {"center", scalar_json(c.center)}, {"radius", c.r_out}});
        break;
      case SpectrumComponent::Kind::annulus:
        out.push_back(
            {{"kind", "annulus"}, {"center", scalar_json(c.center)}, {"r_in", c.r_in}, {"r_out", c.r_out}});
        break;
    }
  }
  return out;
}

json to_json(const OperatorSpec& op) {
  json params = std::visit(
      overloaded{
          [](const DiagonalOp& d) {
            json l = json::array();
            for (Scalar z : d.lambda) l.push_back(scalar_json(z));
            return json{{"lambda", l}};
          },
          [](const BackwardShiftOp& b) { return json{{"weights", b.weights}}; },
          [](const ForwardShiftOp& f) { return json{{"weights", f.weights}}; },
          [](const AdjointMultiplicationOp& a) { return json{{"a", scalar_json(a.a)}}; },
          [](const ScaledOp& s) { return json{{"c", scalar_json(s.c)}, {"inner", to_json(*s.inner)}}; },
          [](const DirectSumOp& d) {
            json b = json::array();
            for (const auto& x : d.blocks) b.push_back(to_json(x));
            return json{{"blocks", b}};
          },
          [](const PerturbedForwardShiftOp& p) { return p.map->describe(); },
      },
      op.variant());
  return {{"variant", op.kind()}, {"params", params}, {"dim", op.dim()}};
}

}  // namespace grassdyn
