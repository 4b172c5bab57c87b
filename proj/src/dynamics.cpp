#include "grassdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "grassdyn/error.hpp"

namespace grassdyn {

namespace {

void record(OrbitTrace& t, std::size_t k, double d) {
  t.records.emplace_back(k, d);
  if (t.records.size() == 1 || d < t.min_distance) {
    t.min_distance = d;
    t.argmin_k = k;
  }
}

Subspace line(const Vector& v) {
  Eigen::VectorXcd d = v.to_dense();
  d /= d.norm();
  return Subspace(Eigen::MatrixXcd(d));
}

}  // namespace

OrbitTrace vector_orbit_min_distance(const OperatorSpec& op, const Vector& x, const Vector& target, std::size_t K) {
  if (x.dim() != op.dim() || target.dim() != op.dim()) {
    throw Error(Errc::dimension_mismatch, "vector orbit: dimensions of x, target and operator differ");
  }
  OrbitTrace t;
  Vector cur = x;
  for (std::size_t k = 0;; ++k) {
    record(t, k, l2_norm(cur - target));
    if (k == K) break;
    ApplyResult r = apply(op, cur);
    const double norm = l2_norm(r.value);
    if (r.mass_lost > 1e-9 * norm && r.mass_lost > 0.0) {
      throw Error(Errc::leakage, "truncation leakage at k = " + std::to_string(k + 1) + ": lost " +
                                     std::to_string(r.mass_lost) + " vs norm " + std::to_string(norm));
    }
    cur = std::move(r.value);
  }
  return t;
}

OrbitTrace projective_orbit_min_distance(const OperatorSpec& op, const Vector& x, const Vector& target, std::size_t K) {
  if (x.dim() != op.dim() || target.dim() != op.dim()) {
    throw Error(Errc::dimension_mismatch, "projective orbit: dimensions of x, target and operator differ");
  }
  if (x.is_zero() || target.is_zero()) throw Error(Errc::precondition, "projective orbit: x and target must be nonzero");
  const Subspace tgt = line(target);
  OrbitTrace t;
  Vector cur = x;
  cur *= 1.0 / l2_norm(cur);
  for (std::size_t k = 0;; ++k) {
    record(t, k, grassmann_distance(line(cur), tgt));
    if (k == K) break;
    cur = apply(op, cur).value;
    if (cur.is_zero()) throw Error(Errc::kernel_hit, "orbit hits kernel at k = " + std::to_string(k + 1));
    cur *= 1.0 / l2_norm(cur);
  }
  return t;
}

OrbitTrace subspace_orbit_min_distance(const Eigen::MatrixXcd& m, const Subspace& L, const Subspace& target,
                                       std::size_t K) {
  if (L.n() != target.n()) throw Error(Errc::dimension_mismatch, "subspace orbit: L.n != target.n");
  if (L.dim() != target.dim() || static_cast<std::size_t>(m.cols()) != L.dim()) {
    throw Error(Errc::dimension_mismatch, "subspace orbit: ambient dimensions differ");
  }
  OrbitTrace t;
  Subspace cur = L;
  for (std::size_t k = 0;; ++k) {
    record(t, k, grassmann_distance(cur, target));
    if (k == K) break;
    try {
      cur = push_forward(m, cur);
    } catch (const Error& e) {
      if (e.code() != Errc::dimension_drop) throw;
      t.dropped_at = k + 1;
      break;
    }
  }
  return t;
}

OrbitTrace subspace_orbit_min_distance(const OperatorSpec& op, const Subspace& L, const Subspace& target,
                                       std::size_t K) {
  return subspace_orbit_min_distance(truncated_matrix(op), L, target, K);
}

std::vector<Subspace> sample_targets(std::size_t dim, std::size_t n, std::size_t count, IndexRange support,
                                     std::uint64_t seed) {
  std::vector<Subspace> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    const std::uint64_t st = derive_seed(seed, t);
    std::vector<Vector> tuple;
    for (std::size_t i = 0; i < n; ++i) tuple.push_back(sample_vector(dim, support, derive_seed(st, i)));
    out.push_back(pi_n(perturb_to_independent(tuple, 1e-6, derive_seed(st, n))));
  }
  return out;
}

DensityReport score_against(const OperatorSpec& op, const Subspace& L, const std::vector<Subspace>& targets,
                            std::size_t K, double threshold, Exec exec) {
  if (!(threshold > 0.0)) throw Error(Errc::precondition, "threshold must be > 0");
  const Eigen::MatrixXcd m = truncated_matrix(op);
  DensityReport rep;
  rep.targets = targets.size();
  rep.threshold = threshold;
  rep.K = K;
  rep.traces.resize(targets.size());
  if (exec == Exec::parallel) {
    std::vector<std::exception_ptr> errs(targets.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(targets.size()); ++t) {
      const auto i = static_cast<std::size_t>(t);
      try {
        rep.traces[i] = subspace_orbit_min_distance(m, L, targets[i], K);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
    for (const auto& e : errs) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::size_t t = 0; t < targets.size(); ++t) rep.traces[t] = subspace_orbit_min_distance(m, L, targets[t], K);
  }
  for (const auto& tr : rep.traces) {
    if (tr.min_distance < threshold) ++rep.hits;
  }
  return rep;
}

DensityReport strong_n_supercyclicity_score(const OperatorSpec& op, const Subspace& L, std::size_t n,
                                            std::size_t targets, IndexRange support, std::size_t K, double threshold,
                                            std::uint64_t seed, Exec exec) {
  if (L.n() != n) throw Error(Errc::dimension_mismatch, "score: L must be n-dimensional");
  return score_against(op, L, sample_targets(op.dim(), n, targets, support, seed), K, threshold, exec);
}

std::optional<TransitivityHit> transitivity_probe(const OperatorSpec& op, std::size_t n, const Subspace& U_center,
                                                  double U_radius, const std::vector<Vector>& V_center,
                                                  double V_radius, std::size_t K, std::uint64_t seed,
                                                  std::size_t samples) {
  if (!(U_radius > 0.0) || !(V_radius > 0.0)) throw Error(Errc::precondition, "transitivity: radii must be > 0");
  if (U_center.n() != n || V_center.size() != n) throw Error(Errc::dimension_mismatch, "transitivity: n mismatch");
  const std::size_t N = op.dim();
  if (U_center.dim() != N) throw Error(Errc::dimension_mismatch, "transitivity: U dimension mismatch");
  const Eigen::MatrixXcd m = truncated_matrix(op);
  Eigen::MatrixXcd V(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (V_center[i].dim() != N) throw Error(Errc::dimension_mismatch, "transitivity: V dimension mismatch");
    V.col(static_cast<Eigen::Index>(i)) = V_center[i].to_dense();
  }
  std::optional<TransitivityHit> best;
  for (std::size_t s = 0; s < samples; ++s) {
    std::mt19937_64 rng(derive_seed(seed, s));
    std::normal_distribution<double> g(0.0, 1.0);
    auto gauss = [&](Eigen::Index r, Eigen::Index c) {
      Eigen::MatrixXcd G(r, c);
      for (Eigen::Index j = 0; j < c; ++j) {
        for (Eigen::Index i = 0; i < r; ++i) G(i, j) = g(rng);
      }
      return G;
    };
    Eigen::MatrixXcd F;
    double eta = U_radius / 4.0;
    for (int attempt = 0;; ++attempt) {
      Eigen::MatrixXcd noise = gauss(U_center.frame().rows(), U_center.frame().cols());
      F = U_center.frame() + eta * noise / noise.norm();
      if (grassmann_distance(orthonormalize(F), U_center) < U_radius) break;
      if (attempt > 60) throw Error(Errc::retries_exhausted, "transitivity: cannot sample inside the U-ball");
      eta /= 2.0;
    }
    Eigen::MatrixXcd A = gauss(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    A = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) + 0.25 * A / A.norm();
    Subspace cur = orthonormalize(F * A);
    const std::size_t kmax = best ? std::min(K, best->k) : K;
    for (std::size_t k = 0; k <= kmax; ++k) {
      const Eigen::MatrixXcd C = cur.frame().adjoint() * V;
      const Eigen::MatrixXcd R = V - cur.frame() * C;
      double worst = 0.0;
      for (Eigen::Index i = 0; i < R.cols(); ++i) worst = std::max(worst, R.col(i).norm());
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(C);
      const auto& sv = svd.singularValues();
      const bool invertible = sv(sv.size() - 1) > kRankTolerance * sv(0);
      if (worst < V_radius && invertible) {
        if (!best || k < best->k) best = TransitivityHit{k, s, worst};
        break;
      }
      if (k == kmax) break;
      try {
        cur = push_forward(m, cur);
      } catch (const Error& e) {
        if (e.code() != Errc::dimension_drop) throw;
        break;
      }
    }
  }
  return best;
}

ScWitnessReport sc_criterion_witness(const Rational& lambda, IndexRange support, std::size_t samples, std::size_t K,
                                     std::uint64_t seed, double final_tol) {
  if (lambda == 0 || abs(lambda) >= 1) {
    throw Error(Errc::hypothesis, "criterion hypotheses not satisfied by this model (need 0 < |lambda| < 1)");
  }
  if (support.empty()) throw Error(Errc::empty_support, "sc witness: empty support");
  ScWitnessReport rep;
  rep.lambda = lambda;
  rep.support = support;
  rep.K = K;
  rep.samples = samples;
  rep.horizon = std::max<std::size_t>(support.end, 4);
  const std::size_t N = rep.horizon + K + 1;
  const double lam = std::abs(lambda.get_d());

  std::vector<std::pair<Vector, Vector>> pairs;
  pairs.emplace_back(Vector::basis(N, 0), Vector::basis(N, 0));
  pairs.emplace_back(Vector::basis(N, 3), Vector::basis(N, 2));
  for (std::size_t s = 0; s < samples; ++s) {
    pairs.emplace_back(sample_vector(N, support, derive_seed(seed, 2 * s)),
                       sample_vector(N, support, derive_seed(seed, 2 * s + 1)));
  }
  rep.right_inverse_exact = true;
  rep.tail_monotone = true;
  for (const auto& [x, y] : pairs) {
    std::vector<ScWitnessRecord> run;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= K; ++k) {
      ScWitnessRecord r;
      r.k = k;
      // ||T^k x|| = |lambda|^-k ||B^k x||, ||S_k y|| = |lambda|^k ||y||
      double bx = 0.0;
      for (const auto& [i, v] : x.coords()) {
        if (i >= k) bx += std::norm(v);
      }
      const double tx = bx == 0.0 ? 0.0 : std::sqrt(bx) / std::pow(lam, static_cast<double>(k));
      const double sy = std::pow(lam, static_cast<double>(k)) * l2_norm(y);
      r.product = tx * sy;
      // exact rational evaluation of T^k S_k y
      using RVec = std::map<std::size_t, std::pair<Rational, Rational>>;
      RVec z;
      for (const auto& [j, v] : y.coords()) z[j] = {Rational(v.real()), Rational(v.imag())};
      for (std::size_t t = 0; t < k; ++t) {  // S_k = (lambda F)^k
        RVec w;
        for (const auto& [j, v] : z) w[j + 1] = {v.first * lambda, v.second * lambda};
        z = std::move(w);
      }
      for (std::size_t t = 0; t < k; ++t) {  // T = B / lambda, B e_0 = 0
        RVec w;
        for (const auto& [j, v] : z) {
          if (j > 0) w[j - 1] = {v.first / lambda, v.second / lambda};
        }
        z = std::move(w);
      }
      r.right_inverse = z.size() == y.coords().size();
      for (const auto& [j, v] : y.coords()) {
        auto it = z.find(j);
        if (it == z.end() || it->second.first != Rational(v.real()) || it->second.second != Rational(v.imag())) {
          r.right_inverse = false;
        }
      }
      rep.right_inverse_exact = rep.right_inverse_exact && r.right_inverse;
      if (k >= rep.horizon) {
        if (r.product > prev) rep.tail_monotone = false;
        rep.max_tail_product = std::max(rep.max_tail_product, r.product);
      }
      prev = r.product;
      run.push_back(r);
    }
    if (!run.empty()) rep.final_product = std::max(rep.final_product, run.back().product);
    rep.runs.push_back(std::move(run));
  }
  rep.pass = rep.right_inverse_exact && rep.tail_monotone && rep.final_product < final_tol;
  return rep;
}

ObstructionCertificate identity_block_obstruction_witness(std::size_t n, std::size_t k_sub, const OperatorSpec& S,
                                                          std::size_t K, double tol) {
  if (k_sub >= n) throw Error(Errc::precondition, "identity-block witness needs k_sub < n (not an obstruction case)");
  if (k_sub == 0) throw Error(Errc::precondition, "identity-block witness needs k_sub >= 1");
  const std::size_t m = S.dim();
  if (m < k_sub) throw Error(Errc::precondition, "identity-block witness: S is too small");
  const std::size_t dim = n + m;
  const OperatorSpec T = direct_sum({identity(n), S});
  std::vector<Vector> tuple;
  for (std::size_t i = 0; i < k_sub; ++i) {
    Vector v(dim);
    v.set(i, 1.0);
    v.set(n + m - 1 - i, 1.0);
    tuple.push_back(std::move(v));
  }
  std::vector<Vector> tgt{Vector::basis(dim, n - 1)};
  for (std::size_t j = 0; j + 1 < k_sub; ++j) tgt.push_back(Vector::basis(dim, n + j));
  const OrbitTrace tr = subspace_orbit_min_distance(T, pi_n(tuple), pi_n(tgt), K);
  ObstructionCertificate c;
  c.n = n;
  c.k_sub = k_sub;
  c.K = K;
  for (const auto& [k, d] : tr.records) {
    c.distances.push_back(d);
    c.max_deviation = std::max(c.max_deviation, std::abs(d - std::numbers::pi / 2));
  }
  c.pass = c.max_deviation <= tol;
  return c;
}

HypercyclicTuple backward_forward_tuple(const std::vector<Scalar>& lambdas, std::size_t N,
                                        const std::vector<std::vector<Vector>>& targets, std::size_t spacing,
                                        std::size_t start) {
  HypercyclicTuple out;
  for (std::size_t i = 0; i < lambdas.size(); ++i) out.y.emplace_back(N);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const std::size_t kt = start + t * spacing;
    out.times.push_back(kt);
    if (targets[t].size() != lambdas.size()) throw Error(Errc::dimension_mismatch, "tuple: target width mismatch");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const Scalar scale = std::pow(lambdas[i], static_cast<double>(kt));
      for (const auto& [j, v] : targets[t][i].coords()) {
        if (j >= spacing) throw Error(Errc::precondition, "tuple: target support must lie below the spacing");
        if (kt + j >= N) throw Error(Errc::truncation, "tuple: truncation too small for the requested targets");
        out.y[i].set(kt + j, scale * v);
      }
    }
  }
  return out;
}

Subspace span_construction(const std::vector<Vector>& y) {
  const std::size_t n = y.size();
  std::vector<Vector> tuple;
  for (std::size_t i = 0; i < n; ++i) {
    Vector v(n + y[i].dim());
    v.set(i, 1.0);
    for (const auto& [j, x] : y[i].coords()) v.set(n + j, x);
    tuple.push_back(std::move(v));
  }
  return pi_n(tuple);
}

std::optional<std::vector<Vector>> graph_coordinates(const Subspace& target, std::size_t n) {
  const Eigen::MatrixXcd& Q = target.frame();
  const auto nn = static_cast<Eigen::Index>(n);
  if (static_cast<std::size_t>(Q.cols()) != n) throw Error(Errc::dimension_mismatch, "graph: subspace is not n-dim");
  const Eigen::MatrixXcd top = Q.topRows(nn);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(top);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > kRankTolerance)) return std::nullopt;
  const Eigen::MatrixXcd X = Q * top.inverse();
  std::vector<Vector> out;
  for (Eigen::Index i = 0; i < nn; ++i) out.push_back(Vector::from_dense(Eigen::VectorXcd(X.col(i).tail(Q.rows() - nn))));
  return out;
}

double recovered_tuple_error(const std::vector<Scalar>& lambdas, const std::vector<Vector>& y,
                             const std::vector<Subspace>& targets, const DensityReport& report) {
  double worst = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto coords = graph_coordinates(targets[t], lambdas.size());
    if (!coords) return std::numeric_limits<double>::infinity();
    const std::size_t k = report.traces[t].argmin_k;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      Vector r(y[i].dim());
      for (const auto& [j, v] : y[i].coords()) {
        if (j >= k) r.set(j - k, v / std::pow(lambdas[i], static_cast<double>(k)));
      }
      const double ref = l2_norm((*coords)[i]);
      worst = std::max(worst, l2_norm(r - (*coords)[i]) / (ref > 0.0 ? ref : 1.0));
    }
  }
  return worst;
}

json to_json(const OrbitTrace& t) {
  json rec = json::array();
  for (const auto& [k, d] : t.records) rec.push_back({k, d});
  json j = {{"argmin_k", t.argmin_k}, {"min_distance", t.min_distance}, {"records", rec}};
  if (t.dropped_at) j["dropped_at"] = *t.dropped_at;
  return j;
}

json to_json(const DensityReport& r) {
  json traces = json::array();
  for (const auto& t : r.traces) traces.push_back(to_json(t));
  return {{"targets", r.targets}, {"hits", r.hits},   {"hit_fraction", r.hit_fraction()},
          {"threshold", r.threshold}, {"K", r.K}, {"traces", traces}};
}

json to_json(const ScWitnessReport& r) {
  json runs = json::array();
  for (const auto& run : r.runs) {
    json rr = json::array();
    for (const auto& x : run) rr.push_back({{"k", x.k}, {"product", x.product}, {"right_inverse", x.right_inverse}});
    runs.push_back(rr);
  }
  return {{"lambda", to_string(r.lambda)},
          {"support", {r.support.begin, r.support.end}},
          {"K", r.K},
          {"samples", r.samples},
          {"horizon", r.horizon},
          {"max_tail_product", r.max_tail_product},
          {"final_product", r.final_product},
          {"right_inverse_exact", r.right_inverse_exact},
          {"tail_monotone", r.tail_monotone},
          {"pass", r.pass},
          {"runs", runs}};
}

json to_json(const ObstructionCertificate& c) {
  return {{"n", c.n},
          {"k_sub", c.k_sub},
          {"K", c.K},
          {"max_deviation", c.max_deviation},
          {"distances", c.distances},
          {"pass", c.pass}};
}

}  // namespace grassdyn
