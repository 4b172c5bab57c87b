#include "grassdyn/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "grassdyn/config.hpp"
#include "grassdyn/construction.hpp"
#include "grassdyn/dynamics.hpp"
#include "grassdyn/error.hpp"
#include "grassdyn/functionals.hpp"

namespace grassdyn {

json to_json(const RunReport& r) {
  json j = payload(r);
  j["wall_clock_s"] = r.wall_clock_s;
  return j;
}

json payload(const RunReport& r) {
  return {{"schema", kReportSchema}, {"experiment", r.experiment}, {"config", r.config},
          {"seed", r.seed},          {"results", r.results},       {"pass", r.pass}};
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"orbit-density", "verify-construction", "claim-check", "phi-table",
                                              "summability",   "witness",             "spectrum-circles"};
  return names;
}

RunReport run_command(const std::string& name, const json& config, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r;
  if (name == "orbit-density") {
    r = cmd_orbit_density(config, seed);
  } else if (name == "verify-construction") {
    r = cmd_verify_construction(config, seed);
  } else if (name == "claim-check") {
    r = cmd_claim_check(config, seed);
  } else if (name == "phi-table") {
    r = cmd_phi_table(config, seed);
  } else if (name == "summability") {
    r = cmd_summability(config, seed);
  } else if (name == "witness") {
    r = cmd_witness(config, seed);
  } else if (name == "spectrum-circles") {
    r = cmd_spectrum_circles(config, seed);
  } else {
    throw Error(Errc::config, "unknown command '" + name + "'");
  }
  r.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace {

const json& object_or_empty(const json& j) {
  static const json empty = json::object();
  return j.is_null() ? empty : j;
}

// Construction fields shared by verify-construction, phi-table and summability.
ConstructionParams construction_from(const ConfigView& v, const std::string& default_scheme, json& resolved) {
  json cp = json::object();
  cp["p"] = v.get_int("p", 2);
  cp["scheme"] = v.get_string("scheme", default_scheme);
  const std::string src = cp["scheme"] == "pow5" ? "interleaved" : "classic";
  cp["source"] = v.get_string("source", src);
  if (v.has("c")) cp["c"] = v.get_double("c");
  if (v.has("explicit_polys")) cp["explicit_polys"] = v.raw("explicit_polys");
  if (v.has("explicit_control")) cp["explicit_control"] = v.raw("explicit_control");
  if (v.has("memo_cap")) cp["memo_cap"] = v.get_uint("memo_cap");
  if (cp["p"].get<int>() < 2) throw Error(Errc::precondition, "p must be >= 2");
  ConstructionParams params = construction_params_from_json(cp);
  json full = to_json(params);
  for (const auto& [k, x] : full.items()) resolved[k] = x;
  return params;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string trace_csv(const std::vector<OrbitTrace>& traces) {
  std::ostringstream os;
  os.precision(17);
  os << "target_id,k,distance\n";
  for (std::size_t t = 0; t < traces.size(); ++t) {
    for (const auto& [k, d] : traces[t].records) os << t << ',' << k << ',' << d << '\n';
  }
  return os.str();
}

json trace_summaries(const std::vector<OrbitTrace>& traces) {
  json out = json::array();
  for (std::size_t t = 0; t < traces.size(); ++t) {
    out.push_back({{"target_id", t},
                   {"argmin_k", traces[t].argmin_k},
                   {"min_distance", traces[t].min_distance},
                   {"length", traces[t].records.size()}});
  }
  return out;
}

// Drops coordinates below 1e-14 of the vector's norm; these come from rounding in the
// graph coordinates of a target supported on a coordinate block.
Vector clean(const Vector& v) {
  const double scale = l2_norm(v);
  Vector out(v.dim());
  for (const auto& [i, x] : v.coords()) {
    if (std::abs(x) > 1e-14 * scale) out.set(i, x);
  }
  return out;
}

}  // namespace

RunReport cmd_orbit_density(const json& config, std::uint64_t seed) {
  const ConfigView v(object_or_empty(config), "config");
  v.reject_unknown({"operator", "mode", "L", "x", "n", "targets", "support", "K", "threshold", "min_hit_fraction",
                    "expect", "U_radius", "V_radius", "samples", "exec"});
  RunReport rep;
  rep.experiment = "orbit-density";
  rep.seed = seed;
  json& rc = rep.config;
  rc["operator"] = v.raw("operator");
  const OperatorSpec op = operator_from_json(v.raw("operator"), v.field("operator"));
  const std::string mode = v.get_string("mode", "subspace");
  const std::size_t count = v.get_uint("targets", 20);
  const IndexRange support = v.get_range("support", {0, 8});
  const std::size_t K = v.get_uint("K", 2000);
  const double threshold = v.get_double("threshold", 0.15);
  const double min_hit = v.get_double("min_hit_fraction", 0.9);
  const std::string expect = v.get_string("expect", "dense");
  const Exec exec = v.get_string("exec", "parallel") == "serial" ? Exec::serial : Exec::parallel;
  if (expect != "dense" && expect != "sparse") throw Error(Errc::config, v.field("expect") + ": 'dense' or 'sparse'");
  if (!(threshold > 0.0)) throw Error(Errc::config, v.field("threshold") + ": must be > 0");
  if (support.end > op.dim() || support.empty()) throw Error(Errc::config, v.field("support") + ": outside the operator");
  rc["mode"] = mode;
  rc["targets"] = count;
  rc["support"] = {support.begin, support.end};
  rc["K"] = K;
  rc["threshold"] = threshold;
  rc["min_hit_fraction"] = min_hit;
  rc["expect"] = expect;
  rc["exec"] = exec == Exec::serial ? "serial" : "parallel";

  DensityReport dr;
  json extra = json::object();
  if (mode == "subspace") {
    const ConfigView L = v.child("L");
    rc["L"] = v.raw("L");
    const std::string kind = L.get_string("kind");
    if (kind == "backward_forward") {
      L.reject_unknown({"kind", "lambdas", "spacing", "start"});
      std::vector<Scalar> lambdas;
      const json& lj = L.raw("lambdas");
      if (!lj.is_array() || lj.empty()) throw Error(Errc::config, L.field("lambdas") + ": expected a nonempty array");
      for (std::size_t i = 0; i < lj.size(); ++i) lambdas.push_back(scalar_from_json(lj[i], L.field("lambdas")));
      const std::size_t n = lambdas.size();
      const std::size_t spacing = L.get_uint("spacing", 6);
      const std::size_t start = L.get_uint("start", 0);
      if (op.dim() <= n) throw Error(Errc::config, v.field("operator") + ": too small for the span construction");
      const std::size_t N = op.dim() - n;
      const auto targets = sample_targets(op.dim(), n, count, support, seed);
      std::vector<std::vector<Vector>> xs;
      const std::size_t fit = spacing == 0 || start >= N ? 0 : (N - start) / spacing;
      for (std::size_t t = 0; t < std::min(fit, targets.size()); ++t) {
        const auto g = graph_coordinates(targets[t], n);
        if (!g) throw Error(Errc::precondition, "target " + std::to_string(t) + " is not a graph over K^n");
        std::vector<Vector> row;
        for (const auto& x : *g) row.push_back(clean(x));
        xs.push_back(std::move(row));
      }
      const HypercyclicTuple ht = backward_forward_tuple(lambdas, N, xs, spacing, start);
      dr = score_against(op, span_construction(ht.y), targets, K, threshold, exec);
      extra["encoded_targets"] = xs.size();
      extra["times"] = ht.times;
      extra["recovered_tuple_error"] = recovered_tuple_error(lambdas, ht.y, targets, dr);
      rc["L"]["spacing"] = spacing;
      rc["L"]["start"] = start;
    } else if (kind == "vectors") {
      L.reject_unknown({"kind", "vectors"});
      const json& vj = L.raw("vectors");
      if (!vj.is_array() || vj.empty()) throw Error(Errc::config, L.field("vectors") + ": expected a nonempty array");
      std::vector<Vector> tuple;
      for (const auto& x : vj) tuple.push_back(vector_from_json(x));
      const Subspace Ls = pi_n(tuple);
      dr = strong_n_supercyclicity_score(op, Ls, Ls.n(), count, support, K, threshold, seed, exec);
    } else {
      throw Error(Errc::config, L.field("kind") + ": 'backward_forward' or 'vectors'");
    }
  } else if (mode == "vector" || mode == "projective") {
    const ConfigView X = v.child("x");
    rc["x"] = v.raw("x");
    const std::string kind = X.get_string("kind");
    std::vector<Vector> targets;
    for (std::size_t t = 0; t < count; ++t) targets.push_back(sample_vector(op.dim(), support, derive_seed(seed, t)));
    std::vector<Vector> seeds;
    if (kind == "backward_forward") {
      X.reject_unknown({"kind", "lambda", "spacing", "start"});
      const Scalar lambda = scalar_from_json(X.raw("lambda"), X.field("lambda"));
      const std::size_t spacing = X.get_uint("spacing", 8);
      const std::size_t start = X.get_uint("start", 0);
      rc["x"]["spacing"] = spacing;
      rc["x"]["start"] = start;
      std::vector<std::vector<Vector>> xs;
      const std::size_t fit = spacing == 0 || start >= op.dim() ? 0 : (op.dim() - start) / spacing;
      for (std::size_t t = 0; t < std::min(fit, count); ++t) xs.push_back({targets[t]});
      const HypercyclicTuple ht = backward_forward_tuple({lambda}, op.dim(), xs, spacing, start);
      seeds.assign(count, ht.y[0]);
      extra["encoded_targets"] = xs.size();
    } else if (kind == "vector") {
      X.reject_unknown({"kind", "vector"});
      seeds.assign(count, vector_from_json(X.raw("vector")));
    } else {
      throw Error(Errc::config, X.field("kind") + ": 'backward_forward' or 'vector'");
    }
    dr.targets = count;
    dr.threshold = threshold;
    dr.K = K;
    for (std::size_t t = 0; t < count; ++t) {
      dr.traces.push_back(mode == "vector" ? vector_orbit_min_distance(op, seeds[t], targets[t], K)
                                           : projective_orbit_min_distance(op, seeds[t], targets[t], K));
      if (dr.traces.back().min_distance < threshold) ++dr.hits;
    }
  } else if (mode == "transitivity") {
    const std::size_t n = v.get_uint("n", 1);
    const double ur = v.get_double("U_radius", 0.2);
    const double vr = v.get_double("V_radius", 0.2);
    const std::size_t samples = v.get_uint("samples", 8);
    rc["n"] = n;
    rc["U_radius"] = ur;
    rc["V_radius"] = vr;
    rc["samples"] = samples;
    dr.targets = count;
    dr.threshold = vr;
    dr.K = K;
    json found = json::array();
    for (std::size_t t = 0; t < count; ++t) {
      const std::uint64_t st = derive_seed(seed, t);
      std::vector<Vector> u, w;
      for (std::size_t i = 0; i < n; ++i) {
        u.push_back(sample_vector(op.dim(), support, derive_seed(st, 2 * i)));
        w.push_back(sample_vector(op.dim(), support, derive_seed(st, 2 * i + 1)));
      }
      const auto hit = transitivity_probe(op, n, pi_n(perturb_to_independent(u, 1e-6, derive_seed(st, 1000))), ur, w,
                                          vr, K, derive_seed(st, 2000), samples);
      if (hit) {
        ++dr.hits;
        found.push_back({{"target_id", t}, {"k", hit->k}, {"sample", hit->sample}, {"residual", hit->residual}});
      } else {
        found.push_back({{"target_id", t}, {"k", nullptr}});
      }
    }
    extra["found"] = found;
  } else {
    throw Error(Errc::config, v.field("mode") + ": one of subspace, vector, projective, transitivity");
  }
  rep.results = {{"targets", dr.targets},       {"hits", dr.hits}, {"hit_fraction", dr.hit_fraction()},
                 {"threshold", dr.threshold},   {"K", dr.K},       {"traces", trace_summaries(dr.traces)}};
  for (const auto& [k, x] : extra.items()) rep.results[k] = x;
  rep.pass = expect == "dense" ? dr.hit_fraction() >= min_hit : dr.hits == 0;
  rep.csv = trace_csv(dr.traces);
  return rep;
}

RunReport cmd_verify_construction(const json& config, std::uint64_t seed) {
  const ConfigView v(object_or_empty(config), "config");
  v.reject_unknown({"p", "scheme", "source", "c", "explicit_polys", "explicit_control", "memo_cap", "max_n",
                    "closure_max_b", "closure_tol"});
  RunReport rep;
  rep.experiment = "verify-construction";
  rep.seed = seed;
  json& rc = rep.config;
  ConstructionParams params = construction_from(v, "pow5", rc);
  const std::size_t max_n = v.get_uint("max_n", 5);
  const std::uint64_t closure_max_b = v.get_uint("closure_max_b", 700);
  const double closure_tol = v.get_double("closure_tol", 1e-8);
  if (max_n < 1) throw Error(Errc::config, v.field("max_n") + ": must be >= 1");
  params.memo_cap = std::max<std::size_t>(params.memo_cap, static_cast<std::size_t>(index_b(max_n, params.scheme, params.p)) + 1);
  rc["memo_cap"] = params.memo_cap;
  rc["max_n"] = max_n;
  rc["closure_max_b"] = closure_max_b;
  rc["closure_tol"] = closure_tol;

  auto c = std::make_shared<const Construction>(params);
  json out;
  bool pass = true;
  if (params.source != SourceKind::explicit_list || !params.explicit_control.empty()) {
    const auto u = params.explicit_control.empty() ? derive_control_sequence(params.scheme, params.p, max_n, params.c)
                                                   : params.explicit_control;
    out["control"] = u;
    const bool controlled = controlled_by(c->sequence(), u, std::min(max_n, u.size() - 1));
    out["controlled"] = controlled;
    pass = pass && controlled;
  } else {
    out["control"] = nullptr;
    out["controlled"] = nullptr;
  }
  c->validate_upto(c->b(max_n));
  Engine<Real256> e256(c, params.memo_cap);
  Engine<Real512> e512(c, params.memo_cap);
  json records = json::array();
  std::ostringstream csv;
  csv << "index,component,polynomial\n";
  const int component = params.source == SourceKind::interleaved ? params.p - 2 : 0;
  for (std::size_t n = 0; n <= max_n; ++n) {
    csv << n << ',' << component << ',' << csv_escape(c->P(n).str()) << '\n';
  }
  for (std::size_t n = 1; n <= max_n; ++n) {
    json r;
    r["n"] = n;
    r["b_n"] = c->b(n);
    r["P_n"] = to_json(c->P(n));
    const Real256 eps = e256.epsilon(n);
    r["eps_n"] = decimal(eps, 30);
    r["eps_le_1"] = eps <= 1;
    bool ok = eps <= 1;
    try {
      const FBound b256 = check_f_bound(e256, n);
      const FBound b512 = check_f_bound(e512, n);
      r["f_n_l1"] = b256.lhs_text;
      r["f_n_l1_512"] = b512.lhs_text;
      r["bound_rhs"] = b256.rhs;
      r["bound_pass"] = b256.pass;
      r["f_le_1"] = b256.lhs <= 1.0;
      const bool stable = b256.pass == b512.pass && (b256.lhs <= 1.0) == (b512.lhs <= 1.0);
      r["precision_stable"] = stable;
      ok = ok && b256.pass && b256.lhs <= 1.0 && stable;
    } catch (const Error& err) {
      if (err.code() != Errc::hypothesis) throw;
      r["error"] = err.what();
      ok = false;
    }
    if (c->b(n) <= closure_max_b) {
      const ClosureCheck cl = check_defining_relation(c, n, closure_tol);
      r["closure"] = {{"relative_error", cl.relative_error}, {"pass", cl.pass}};
      ok = ok && cl.pass;
    } else {
      r["closure"] = nullptr;
    }
    r["pass"] = ok;
    pass = pass && ok;
    records.push_back(r);
  }
  out["records"] = records;
  rep.results = out;
  rep.pass = pass;
  rep.csv = csv.str();
  return rep;
}

RunReport cmd_claim_check(const json& config, std::uint64_t seed) {
  const ConfigView v(object_or_empty(config), "config");
  v.reject_unknown({"max_p"});
  RunReport rep;
  rep.experiment = "claim-check";
  rep.seed = seed;
  const int max_p = v.get_int("max_p", 16);
  if (max_p < 2) throw Error(Errc::precondition, "claim-check: max_p must be >= 2");
  rep.config["max_p"] = max_p;
  json per = json::array();
  bool pass = true;
  std::ostringstream csv;
  csv << "p,pass\n";
  for (int p = 2; p <= max_p; ++p) {
    const bool ok = verify_claim(p);
    per.push_back({{"p", p}, {"pass", ok}});
    csv << p << ',' << (ok ? "true" : "false") << '\n';
    pass = pass && ok;
  }
  rep.results = {{"per_p", per}};
  rep.pass = pass;
  rep.csv = csv.str();
  return rep;
}

RunReport cmd_phi_table(const json& config, std::uint64_t seed) {
  const ConfigView v(object_or_empty(config), "config");
  v.reject_unknown({"p", "scheme", "source", "c", "explicit_polys", "explicit_control", "memo_cap", "delta", "max_i"});
  RunReport rep;
  rep.experiment = "phi-table";
  rep.seed = seed;
  json& rc = rep.config;
  const ConstructionParams params = construction_from(v, "pow2p1", rc);
  const std::size_t delta = v.get_uint("delta", 0);
  const std::size_t max_i = v.get_uint("max_i", 100);
  if (delta >= static_cast<std::size_t>(2 * params.p)) {
    throw Error(Errc::precondition, "phi-table: delta must be < 2p = " + std::to_string(2 * params.p));
  }
  rc["delta"] = delta;
  rc["max_i"] = max_i;
  const FunctionalTable t(params, delta);
  const bool kron = phi_kronecker_check(params);
  json values = json::array();
  std::ostringstream csv;
  csv << "i,delta,value\n";
  for (std::size_t i = 0; i <= max_i; ++i) {
    const std::string s = to_string(t.value(i));
    values.push_back(s);
    csv << i << ',' << delta << ',' << s << '\n';
  }
  rep.results = {{"offset_m", t.offset()},
                 {"window_end", t.window_end()},
                 {"kronecker_pass", kron},
                 {"max_depth", t.max_depth()},
                 {"values", values}};
  rep.pass = kron;
  rep.csv = csv.str();
  return rep;
}

RunReport cmd_summability(const json& config, std::uint64_t seed) {
  const ConfigView v(object_or_empty(config), "config");
  v.reject_unknown({"p", "scheme", "source", "c", "explicit_polys", "explicit_control", "memo_cap", "deltas", "R",
                    "window", "threshold", "grid_step", "criterion", "exec"});
  RunReport rep;
  rep.experiment = "summability";
  rep.seed = seed;
  json& rc = rep.config;
  const ConstructionParams params = construction_from(v, "pow5", rc);
  std::vector<std::size_t> deltas;
  if (v.has("deltas")) {
    const json& d = v.raw("deltas");
    if (!d.is_array() || d.empty()) throw Error(Errc::config, v.field("deltas") + ": expected a nonempty array");
    for (const auto& x : d) {
      if (!x.is_number_unsigned()) throw Error(Errc::config, v.field("deltas") + ": expected nonnegative integers");
      deltas.push_back(x.get<std::size_t>());
    }
  } else {
    for (std::size_t d = 0; d < static_cast<std::size_t>(2 * params.p); ++d) deltas.push_back(d);
  }
  const std::size_t R = v.get_uint("R", 800);
  const std::size_t window = v.get_uint("window", 200);
  const double threshold = v.get_double("threshold", 1e-3);
  const std::size_t step = v.get_uint("grid_step", 100);
  const bool criterion = v.get_bool("criterion", false);
  const Exec exec = v.get_string("exec", "parallel") == "serial" ? Exec::serial : Exec::parallel;
  if (window > R) throw Error(Errc::config, v.field("window") + ": must not exceed R");
  if (step == 0) throw Error(Errc::config, v.field("grid_step") + ": must be positive");
  rc["deltas"] = deltas;
  rc["R"] = R;
  rc["window"] = window;
  rc["threshold"] = threshold;
  rc["grid_step"] = step;
  rc["criterion"] = criterion;
  rc["exec"] = exec == Exec::serial ? "serial" : "parallel";

  std::vector<std::size_t> grid;
  for (std::size_t r = 0; r < R; r += step) grid.push_back(r);
  grid.push_back(R - window);
  grid.push_back(R);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto c = std::make_shared<const Construction>(params);
  json per = json::array();
  bool pass = true;
  std::ostringstream csv;
  csv.precision(17);
  csv << "delta,R,partial_sum\n";
  for (std::size_t d : deltas) {
    const FunctionalTable t(c, d);
    json sums = json::array();
    double prev = -1.0, at_r = 0.0, at_rw = 0.0;
    bool monotone = true;
    for (std::size_t r : grid) {
      const SummabilityResult s = summability_partial(t, r, exec);
      sums.push_back({{"R", r}, {"value", s.value}, {"value_text", s.value_text}});
      csv << d << ',' << r << ',' << s.value << '\n';
      if (s.value < prev) monotone = false;
      prev = s.value;
      if (r == R) at_r = s.value;
      if (r == R - window) at_rw = s.value;
    }
    const double inc = at_r - at_rw;
    const bool ok = monotone && inc < threshold;
    per.push_back({{"delta", d}, {"partial_sums", sums}, {"increment", inc}, {"monotone", monotone}, {"pass", ok}});
    pass = pass && ok;
  }
  rep.results = {{"per_delta", per}};
  if (criterion) {
    const CriterionReport cr = criterion_report(params, R, window, threshold);
    rep.results["criterion"] = to_json(cr);
    pass = pass && cr.valid;
  }
  rep.pass = pass;
  rep.csv = csv.str();
  return rep;
}

RunReport cmd_witness(const json& config, std::uint64_t seed) {
  const ConfigView v(object_or_empty(config), "config");
  RunReport rep;
  rep.experiment = "witness";
  rep.seed = seed;
  json& rc = rep.config;
  const std::string which = v.get_string("case");
  rc["case"] = which;
  if (which == "identity-block") {
    v.reject_unknown({"case", "n", "k_sub", "S", "K", "tol"});
    const json default_S = {{"variant", "scaled"},
                            {"params", {{"c", 2.0}, {"inner", {{"variant", "backward_shift"}, {"dim", 16}}}}}};
    const json Sj = v.has("S") ? v.raw("S") : default_S;
    const std::size_t n = v.get_uint("n", 2);
    const std::size_t k_sub = v.get_uint("k_sub", 1);
    const std::size_t K = v.get_uint("K", 500);
    const double tol = v.get_double("tol", 1e-12);
    rc["S"] = Sj;
    rc["n"] = n;
    rc["k_sub"] = k_sub;
    rc["K"] = K;
    rc["tol"] = tol;
    const ObstructionCertificate cert = identity_block_obstruction_witness(n, k_sub, operator_from_json(Sj, "config.S"), K, tol);
    rep.results = to_json(cert);
    rep.pass = cert.pass;
    std::ostringstream csv;
    csv.precision(17);
    csv << "target_id,k,distance\n";
    for (std::size_t k = 0; k < cert.distances.size(); ++k) csv << 0 << ',' << k << ',' << cert.distances[k] << '\n';
    rep.csv = csv.str();
  } else if (which == "sc-shift") {
    v.reject_unknown({"case", "lambda", "support", "samples", "K", "final_tol"});
    const Rational lambda = v.get_rational("lambda", Rational(1, 2));
    const IndexRange support = v.get_range("support", {0, 8});
    const std::size_t samples = v.get_uint("samples", 4);
    const std::size_t K = v.get_uint("K", 60);
    const double final_tol = v.get_double("final_tol", 1e-6);
    rc["lambda"] = to_string(lambda);
    rc["support"] = {support.begin, support.end};
    rc["samples"] = samples;
    rc["K"] = K;
    rc["final_tol"] = final_tol;
    const ScWitnessReport w = sc_criterion_witness(lambda, support, samples, K, seed, final_tol);
    rep.results = to_json(w);
    rep.pass = w.pass;
    std::ostringstream csv;
    csv.precision(17);
    csv << "pair,k,product,right_inverse\n";
    for (std::size_t i = 0; i < w.runs.size(); ++i) {
      for (const auto& r : w.runs[i]) csv << i << ',' << r.k << ',' << r.product << ',' << r.right_inverse << '\n';
    }
    rep.csv = csv.str();
  } else {
    throw Error(Errc::config, "unknown witness case '" + which + "' (expected identity-block or sc-shift)");
  }
  return rep;
}

RunReport cmd_spectrum_circles(const json& config, std::uint64_t seed) {
  const ConfigView v(object_or_empty(config), "config");
  v.reject_unknown({"operator", "grid", "expect"});
  RunReport rep;
  rep.experiment = "spectrum-circles";
  rep.seed = seed;
  json& rc = rep.config;
  rc["operator"] = v.raw("operator");
  const std::size_t grid = v.get_uint("grid", 1001);
  const std::string expect = v.get_string("expect", "any");
  if (expect != "any" && expect != "none" && expect != "nonempty") {
    throw Error(Errc::config, v.field("expect") + ": one of any, none, nonempty");
  }
  if (grid < 2) throw Error(Errc::config, v.field("grid") + ": must be >= 2");
  rc["grid"] = grid;
  rc["expect"] = expect;
  const OperatorSpec op = operator_from_json(v.raw("operator"), v.field("operator"));
  const SpectrumDescription s = analytic_spectrum(op);
  double rmax = 0.0;
  std::vector<double> boundary;
  for (const auto& comp : s.components) {
    const auto [lo, hi] = radial_interval(comp);
    boundary.push_back(lo);
    boundary.push_back(hi);
    rmax = std::max(rmax, hi);
  }
  rmax = rmax * 1.25 + 1.0;
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  json passing_boundary = json::array();
  for (double r : boundary) {
    if (circle_intersects_all_components(s, r)) passing_boundary.push_back(r);
  }
  std::size_t passing_grid = 0;
  json grid_pass = json::array();
  for (std::size_t i = 0; i < grid; ++i) {
    const double r = rmax * static_cast<double>(i) / static_cast<double>(grid - 1);
    if (circle_intersects_all_components(s, r)) {
      ++passing_grid;
      if (grid_pass.size() < 16) grid_pass.push_back(r);
    }
  }
  const auto interval = passing_radii(s);
  rep.results = {{"spectrum", to_json(s)},
                 {"scan_max", rmax},
                 {"passing_boundary_radii", passing_boundary},
                 {"passing_grid_count", passing_grid},
                 {"passing_grid_sample", grid_pass}};
  const bool none = !interval && passing_boundary.empty() && passing_grid == 0;
  if (none) {
    rep.results["interval"] = "none";
  } else if (interval) {
    rep.results["interval"] = {interval->first, interval->second};
  } else {
    rep.results["interval"] = nullptr;
  }
  rep.pass = expect == "any" || (expect == "none" && none) || (expect == "nonempty" && interval.has_value());
  std::ostringstream csv;
  csv.precision(17);
  csv << "radius,passes\n";
  for (double r : boundary) csv << r << ',' << circle_intersects_all_components(s, r) << '\n';
  rep.csv = csv.str();
  return rep;
}

}  // namespace grassdyn
