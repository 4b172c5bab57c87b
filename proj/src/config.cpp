#include "grassdyn/config.hpp"

#include <fstream>
#include <sstream>

#include "grassdyn/error.hpp"

namespace grassdyn {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::config, path + ": " + e.what());
  }
}

ConfigView::ConfigView(const json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) throw Error(Errc::config, path_ + ": expected an object");
}

const json& ConfigView::raw(const std::string& key) const {
  if (!j_.contains(key)) throw Error(Errc::config, field(key) + ": required field missing");
  return j_.at(key);
}

ConfigView ConfigView::child(const std::string& key) const { return ConfigView(raw(key), field(key)); }

std::uint64_t ConfigView::get_uint(const std::string& key) const {
  const json& v = raw(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw Error(Errc::config, field(key) + ": expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::uint64_t ConfigView::get_uint(const std::string& key, std::uint64_t def) const {
  return has(key) ? get_uint(key) : def;
}

int ConfigView::get_int(const std::string& key, int def) const {
  if (!has(key)) return def;
  const json& v = raw(key);
  if (!v.is_number_integer()) throw Error(Errc::config, field(key) + ": expected an integer");
  return v.get<int>();
}

double ConfigView::get_double(const std::string& key) const {
  const json& v = raw(key);
  if (!v.is_number()) throw Error(Errc::config, field(key) + ": expected a number");
  return v.get<double>();
}

double ConfigView::get_double(const std::string& key, double def) const { return has(key) ? get_double(key) : def; }

bool ConfigView::get_bool(const std::string& key, bool def) const {
  if (!has(key)) return def;
  const json& v = raw(key);
  if (!v.is_boolean()) throw Error(Errc::config, field(key) + ": expected true or false");
  return v.get<bool>();
}

std::string ConfigView::get_string(const std::string& key) const {
  const json& v = raw(key);
  if (!v.is_string()) throw Error(Errc::config, field(key) + ": expected a string");
  return v.get<std::string>();
}

std::string ConfigView::get_string(const std::string& key, const std::string& def) const {
  return has(key) ? get_string(key) : def;
}

IndexRange ConfigView::get_range(const std::string& key, IndexRange def) const {
  if (!has(key)) return def;
  const json& v = raw(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() || !v[1].is_number_unsigned()) {
    throw Error(Errc::config, field(key) + ": expected [begin, end]");
  }
  return {v[0].get<std::size_t>(), v[1].get<std::size_t>()};
}

Rational ConfigView::get_rational(const std::string& key, const Rational& def) const {
  if (!has(key)) return def;
  const json& v = raw(key);
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_string()) {
    try {
      return rational_from_string(v.get<std::string>());
    } catch (const Error&) {
    }
  }
  throw Error(Errc::config, field(key) + ": expected an integer or a rational string such as \"1/2\" or \"0.9\"");
}

void ConfigView::reject_unknown(std::initializer_list<const char*> known) const {
  for (const auto& [k, v] : j_.items()) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    if (!ok) throw Error(Errc::config, field(k) + ": unknown field");
  }
}

Scalar scalar_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw Error(Errc::config, path + ": expected a number or [re, im]");
}

namespace {

std::vector<double> weights_from(const ConfigView& p) {
  if (!p.has("weights")) return {};
  const json& w = p.raw("weights");
  if (!w.is_array()) throw Error(Errc::config, p.field("weights") + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : w) {
    if (!x.is_number()) throw Error(Errc::config, p.field("weights") + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

OperatorSpec operator_from_json(const json& j, const std::string& path) {
  ConfigView v(j, path);
  v.reject_unknown({"variant", "params", "dim"});
  const std::string variant = v.get_string("variant");
  static const json empty = json::object();
  const ConfigView p = v.has("params") ? v.child("params") : ConfigView(empty, v.field("params"));
  auto dim = [&] {
    const auto d = v.get_uint("dim");
    if (d == 0) throw Error(Errc::config, v.field("dim") + ": must be positive");
    return static_cast<std::size_t>(d);
  };
  if (variant == "diagonal") {
    p.reject_unknown({"lambda"});
    const json& l = p.raw("lambda");
    if (!l.is_array() || l.empty()) throw Error(Errc::config, p.field("lambda") + ": expected a nonempty array");
    std::vector<Scalar> lam;
    for (std::size_t i = 0; i < l.size(); ++i) lam.push_back(scalar_from_json(l[i], p.field("lambda") + "[" + std::to_string(i) + "]"));
    if (v.has("dim") && v.get_uint("dim") != lam.size()) throw Error(Errc::config, v.field("dim") + ": must equal the number of eigenvalues");
    return diagonal(std::move(lam));
  }
  if (variant == "backward_shift") {
    p.reject_unknown({"weights"});
    return backward_shift(dim(), weights_from(p));
  }
  if (variant == "forward_shift") {
    p.reject_unknown({"weights"});
    return forward_shift(dim(), weights_from(p));
  }
  if (variant == "adjoint_multiplication") {
    p.reject_unknown({"a"});
    return adjoint_multiplication(scalar_from_json(p.raw("a"), p.field("a")), dim());
  }
  if (variant == "scaled") {
    p.reject_unknown({"c", "inner"});
    return scaled(scalar_from_json(p.raw("c"), p.field("c")), operator_from_json(p.raw("inner"), p.field("inner")));
  }
  if (variant == "direct_sum") {
    p.reject_unknown({"blocks"});
    const json& b = p.raw("blocks");
    if (!b.is_array() || b.empty()) throw Error(Errc::config, p.field("blocks") + ": expected a nonempty array");
    std::vector<OperatorSpec> blocks;
    for (std::size_t i = 0; i < b.size(); ++i) {
      blocks.push_back(operator_from_json(b[i], p.field("blocks") + "[" + std::to_string(i) + "]"));
    }
    return direct_sum(std::move(blocks));
  }
  if (variant == "perturbed_forward_shift") {
    p.reject_unknown({"construction", "N"});
    ConstructionParams cp = p.has("construction") ? construction_params_from_json(p.raw("construction"))
                                                  : ConstructionParams{};
    return build_operator(cp, dim());
  }
  if (variant == "identity") return identity(dim());
  throw Error(Errc::config, v.field("variant") + ": unknown operator variant '" + variant + "'");
}

}  // namespace grassdyn
