#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>

#include "grassdyn/construction.hpp"
#include "grassdyn/operators.hpp"
#include "grassdyn/space.hpp"

namespace grassdyn {

/// Reads a JSON document; parse errors carry line and column.
[[nodiscard]] json load_json_file(const std::string& path);

/// Typed access to one JSON object with field-path diagnostics.
class ConfigView {
 public:
  ConfigView(const json& j, std::string path);

  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }
  [[nodiscard]] const json& raw(const std::string& key) const;
  [[nodiscard]] ConfigView child(const std::string& key) const;
  [[nodiscard]] std::string field(const std::string& key) const { return path_ + "." + key; }

  [[nodiscard]] std::uint64_t get_uint(const std::string& key) const;
  [[nodiscard]] std::uint64_t get_uint(const std::string& key, std::uint64_t def) const;
  [[nodiscard]] int get_int(const std::string& key, int def) const;
  [[nodiscard]] double get_double(const std::string& key) const;
  [[nodiscard]] double get_double(const std::string& key, double def) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool def) const;
  [[nodiscard]] std::string get_string(const std::string& key) const;
  [[nodiscard]] std::string get_string(const std::string& key, const std::string& def) const;
  [[nodiscard]] IndexRange get_range(const std::string& key, IndexRange def) const;
  [[nodiscard]] Rational get_rational(const std::string& key, const Rational& def) const;

  /// Throws Errc::config naming the first field not in `known`.
  void reject_unknown(std::initializer_list<const char*> known) const;

 private:
  const json& j_;
  std::string path_;
};

[[nodiscard]] Scalar scalar_from_json(const json& j, const std::string& path);
[[nodiscard]] OperatorSpec operator_from_json(const json& j, const std::string& path = "operator");

}  // namespace grassdyn
