#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grassdyn/space.hpp"

namespace grassdyn {

inline constexpr const char* kReportSchema = "grassdyn/1";
inline constexpr std::uint64_t kDefaultSeed = 20240601;

struct RunReport {
  std::string experiment;
  json config;  // fully resolved, defaults filled in
  std::uint64_t seed = kDefaultSeed;
  json results;
  bool pass = false;
  double wall_clock_s = 0.0;
  std::string csv;  // command-specific CSV export, empty when none
};

/// Report JSON: schema, experiment, config, seed, results, pass, wall_clock_s.
[[nodiscard]] json to_json(const RunReport& r);
/// Same without the wall-clock field; byte-stable across reruns.
[[nodiscard]] json payload(const RunReport& r);

[[nodiscard]] const std::vector<std::string>& command_names();

/// Dispatches to one of the cmd_* functions below.
[[nodiscard]] RunReport run_command(const std::string& name, const json& config, std::uint64_t seed);

[[nodiscard]] RunReport cmd_orbit_density(const json& config, std::uint64_t seed);
[[nodiscard]] RunReport cmd_verify_construction(const json& config, std::uint64_t seed);
[[nodiscard]] RunReport cmd_claim_check(const json& config, std::uint64_t seed);
[[nodiscard]] RunReport cmd_phi_table(const json& config, std::uint64_t seed);
[[nodiscard]] RunReport cmd_summability(const json& config, std::uint64_t seed);
[[nodiscard]] RunReport cmd_witness(const json& config, std::uint64_t seed);
[[nodiscard]] RunReport cmd_spectrum_circles(const json& config, std::uint64_t seed);

}  // namespace grassdyn
