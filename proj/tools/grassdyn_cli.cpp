#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "grassdyn/commands.hpp"
#include "grassdyn/config.hpp"
#include "grassdyn/error.hpp"

using grassdyn::json;

namespace {

struct Overrides {
  std::map<std::string, std::optional<long long>> ints;
  std::map<std::string, std::optional<double>> reals;
  std::map<std::string, std::optional<std::string>> strings;

  void apply(json& cfg) const {
    for (const auto& [k, v] : ints) {
      if (v) cfg[k] = *v;
    }
    for (const auto& [k, v] : reals) {
      if (v) cfg[k] = *v;
    }
    for (const auto& [k, v] : strings) {
      if (v) cfg[k] = *v;
    }
  }
};

void add_int(CLI::App* app, Overrides& o, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option(flag, o.ints[key], help);
}

void add_real(CLI::App* app, Overrides& o, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option(flag, o.reals[key], help);
}

void add_str(CLI::App* app, Overrides& o, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option(flag, o.strings[key], help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grassdyn: experiments on strongly n-supercyclic operators"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format = "json";
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "64-bit seed (default 20240601)");
  app.add_option("--out", out_path, "output file (stdout when omitted)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::map<std::string, Overrides> ov;
  auto* od = app.add_subcommand("orbit-density", "density probes for vector, projective and subspace orbits");
  add_str(od, ov["orbit-density"], "--mode", "mode", "subspace | vector | projective | transitivity");
  add_int(od, ov["orbit-density"], "--targets", "targets", "number of sampled targets");
  add_int(od, ov["orbit-density"], "--K", "K", "horizon");
  add_real(od, ov["orbit-density"], "--threshold", "threshold", "hit threshold");

  auto* vc = app.add_subcommand("verify-construction", "certificate for the perturbed forward shift");
  add_int(vc, ov["verify-construction"], "--p", "p", "p >= 2");
  add_str(vc, ov["verify-construction"], "--scheme", "scheme", "pow2p1 | pow5");
  add_str(vc, ov["verify-construction"], "--source", "source", "zero | classic | interleaved | explicit");
  add_int(vc, ov["verify-construction"], "--max-n", "max_n", "largest block index");

  auto* cc = app.add_subcommand("claim-check", "vanishing of the leading admissible polynomials");
  add_int(cc, ov["claim-check"], "--max-p", "max_p", "largest p");

  auto* pt = app.add_subcommand("phi-table", "exact table of a functional Phi_delta");
  add_int(pt, ov["phi-table"], "--p", "p", "p >= 2");
  add_str(pt, ov["phi-table"], "--scheme", "scheme", "pow2p1 | pow5");
  add_str(pt, ov["phi-table"], "--source", "source", "zero | classic | interleaved | explicit");
  add_int(pt, ov["phi-table"], "--delta", "delta", "0 <= delta < 2p");
  add_int(pt, ov["phi-table"], "--max-i", "max_i", "last index");

  auto* sm = app.add_subcommand("summability", "partial sums of |Phi(e_r . e_q)|");
  add_int(sm, ov["summability"], "--p", "p", "p >= 2");
  add_str(sm, ov["summability"], "--scheme", "scheme", "pow2p1 | pow5");
  add_str(sm, ov["summability"], "--source", "source", "zero | classic | interleaved | explicit");
  add_int(sm, ov["summability"], "--R", "R", "partial sum bound");
  add_int(sm, ov["summability"], "--window", "window", "tail window");
  add_real(sm, ov["summability"], "--threshold", "threshold", "tail threshold");
  bool criterion = false;
  sm->add_flag("--criterion", criterion, "also run the criterion report");

  auto* wt = app.add_subcommand("witness", "deterministic witnesses");
  add_str(wt, ov["witness"], "--case", "case", "identity-block | sc-shift");
  add_int(wt, ov["witness"], "--n", "n", "identity block size");
  add_int(wt, ov["witness"], "--k-sub", "k_sub", "subspace dimension");
  add_int(wt, ov["witness"], "--K", "K", "horizon");
  add_str(wt, ov["witness"], "--lambda", "lambda", "scalar of B / lambda, e.g. 1/2 or 0.9");

  auto* sc = app.add_subcommand("spectrum-circles", "circles meeting every spectral component");
  add_str(sc, ov["spectrum-circles"], "--expect", "expect", "any | none | nonempty");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    json cfg = config_path.empty() ? json::object() : grassdyn::load_json_file(config_path);
    if (!cfg.is_object()) throw grassdyn::Error(grassdyn::Errc::config, "config: expected a JSON object");
    std::uint64_t s = grassdyn::kDefaultSeed;
    if (cfg.contains("seed")) {
      if (!cfg["seed"].is_number_unsigned()) throw grassdyn::Error(grassdyn::Errc::config, "config.seed: expected an unsigned integer");
      s = cfg["seed"].get<std::uint64_t>();
      cfg.erase("seed");
    }
    if (seed) s = *seed;
    ov[name].apply(cfg);
    if (name == "summability" && criterion) cfg["criterion"] = true;

    const grassdyn::RunReport rep = grassdyn::run_command(name, cfg, s);
    const std::string text = format == "csv" ? rep.csv : grassdyn::to_json(rep).dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path);
      if (!out) throw grassdyn::Error(grassdyn::Errc::config, "cannot write '" + out_path + "'");
      out << text;
    }
    if (!rep.pass) std::cerr << name << ": pass=false\n";
    return rep.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
