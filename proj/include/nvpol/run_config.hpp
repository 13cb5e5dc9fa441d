#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nvpol/constants.hpp"
#include "nvpol/environment.hpp"
#include "nvpol/errors.hpp"
#include "nvpol/grid.hpp"
#include "nvpol/io.hpp"
#include "nvpol/lattice.hpp"

namespace nvpol {

struct GridSpec {
  GridKind kind = GridKind::t_prime;
  double t_max_us = 1600.0;
  double dt_us = 0.1;  // continuous kind only
  long n_start = 0;
};

struct IoSpec {
  std::string out_dir = "out";
};

// One file describing a whole run; everything has a default, unknown keys
// are rejected everywhere, and outputs echo the resolved struct back so a
// run can be replayed from any of its products.
struct RunConfig {
  std::uint64_t seed = 1;
  PhysicalConstants constants;
  LatticeConfig lattice;
  std::vector<double> fields_t = {1.0};
  PolarizationSpec polarization;
  GridSpec grid;
  IoSpec io;

  void validate() const {
    constants.validate();
    lattice.validate();
    if (fields_t.empty()) throw ValidationError("config: fields_T must be non-empty");
    for (double b : fields_t)
      if (!(b > 0)) throw ValidationError("config: every field must be positive");
    if (!(grid.t_max_us > 0)) throw ValidationError("config: grid.t_max_us must be positive");
    if (grid.kind == GridKind::continuous && !(grid.dt_us > 0))
      throw ValidationError("config: grid.dt_us must be positive for the continuous kind");
    if (grid.n_start < 0) throw ValidationError("config: grid.n_start must be >= 0");
  }
};

namespace config_detail {

inline LatticeConfig lattice_from_json(const json& j, std::uint64_t seed) {
  LatticeConfig cfg;
  cfg.seed = seed;
  for (const auto& [key, value] : j.items()) {
    if (key == "supercell_radius_nm") cfg.supercell_radius_nm = value.get<double>();
    else if (key == "abundance") cfg.abundance = value.get<double>();
    else if (key == "max_spins") cfg.max_spins = value.get<int>();
    else if (key == "selection_rule")
      cfg.selection_rule = selection_rule_from_string(value.get<std::string>());
    else if (key == "exclusion_radius_nm") cfg.exclusion_radius_nm = value.get<double>();
    else if (key == "seed")
      throw ValidationError("config: lattice.seed is not accepted, use the top-level seed");
    else throw ValidationError("config: unknown lattice key '" + key + "'");
  }
  return cfg;
}

inline GridSpec grid_from_json(const json& j) {
  GridSpec g;
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") g.kind = grid_kind_from_string(value.get<std::string>());
    else if (key == "t_max_us") g.t_max_us = value.get<double>();
    else if (key == "dt_us") g.dt_us = value.get<double>();
    else if (key == "n_start") g.n_start = value.get<long>();
    else throw ValidationError("config: unknown grid key '" + key + "'");
  }
  return g;
}

inline PolarizationSpec polarization_from_json(const json& j) {
  PolarizationSpec spec;
  if (j.is_number()) {
    spec.uniform = j.get<double>();
  } else if (j.is_array()) {
    for (const auto& v : j) spec.per_spin.push_back(v.get<double>());
  } else {
    throw ValidationError("config: polarization must be a number or an array");
  }
  return spec;
}

}  // namespace config_detail

inline RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") continue;  // read first so the lattice section sees it
    else if (key == "constants") cfg.constants = constants_from_json(value);
    else if (key == "lattice") cfg.lattice = config_detail::lattice_from_json(value, cfg.seed);
    else if (key == "fields_T") {
      cfg.fields_t.clear();
      for (const auto& v : value) cfg.fields_t.push_back(v.get<double>());
    } else if (key == "polarization")
      cfg.polarization = config_detail::polarization_from_json(value);
    else if (key == "grid") cfg.grid = config_detail::grid_from_json(value);
    else if (key == "io") {
      for (const auto& [ik, iv] : value.items()) {
        if (ik == "out_dir") cfg.io.out_dir = iv.get<std::string>();
        else throw ValidationError("config: unknown io key '" + ik + "'");
      }
    } else {
      throw ValidationError("config: unknown key '" + key + "'");
    }
  }
  cfg.lattice.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

inline RunConfig parse_run_config(const std::string& text) {
  return run_config_from_json(parse_json(text, "run config"));
}

// fully resolved echo, embedded in every output this config produced
inline json run_config_to_json(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["constants"] = constants_to_json(cfg.constants);
  json lat;
  lat["supercell_radius_nm"] = io_detail::num(cfg.lattice.supercell_radius_nm);
  lat["abundance"] = io_detail::num(cfg.lattice.abundance);
  lat["max_spins"] = cfg.lattice.max_spins;
  lat["selection_rule"] = to_string(cfg.lattice.selection_rule);
  lat["exclusion_radius_nm"] = io_detail::num(cfg.lattice.exclusion_radius_nm);
  j["lattice"] = lat;
  j["fields_T"] = json::array();
  for (double b : cfg.fields_t) j["fields_T"].push_back(io_detail::num(b));
  if (cfg.polarization.uniform) {
    j["polarization"] = io_detail::num(*cfg.polarization.uniform);
  } else if (!cfg.polarization.per_spin.empty()) {
    j["polarization"] = json::array();
    for (double p : cfg.polarization.per_spin) j["polarization"].push_back(io_detail::num(p));
  } else {
    j["polarization"] = 0.0;
  }
  json grid;
  grid["kind"] = to_string(cfg.grid.kind);
  grid["t_max_us"] = io_detail::num(cfg.grid.t_max_us);
  if (cfg.grid.kind == GridKind::continuous) grid["dt_us"] = io_detail::num(cfg.grid.dt_us);
  grid["n_start"] = cfg.grid.n_start;
  j["grid"] = grid;
  j["io"] = json{{"out_dir", cfg.io.out_dir}};
  return j;
}

}  // namespace nvpol
