#pragma once

#include <json.hpp>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nvpol/constants.hpp"
#include "nvpol/environment.hpp"
#include "nvpol/errors.hpp"
#include "nvpol/estimator.hpp"
#include "nvpol/format.hpp"
#include "nvpol/grid.hpp"
#include "nvpol/oracle.hpp"

namespace nvpol {

// insertion-ordered so repeated runs serialize byte-identically
using json = nlohmann::ordered_json;

namespace io_detail {

// stores a double rounded to 9 significant digits, the project-wide
// serialization precision
inline double num(double x) { return detail::round_g9(x); }

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("could not parse " + what + " from '" + s + "'");
  }
}

}  // namespace io_detail

// ---- files -------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed on " + path.string());
  return ss.str();
}

// temp file in the target directory, then rename; readers never observe a
// partially written file
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  fs::create_directories(dir, ec);
  const fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed on " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename to " + path.string() + " failed: " + ec.message());
}

// ---- constants ----------------------------------------------------------

inline json constants_to_json(const PhysicalConstants& c) {
  json j;
  j["gamma_n"] = io_detail::num(c.gamma_n);
  j["gamma_e"] = io_detail::num(c.gamma_e);
  j["Delta_GHz"] = io_detail::num(c.delta_ghz);
  j["dipolar_prefactor"] = io_detail::num(c.dipolar_prefactor);
  j["angular_convention"] = to_string(c.convention);
  return j;
}

inline PhysicalConstants constants_from_json(const json& j) {
  PhysicalConstants c;
  for (const auto& [key, value] : j.items()) {
    if (key == "gamma_n") c.gamma_n = value.get<double>();
    else if (key == "gamma_e") c.gamma_e = value.get<double>();
    else if (key == "Delta_GHz") c.delta_ghz = value.get<double>();
    else if (key == "dipolar_prefactor") c.dipolar_prefactor = value.get<double>();
    else if (key == "angular_convention")
      c.convention = angular_convention_from_string(value.get<std::string>());
    else throw ValidationError("constants: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

// ---- environment ---------------------------------------------------------

inline constexpr const char* environment_csv_header =
    "k,r_nm,Azx_per_us,Azy_per_us,Azz_per_us,p";

// CSV with table-style 6-decimal values; round-trips losslessly at that
// precision. The field rides in a comment so the column set matches the
// published coupling tables.
inline std::string environment_to_csv(const EnvironmentRealization& env) {
  std::string out = "# B_z=" + detail::format_g9(env.b_z) + "\n";
  out += environment_csv_header;
  out += "\n";
  for (std::size_t k = 0; k < env.spins.size(); ++k) {
    const auto& s = env.spins[k];
    out += std::to_string(k + 1) + ",";
    out += (s.coupling.r_nm ? detail::format_f6(*s.coupling.r_nm) : std::string()) + ",";
    out += detail::format_f6(s.coupling.azx) + ",";
    out += detail::format_f6(s.coupling.azy) + ",";
    out += detail::format_f6(s.coupling.azz) + ",";
    out += detail::format_f6(s.p) + "\n";
  }
  return out;
}

inline EnvironmentRealization environment_from_csv(const std::string& text) {
  EnvironmentRealization env;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find("B_z=");
      if (eq != std::string::npos)
        env.b_z = io_detail::parse_double(line.substr(eq + 4), "B_z");
      continue;
    }
    if (!header_seen) {
      if (line != environment_csv_header)
        throw IoError("environment CSV: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto f = io_detail::split(line, ',');
    if (f.size() != 6) throw IoError("environment CSV: expected 6 columns, got row '" + line + "'");
    BathSpin s;
    if (!f[1].empty()) s.coupling.r_nm = io_detail::parse_double(f[1], "r_nm");
    s.coupling.azx = io_detail::parse_double(f[2], "Azx_per_us");
    s.coupling.azy = io_detail::parse_double(f[3], "Azy_per_us");
    s.coupling.azz = io_detail::parse_double(f[4], "Azz_per_us");
    s.p = io_detail::parse_double(f[5], "p");
    env.spins.push_back(s);
  }
  if (!header_seen) throw IoError("environment CSV: missing header");
  env.validate();
  return env;
}

inline json environment_to_json(const EnvironmentRealization& env) {
  json j;
  j["B_z"] = io_detail::num(env.b_z);
  j["fingerprint"] = fingerprint(env);
  j["spins"] = json::array();
  for (std::size_t k = 0; k < env.spins.size(); ++k) {
    const auto& s = env.spins[k];
    json row;
    row["k"] = k + 1;
    if (s.coupling.r_nm) row["r_nm"] = io_detail::num(*s.coupling.r_nm);
    else row["r_nm"] = nullptr;
    row["Azx_per_us"] = io_detail::num(s.coupling.azx);
    row["Azy_per_us"] = io_detail::num(s.coupling.azy);
    row["Azz_per_us"] = io_detail::num(s.coupling.azz);
    row["p"] = io_detail::num(s.p);
    j["spins"].push_back(row);
  }
  return j;
}

inline EnvironmentRealization environment_from_json(const json& j) {
  EnvironmentRealization env;
  if (j.contains("B_z")) env.b_z = j.at("B_z").get<double>();
  for (const auto& row : j.at("spins")) {
    BathSpin s;
    if (row.contains("r_nm") && !row.at("r_nm").is_null())
      s.coupling.r_nm = row.at("r_nm").get<double>();
    s.coupling.azx = row.at("Azx_per_us").get<double>();
    s.coupling.azy = row.at("Azy_per_us").get<double>();
    s.coupling.azz = row.at("Azz_per_us").get<double>();
    s.p = row.at("p").get<double>();
    env.spins.push_back(s);
  }
  env.validate();
  return env;
}

// ---- coherence series ------------------------------------------------------

inline std::string series_to_csv(const CoherenceSeries& series) {
  std::string out = "t_us,re_rho01,im_rho01,abs_rho01\n";
  for (const auto& s : series.samples) {
    out += detail::format_g9(s.t) + "," + detail::format_g9(s.rho01.real()) + "," +
           detail::format_g9(s.rho01.imag()) + "," + detail::format_g9(s.abs) + "\n";
  }
  return out;
}

inline json grid_to_json(const TimeGrid& grid) {
  json j;
  j["kind"] = to_string(grid.kind);
  j["omega_rad_us"] = io_detail::num(grid.omega);
  j["t_max_us"] = io_detail::num(grid.t_max);
  if (grid.kind == GridKind::continuous) j["dt_us"] = io_detail::num(grid.dt);
  j["n_start"] = grid.n_start;
  j["n_samples"] = grid.times.size();
  return j;
}

// sidecar carrying everything needed to regenerate or trust the CSV
inline json series_meta_to_json(const CoherenceSeries& series,
                                const PhysicalConstants& constants) {
  json j;
  j["grid"] = grid_to_json(series.grid);
  j["B_z"] = io_detail::num(series.b_z);
  j["n_spins"] = series.n_spins;
  j["max_abs_polarization"] = io_detail::num(series.max_abs_polarization);
  j["include_free_phase"] = series.include_free_phase;
  j["env_fingerprint"] = series.env_fingerprint;
  j["constants"] = constants_to_json(constants);
  return j;
}

// rebuild a series from its CSV plus sidecar (the estimate command's input)
inline CoherenceSeries series_from_files(const std::string& csv_text, const json& meta) {
  CoherenceSeries series;
  const auto& g = meta.at("grid");
  series.grid.kind = grid_kind_from_string(g.at("kind").get<std::string>());
  series.grid.omega = g.at("omega_rad_us").get<double>();
  series.grid.t_max = g.at("t_max_us").get<double>();
  if (g.contains("dt_us")) series.grid.dt = g.at("dt_us").get<double>();
  series.grid.n_start = g.at("n_start").get<long>();
  series.b_z = meta.at("B_z").get<double>();
  series.n_spins = meta.at("n_spins").get<int>();
  series.max_abs_polarization = meta.at("max_abs_polarization").get<double>();
  series.include_free_phase = meta.at("include_free_phase").get<bool>();
  series.env_fingerprint = meta.value("env_fingerprint", std::string());

  std::istringstream in(csv_text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "t_us,re_rho01,im_rho01,abs_rho01")
        throw IoError("series CSV: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto f = io_detail::split(line, ',');
    if (f.size() != 4) throw IoError("series CSV: expected 4 columns, got row '" + line + "'");
    CoherenceSample s;
    s.t = io_detail::parse_double(f[0], "t_us");
    s.rho01 = {io_detail::parse_double(f[1], "re_rho01"),
               io_detail::parse_double(f[2], "im_rho01")};
    s.abs = io_detail::parse_double(f[3], "abs_rho01");
    series.samples.push_back(s);
    series.grid.times.push_back(s.t);
  }
  if (!header_seen) throw IoError("series CSV: missing header");
  return series;
}

// ---- estimates --------------------------------------------------------------

inline json estimate_to_json(const PolarizationEstimate& est) {
  json j;
  j["B_z"] = io_detail::num(est.b_z);
  j["grid_kind"] = to_string(est.grid_kind);
  j["horizon_us"] = io_detail::num(est.horizon_us);
  j["N"] = est.n_spins;
  j["product_bound"] = io_detail::num(est.product_bound);
  j["p_bar"] = io_detail::num(est.p_bar);
  if (est.grid_kind == GridKind::t_doubleprime) {
    j["high_field_assumption"] = est.high_field_assumption;
    if (est.calibration_value) j["calibration"] = io_detail::num(*est.calibration_value);
  }
  j["staircase"] = json::array();
  for (const auto& pt : est.staircase)
    j["staircase"].push_back({io_detail::num(pt.t_first), io_detail::num(pt.min_abs)});
  return j;
}

inline std::string staircase_to_csv(const PolarizationEstimate& est) {
  std::string out = "t_us,min_abs,p_bar_running\n";
  for (const auto& pt : est.staircase) {
    const double running = p_bar_from_bound(2.0 * pt.min_abs, est.n_spins);
    out += detail::format_g9(pt.t_first) + "," + detail::format_g9(pt.min_abs) + "," +
           detail::format_g9(running) + "\n";
  }
  return out;
}

inline json calibration_to_json(const AmplitudeCalibration& cal) {
  json j;
  j["amplitude_product_lower_bound"] = io_detail::num(cal.amplitude_product_lower_bound);
  j["B_z"] = io_detail::num(cal.b_z);
  j["horizon_us"] = io_detail::num(cal.horizon_us);
  return j;
}

inline AmplitudeCalibration calibration_from_json(const json& j) {
  AmplitudeCalibration cal;
  cal.amplitude_product_lower_bound = j.at("amplitude_product_lower_bound").get<double>();
  cal.b_z = j.at("B_z").get<double>();
  cal.horizon_us = j.at("horizon_us").get<double>();
  if (!(cal.amplitude_product_lower_bound >= 0 && cal.amplitude_product_lower_bound <= 1))
    throw ValidationError("calibration: value must be in [0, 1]");
  return cal;
}

inline json verification_to_json(const VerificationReport& rep) {
  json j;
  j["pass"] = rep.pass;
  j["single_factor_trials"] = rep.single_factor_trials;
  j["worst_single_factor_dev"] = io_detail::num(rep.worst_single_factor_dev);
  j["worst_propagator_cross_dev"] = io_detail::num(rep.worst_propagator_cross_dev);
  j["worst_unitarity_defect"] = io_detail::num(rep.worst_unitarity_defect);
  j["factorization_trials"] = rep.factorization_trials;
  j["worst_factorization_dev_per_spin"] = io_detail::num(rep.worst_factorization_dev);
  j["worst_phase_flag_dev"] = io_detail::num(rep.worst_phase_flag_dev);
  j["worst_state_eigenvalue_dev"] = io_detail::num(rep.worst_state_eigenvalue_dev);
  return j;
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid JSON in " + what + ": " + e.what());
  }
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace nvpol
