// nvpol: simulate NV-qubit dephasing against a 13C bath on Larmor-locked
// time grids and extract polarization-product bounds from the samples.

#include <CLI11.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nvpol/nvpol.hpp"

namespace fs = std::filesystem;
using nvpol::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  bool strict = false;
};

struct SimulateOpts {
  std::string env_path;
  double field = 0;
  std::string pol;
  std::string grid_kind = "prime";
  double tmax_us = 1600.0;
  double dt_us = 0.1;
  bool free_phase = false;
};

struct EstimateOpts {
  std::string series_prefix;
  std::string calibration_path;
  double horizon_us = 0;
  int n_spins = 0;
};

struct SweepOpts {
  std::vector<double> fields;
  double horizon_us = 1600.0;
};

nvpol::PolarizationSpec parse_pol(const std::string& text) {
  nvpol::PolarizationSpec spec;
  if (text.empty()) return spec;
  std::vector<double> values;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (cur.empty()) throw nvpol::ValidationError("--pol: empty entry in '" + text + "'");
      try {
        values.push_back(std::stod(cur));
      } catch (const std::exception&) {
        throw nvpol::ValidationError("--pol: could not parse '" + cur + "'");
      }
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (values.size() == 1) spec.uniform = values[0];
  else spec.per_spin = values;
  return spec;
}

nvpol::RunConfig load_config(const std::string& path) {
  if (path.empty()) return nvpol::RunConfig{};
  return nvpol::parse_run_config(nvpol::read_file(path));
}

nvpol::EnvironmentRealization load_environment(const std::string& path) {
  if (path.empty()) throw nvpol::ValidationError("--env is required");
  const std::string text = nvpol::read_file(path);
  if (fs::path(path).extension() == ".json")
    return nvpol::environment_from_json(nvpol::parse_json(text, path));
  return nvpol::environment_from_csv(text);
}

// warn about near-vacuous spins; refuse under --strict
void check_degenerate(const nvpol::EnvironmentRealization& env,
                      const nvpol::PhysicalConstants& constants, bool strict) {
  const auto bad = nvpol::detect_degenerate_spins(env, constants);
  if (bad.empty()) return;
  std::string which;
  for (auto k : bad) which += (which.empty() ? "" : ", ") + std::to_string(k + 1);
  const std::string msg =
      "spin(s) k = " + which +
      " have near-zero amplitude (omega + Azz ~ 0); their factor carries no "
      "polarization information and the product bound degenerates. A small "
      "change of the applied field rectifies the situation.";
  if (strict) throw nvpol::DegenerateSpinError(msg);
  std::fprintf(stderr, "warning: %s\n", msg.c_str());
}

void write_series_bundle(const fs::path& dir, const std::string& stem,
                         const nvpol::CoherenceSeries& series,
                         const nvpol::PhysicalConstants& constants,
                         const json& config_echo) {
  json meta = nvpol::series_meta_to_json(series, constants);
  meta["config"] = config_echo;
  nvpol::atomic_write_file(dir / (stem + ".csv"), nvpol::series_to_csv(series));
  nvpol::atomic_write_file(dir / (stem + ".json"), nvpol::dump_json(meta));
}

void write_estimate_bundle(const fs::path& dir, const nvpol::PolarizationEstimate& est,
                           const json& config_echo) {
  json j = nvpol::estimate_to_json(est);
  j["config"] = config_echo;
  nvpol::atomic_write_file(dir / "estimate.json", nvpol::dump_json(j));
  nvpol::atomic_write_file(dir / "staircase.csv", nvpol::staircase_to_csv(est));
}

// echo of the effective settings for runs driven by flags rather than a file
json effective_config_echo(const nvpol::RunConfig& base, double field,
                           const nvpol::PolarizationSpec& pol, nvpol::GridKind kind,
                           double t_max, double dt, const std::string& out_dir) {
  nvpol::RunConfig cfg = base;
  if (field > 0) cfg.fields_t = {field};
  if (!pol.empty()) cfg.polarization = pol;
  cfg.grid.kind = kind;
  cfg.grid.t_max_us = t_max;
  cfg.grid.dt_us = dt;
  if (!out_dir.empty()) cfg.io.out_dir = out_dir;
  return nvpol::run_config_to_json(cfg);
}

int cmd_generate(const CommonOpts& common, std::optional<std::uint64_t> seed_override) {
  nvpol::RunConfig cfg = load_config(common.config_path);
  if (seed_override) {
    cfg.seed = *seed_override;
    cfg.lattice.seed = *seed_override;
  }
  if (!common.out_dir.empty()) cfg.io.out_dir = common.out_dir;
  cfg.validate();

  const auto sites = nvpol::generate_sites(cfg.lattice);
  auto env = nvpol::select_environment(sites, cfg.constants, cfg.lattice);
  env.b_z = cfg.fields_t.front();
  env = cfg.polarization.apply(std::move(env));
  check_degenerate(env, cfg.constants, common.strict);

  const fs::path dir = cfg.io.out_dir;
  json env_json = nvpol::environment_to_json(env);
  env_json["config"] = nvpol::run_config_to_json(cfg);
  nvpol::atomic_write_file(dir / "env.csv", nvpol::environment_to_csv(env));
  nvpol::atomic_write_file(dir / "env.json", nvpol::dump_json(env_json));
  std::printf("generated %d spins -> %s\n", env.size(), (dir / "env.csv").c_str());
  return 0;
}

int cmd_simulate(const CommonOpts& common, const SimulateOpts& opts) {
  const nvpol::RunConfig base = load_config(common.config_path);
  auto env = load_environment(opts.env_path);
  if (opts.field > 0) env.b_z = opts.field;
  else if (env.b_z <= 0 && !base.fields_t.empty()) env.b_z = base.fields_t.front();
  const auto pol = parse_pol(opts.pol);
  env = pol.apply(std::move(env));

  const auto& constants = base.constants;
  check_degenerate(env, constants, common.strict);

  const auto kind = nvpol::grid_kind_from_string(opts.grid_kind);
  const double omega = nvpol::larmor_frequency(env.b_z, constants);
  const auto grid = nvpol::build_grid(kind, omega, opts.tmax_us, opts.dt_us);
  const auto series = nvpol::sample_series(env, constants, grid, opts.free_phase);

  const fs::path dir = common.out_dir.empty() ? base.io.out_dir : common.out_dir;
  write_series_bundle(dir, "series", series, constants,
                      effective_config_echo(base, env.b_z, pol, kind, opts.tmax_us,
                                            opts.dt_us, dir.string()));
  std::printf("sampled %zu points on the %s grid -> %s\n", series.samples.size(),
              nvpol::to_string(kind), (dir / "series.csv").c_str());
  return 0;
}

int cmd_estimate(const CommonOpts& common, const SimulateOpts& sim,
                 const EstimateOpts& opts) {
  const nvpol::RunConfig base = load_config(common.config_path);
  const auto& constants = base.constants;

  if (opts.series_prefix.empty() && sim.env_path.empty())
    throw nvpol::ValidationError("estimate needs --series or --env");

  nvpol::CoherenceSeries series;
  json config_echo;
  if (!opts.series_prefix.empty()) {
    if (!sim.env_path.empty())
      throw nvpol::ValidationError("give either --series or --env, not both");
    const json meta = nvpol::parse_json(nvpol::read_file(opts.series_prefix + ".json"),
                                        opts.series_prefix + ".json");
    series = nvpol::series_from_files(nvpol::read_file(opts.series_prefix + ".csv"), meta);
    config_echo = meta.value("config", json::object());
  } else {
    auto env = load_environment(sim.env_path);
    if (sim.field > 0) env.b_z = sim.field;
    else if (env.b_z <= 0 && !base.fields_t.empty()) env.b_z = base.fields_t.front();
    const auto pol = parse_pol(sim.pol);
    env = pol.apply(std::move(env));
    check_degenerate(env, constants, common.strict);
    const auto kind = nvpol::grid_kind_from_string(sim.grid_kind);
    const double omega = nvpol::larmor_frequency(env.b_z, constants);
    const auto grid = nvpol::build_grid(kind, omega, sim.tmax_us, sim.dt_us);
    series = nvpol::sample_series(env, constants, grid);
    config_echo = effective_config_echo(base, env.b_z, pol, kind, sim.tmax_us,
                                        sim.dt_us, common.out_dir);
  }

  int n = opts.n_spins > 0 ? opts.n_spins : series.n_spins;
  if (opts.n_spins > 0 && series.n_spins > 0 && opts.n_spins != series.n_spins)
    throw nvpol::ValidationError("--n-spins " + std::to_string(opts.n_spins) +
                                 " does not match the environment's " +
                                 std::to_string(series.n_spins) + " spins");

  const double horizon =
      opts.horizon_us > 0 ? opts.horizon_us : std::numeric_limits<double>::infinity();

  nvpol::PolarizationEstimate est;
  if (series.grid.kind == nvpol::GridKind::t_prime) {
    if (!opts.calibration_path.empty())
      throw nvpol::ValidationError(
          "--calibration applies to doubleprime-grid series only");
    est = nvpol::estimate_from_prime(series, n, horizon);
  } else if (series.grid.kind == nvpol::GridKind::t_doubleprime) {
    std::optional<nvpol::AmplitudeCalibration> cal;
    if (!opts.calibration_path.empty())
      cal = nvpol::calibration_from_json(nvpol::parse_json(
          nvpol::read_file(opts.calibration_path), opts.calibration_path));
    est = nvpol::estimate_from_doubleprime(series, n, cal, horizon);
  } else {
    throw nvpol::ValidationError(
        "estimation is defined on the discrete grids (prime or doubleprime)");
  }

  const fs::path dir = common.out_dir.empty() ? base.io.out_dir : common.out_dir;
  write_estimate_bundle(dir, est, config_echo);
  std::printf("product_bound = %s  p_bar = %s  (N = %d, horizon %s us) -> %s\n",
              nvpol::detail::format_g9(est.product_bound).c_str(),
              nvpol::detail::format_g9(est.p_bar).c_str(), est.n_spins,
              nvpol::detail::format_g9(est.horizon_us).c_str(),
              (dir / "estimate.json").c_str());
  return 0;
}

int cmd_sweep(const CommonOpts& common, const SimulateOpts& sim, const SweepOpts& opts) {
  const nvpol::RunConfig base = load_config(common.config_path);
  const auto& constants = base.constants;
  auto env = load_environment(sim.env_path);
  const auto pol = parse_pol(sim.pol);
  const std::vector<double> fields = !opts.fields.empty() ? opts.fields : base.fields_t;
  if (fields.empty()) throw nvpol::ValidationError("sweep needs at least one --field");

  {
    auto polarized = pol.apply(env);
    for (double b : fields) {
      polarized.b_z = b;
      check_degenerate(polarized, constants, common.strict);
    }
  }

  const auto estimates = nvpol::sweep(env, constants, fields, pol, opts.horizon_us);

  const fs::path dir = common.out_dir.empty() ? base.io.out_dir : common.out_dir;
  json summary = json::array();
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto& est = estimates[i];
    const std::string label = nvpol::detail::format_g9(fields[i]);
    json j = nvpol::estimate_to_json(est);
    j["config"] = effective_config_echo(base, fields[i], pol, nvpol::GridKind::t_prime,
                                        opts.horizon_us, 0.0, dir.string());
    nvpol::atomic_write_file(dir / ("estimate_B" + label + ".json"), nvpol::dump_json(j));
    nvpol::atomic_write_file(dir / ("staircase_B" + label + ".csv"),
                             nvpol::staircase_to_csv(est));
    summary.push_back(j);
  }
  nvpol::atomic_write_file(dir / "sweep.json", nvpol::dump_json(summary));
  std::printf("swept %zu fields -> %s\n", estimates.size(), (dir / "sweep.json").c_str());
  return 0;
}

int cmd_verify(const CommonOpts& common) {
  const auto report = nvpol::run_verification();
  const json j = nvpol::verification_to_json(report);
  const fs::path dir = common.out_dir.empty() ? "out" : common.out_dir;
  nvpol::atomic_write_file(dir / "verification.json", nvpol::dump_json(j));
  std::printf("%s\n", nvpol::dump_json(j).c_str());
  return report.pass ? 0 : 1;
}

// fixed-parameter reproduction bundles for the reference curves
int cmd_reproduce(const CommonOpts& common, const std::string& target) {
  nvpol::verify_fixture_integrity();
  const nvpol::PhysicalConstants constants;
  const fs::path root = common.out_dir.empty() ? "out" : common.out_dir;
  const fs::path dir = root / target;

  auto fixture_env = [&](const std::string& table, double b_z, double p) {
    auto env = nvpol::fixture_environment(table);
    env.b_z = b_z;
    return nvpol::set_polarizations(std::move(env), p);
  };
  auto echo = [&](const std::string& table, double b_z, double p, double t_max) {
    json j;
    j["target"] = target;
    j["fixture"] = table;
    j["B_z"] = b_z;
    j["polarization"] = p;
    j["t_max_us"] = t_max;
    j["constants"] = nvpol::constants_to_json(constants);
    return j;
  };
  auto decay_bundle = [&](const std::string& table, double b_z, double t_max) {
    // the two-polarization decay plot plus its product-floor metadata
    json meta;
    meta["target"] = target;
    meta["fixture"] = table;
    meta["B_z"] = b_z;
    meta["grid"] = "prime";
    meta["t_max_us"] = t_max;
    meta["floors"] = json::object();
    for (double p : {0.8, 0.6}) {
      auto env = fixture_env(table, b_z, p);
      const auto grid = nvpol::build_grid(nvpol::GridKind::t_prime,
                                          nvpol::larmor_frequency(b_z, constants), t_max);
      const auto series = nvpol::sample_series(env, constants, grid);
      const std::string stem = p == 0.8 ? "series_p0.8" : "series_p0.6";
      write_series_bundle(dir, stem, series, constants, echo(table, b_z, p, t_max));
      // dashed floor of the plot: half the polarization product
      meta["floors"][p == 0.8 ? "p0.8" : "p0.6"] =
          nvpol::io_detail::num(0.5 * std::pow(p, env.size()));
    }
    meta["floor_rule"] = "0.5 * p^N";
    nvpol::atomic_write_file(dir / "metadata.json", nvpol::dump_json(meta));
  };

  if (target == "fig1") {
    decay_bundle("table1", 1.0, 250.0);
  } else if (target == "fig2") {
    // close-up of the early prime-grid samples with the continuous
    // lock-time envelope they ride on
    const double t_max = 25.0, dt = 0.005, b_z = 1.0, p = 0.8;
    auto env = fixture_env("table1", b_z, p);
    const double omega = nvpol::larmor_frequency(b_z, constants);
    const auto series = nvpol::sample_series(
        env, constants, nvpol::build_grid(nvpol::GridKind::t_prime, omega, t_max));
    write_series_bundle(dir, "series_p0.8", series, constants,
                        echo("table1", b_z, p, t_max));
    const auto dressed = nvpol::dressed_spins(env, constants);
    std::string env_csv = "t_us,envelope_abs\n";
    for (long j = 0; j * dt <= t_max; ++j) {
      const double t = j * dt;
      env_csv += nvpol::detail::format_g9(t) + "," +
                 nvpol::detail::format_g9(nvpol::prime_envelope_abs(dressed, t)) + "\n";
    }
    nvpol::atomic_write_file(dir / "envelope.csv", env_csv);
    json meta = echo("table1", b_z, p, t_max);
    meta["envelope"] = "product of per-spin lock-time magnitudes, dt_us = " +
                       nvpol::detail::format_g9(dt);
    nvpol::atomic_write_file(dir / "metadata.json", nvpol::dump_json(meta));
  } else if (target == "fig3") {
    const std::vector<double> fields = {0.25, 0.75, 1.0, 5.0};
    const double horizon = 1600.0, p = 0.8;
    auto env = nvpol::fixture_environment("table1");
    nvpol::PolarizationSpec pol;
    pol.uniform = p;
    const auto estimates = nvpol::sweep(env, constants, fields, pol, horizon);
    json all = json::array();
    for (std::size_t i = 0; i < estimates.size(); ++i) {
      const std::string label = nvpol::detail::format_g9(fields[i]);
      nvpol::atomic_write_file(dir / ("staircase_B" + label + ".csv"),
                               nvpol::staircase_to_csv(estimates[i]));
      all.push_back(nvpol::estimate_to_json(estimates[i]));
    }
    json meta = echo("table1", 0.0, p, horizon);
    meta.erase("B_z");
    meta["fields_T"] = fields;
    meta["estimates"] = all;
    nvpol::atomic_write_file(dir / "metadata.json", nvpol::dump_json(meta));
  } else if (target == "fig4") {
    decay_bundle("table2", 3.0, 250.0);
  } else if (target == "fig5") {
    decay_bundle("table3", 3.0, 250.0);
  } else if (target == "fig6") {
    decay_bundle("table4", 3.0, 250.0);
  } else if (target == "headline") {
    const double b_z = 1.0, p = 0.8, horizon = 219.0;
    auto env = fixture_env("table1", b_z, p);
    const auto grid = nvpol::build_grid(nvpol::GridKind::t_prime,
                                        nvpol::larmor_frequency(b_z, constants), 1600.0);
    const auto series = nvpol::sample_series(env, constants, grid);
    const auto est = nvpol::estimate_from_prime(series, env.size(), horizon);
    write_estimate_bundle(dir, est, echo("table1", b_z, p, horizon));
    json meta = echo("table1", b_z, p, horizon);
    meta["horizon_us"] = horizon;
    meta["product_bound"] = nvpol::io_detail::num(est.product_bound);
    meta["p_bar"] = nvpol::io_detail::num(est.p_bar);
    nvpol::atomic_write_file(dir / "metadata.json", nvpol::dump_json(meta));
    std::printf("headline: product_bound = %s, p_bar = %s\n",
                nvpol::detail::format_g9(est.product_bound).c_str(),
                nvpol::detail::format_g9(est.p_bar).c_str());
  } else {
    throw nvpol::ValidationError("unknown reproduce target '" + target +
                                 "' (fig1..fig6 or headline)");
  }
  std::printf("reproduced %s -> %s\n", target.c_str(), dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NV-qubit dephasing simulator and nuclear-polarization estimator"};
  app.require_subcommand(1);

  CommonOpts common;
  SimulateOpts sim;
  EstimateOpts est;
  SweepOpts sweep;
  std::optional<std::uint64_t> seed_override;
  std::string target;
  int rc = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "run-config JSON file");
    sub->add_option("--out", common.out_dir, "output directory");
    sub->add_flag("--strict", common.strict,
                  "escalate degenerate-spin warnings to an error");
  };
  auto add_sim_opts = [&](CLI::App* sub, bool need_env, bool scalar_field) {
    auto* env = sub->add_option("--env", sim.env_path, "environment CSV or JSON file");
    if (need_env) env->required();
    if (scalar_field) sub->add_option("--field", sim.field, "applied field B_z in tesla");
    sub->add_option("--pol", sim.pol,
                    "polarization: one value for all spins or a comma list");
    sub->add_option("--grid", sim.grid_kind, "prime | doubleprime | continuous")
        ->check(CLI::IsMember({"prime", "doubleprime", "continuous"}));
    sub->add_option("--tmax-us", sim.tmax_us, "grid end time in us");
    sub->add_option("--dt-us", sim.dt_us, "continuous-grid spacing in us");
  };

  auto* g = app.add_subcommand("generate", "draw a random bath from the diamond lattice");
  add_common(g);
  g->add_option("--seed", seed_override, "override the config seed");
  g->callback([&] { rc = cmd_generate(common, seed_override); });

  auto* s = app.add_subcommand("simulate", "sample the coherence on a time grid");
  add_common(s);
  add_sim_opts(s, true, true);
  s->add_flag("--free-phase", sim.free_phase, "include the free qubit phase factor");
  s->callback([&] { rc = cmd_simulate(common, sim); });

  auto* e = app.add_subcommand("estimate", "polarization-product bound from a discrete series");
  add_common(e);
  add_sim_opts(e, false, true);
  e->add_option("--series", est.series_prefix,
                "prefix of an existing series (<prefix>.csv + <prefix>.json)");
  e->add_option("--horizon-us", est.horizon_us, "use only samples up to this time");
  e->add_option("--n-spins", est.n_spins, "spin count for the geometric mean");
  e->add_option("--calibration", est.calibration_path,
                "amplitude calibration JSON (doubleprime grids)");
  e->callback([&] { rc = cmd_estimate(common, sim, est); });

  auto* w = app.add_subcommand("sweep", "one prime-grid estimate per field value");
  add_common(w);
  add_sim_opts(w, true, false);
  w->add_option("--field", sweep.fields, "field values in tesla (repeatable)")
      ->take_all();
  w->add_option("--horizon-us", sweep.horizon_us, "staircase horizon in us");
  w->callback([&] { rc = cmd_sweep(common, sim, sweep); });

  auto* r = app.add_subcommand("reproduce", "regenerate a reference bundle");
  add_common(r);
  r->add_option("--target", target, "fig1..fig6 or headline")->required();
  r->callback([&] { rc = cmd_reproduce(common, target); });

  auto* v = app.add_subcommand("verify", "run the brute-force oracle battery");
  add_common(v);
  v->callback([&] { rc = cmd_verify(common); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex);
    return code == 0 ? 0 : 2;
  } catch (const nvpol::ValidationError& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  } catch (const nvpol::ResourceError& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  } catch (const nvpol::DegenerateSpinError& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 3;
  } catch (const nvpol::IoError& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 4;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return rc;
}
