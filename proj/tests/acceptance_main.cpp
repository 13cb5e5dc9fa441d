// Acceptance battery. Each criterion checks one load-bearing property of
// the toolkit end to end, at a fixed tolerance, and prints a single
// PASS/FAIL line with the measured numbers. The build registers one ctest
// entry per criterion; running with no arguments executes all of them.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <iterator>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nvpol/nvpol.hpp"

using namespace nvpol;

namespace {

const PhysicalConstants constants;

struct Outcome {
  bool pass = false;
  std::string title;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

EnvironmentRealization fixture_env(const std::string& table, double b_z, double p) {
  auto env = fixture_environment(table);
  env.b_z = b_z;
  return set_polarizations(std::move(env), p);
}

CoherenceSeries fixture_series(const std::string& table, double b_z, double p,
                               GridKind kind, double t_max) {
  const auto env = fixture_env(table, b_z, p);
  const auto grid = build_grid(kind, larmor_frequency(b_z, constants), t_max);
  return sample_series(env, constants, grid);
}

// random bath in the amplitude-dominated regime used by criteria 7 and 8
EnvironmentRealization random_env(std::mt19937_64& rng) {
  EnvironmentRealization env;
  env.b_z = 3.0 + 3.0 * unit(rng);
  const int n = 2 + static_cast<int>(unit(rng) * 7);  // 2..8 spins
  for (int k = 0; k < n; ++k) {
    BathSpin s;
    s.coupling.azx = 2 * unit(rng) - 1;
    s.coupling.azy = 2 * unit(rng) - 1;
    s.coupling.azz = 2 * unit(rng) - 1;
    s.p = 0.3 + 0.65 * unit(rng);
    env.spins.push_back(s);
  }
  return env;
}

// --- criterion 1 ---------------------------------------------------------

Outcome criterion_1() {
  Outcome o;
  o.title = "per-spin closed form matches conditional-evolution oracle";
  std::mt19937_64 rng(20250819);
  double worst = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    CouplingRow row{4 * unit(rng) - 2, 4 * unit(rng) - 2, 4 * unit(rng) - 2};
    const double omega = 0.5 + 59.5 * unit(rng);
    const double p = 2 * unit(rng) - 1;
    const double t = 100.0 * unit(rng);
    const auto closed = single_spin_factor(t, dress(row, omega, p), omega);
    const auto traced = oracle_single_factor(row, p, omega, t);
    worst = std::max(worst, std::abs(closed - traced));
  }
  o.pass = worst < 1e-10;
  o.detail = fmt("worst |closed - traced| = %.3e over %d tuples, budget 1e-10",
                 worst, trials);
  return o;
}

// --- criterion 2 ---------------------------------------------------------

Outcome criterion_2() {
  Outcome o;
  o.title = "dense full-bath evolution factorizes into per-spin factors";
  std::mt19937_64 rng(20250820);
  double worst = 0;
  int trials = 0;
  for (int n = 1; n <= 6; ++n) {
    for (int e = 0; e < 2; ++e) {
      EnvironmentRealization env;
      const double omega = 2.0 + 38.0 * unit(rng);
      env.b_z = omega / (constants.gamma_n * constants.angular_scale());
      for (int k = 0; k < n; ++k) {
        BathSpin s;
        s.coupling.azx = 2 * unit(rng) - 1;
        s.coupling.azy = 2 * unit(rng) - 1;
        s.coupling.azz = 2 * unit(rng) - 1;
        s.p = 2 * unit(rng) - 1;
        env.spins.push_back(s);
      }
      for (int j = 0; j < 100; ++j) {
        const double t = 50.0 * unit(rng);
        const auto full = full_system_coherence(env, constants, t);
        const auto closed = coherence(t, env, constants);
        worst = std::max(worst, std::abs(full - closed) / n);
        ++trials;
      }
    }
  }
  o.pass = worst < 1e-9;
  o.detail = fmt("worst per-spin deviation = %.3e over %d evolutions, budget 1e-9",
                 worst, trials);
  return o;
}

// --- criterion 3 ---------------------------------------------------------

Outcome criterion_3() {
  Outcome o;
  o.title = "strongly polarized decay rides on its product floor (p = 0.8)";
  const auto series = fixture_series("table1", 1.0, 0.8, GridKind::t_prime, 1600.0);
  double min_abs = 1.0;
  for (const auto& s : series.samples) min_abs = std::min(min_abs, s.abs);
  const double floor = 0.5 * std::pow(0.8, 8);

  const bool floor_ok = min_abs >= floor - 1e-6;
  const bool approach_ok = min_abs - floor <= 0.02;
  o.pass = floor_ok && approach_ok;
  o.detail = fmt(
      "min|rho01| = %.9f, floor = %.9f (%s); approach gap = %.6f, budget 0.02 (%s)",
      min_abs, floor, floor_ok ? "held" : "VIOLATED", min_abs - floor,
      approach_ok ? "reached" : "NOT reached by 1600 us");
  return o;
}

// --- criterion 4 ---------------------------------------------------------

Outcome criterion_4() {
  Outcome o;
  o.title = "moderately polarized decay respects its product floor (p = 0.6)";
  const auto series = fixture_series("table1", 1.0, 0.6, GridKind::t_prime, 1600.0);
  double min_abs = 1.0;
  for (const auto& s : series.samples) min_abs = std::min(min_abs, s.abs);
  const double floor = 0.5 * std::pow(0.6, 8);
  o.pass = min_abs >= floor - 1e-6;
  o.detail = fmt("min|rho01| = %.9f >= floor %.9f - 1e-6: %s", min_abs, floor,
                 o.pass ? "yes" : "NO");
  return o;
}

// --- criterion 5 ---------------------------------------------------------

Outcome criterion_5() {
  Outcome o;
  o.title = "reference estimate lands on the quoted per-nucleus bound";
  const auto series = fixture_series("table1", 1.0, 0.8, GridKind::t_prime, 1600.0);
  const auto est = estimate_from_prime(series, 8, 219.0);
  const double target = 0.84463, tol = 0.005;
  o.pass = std::abs(est.p_bar - target) <= tol;
  o.detail = fmt("p_bar = %.9f, target %.5f +/- %.3f (product bound %.9f)",
                 est.p_bar, target, tol, est.product_bound);
  return o;
}

// --- criterion 6 ---------------------------------------------------------

Outcome criterion_6() {
  Outcome o;
  o.title = "amplitudes dominate admissible polarizations at the quoted fields";
  auto min_amplitude = [&](double b_z) {
    const auto env = fixture_env("table1", b_z, 0.0);
    const double omega = larmor_frequency(b_z, constants);
    double m = 1.0;
    for (const auto& s : env.spins) m = std::min(m, amplitude(s.coupling, omega));
    return m;
  };
  const double a1 = min_amplitude(1.0);
  const double a025 = min_amplitude(0.25);
  o.pass = a1 >= 0.997 && a025 >= 0.975;
  o.detail = fmt("min a_k = %.9f at 1 T (>= 0.997), %.9f at 0.25 T (>= 0.975)",
                 a1, a025);
  return o;
}

// --- criterion 7 ---------------------------------------------------------

Outcome criterion_7() {
  Outcome o;
  o.title = "sampled magnitudes never cross the product floors or the cap";
  std::mt19937_64 rng(20250821);
  int violations = 0, checked = 0;
  double worst_margin = 1.0;

  for (int trial = 0; trial < 200; ++trial) {
    const auto env = random_env(rng);
    const double omega = larmor_frequency(env.b_z, constants);

    double prod_p = 1.0, prod_ap = 1.0, prod_a = 1.0, min_a = 1.0, max_p = 0.0;
    for (const auto& s : env.spins) {
      const double a = amplitude(s.coupling, omega);
      prod_p *= s.p;
      prod_ap *= std::abs(a * s.p);
      prod_a *= std::abs(a);
      min_a = std::min(min_a, a);
      max_p = std::max(max_p, s.p);
    }
    if (min_a < max_p) continue;  // dominance precondition, see criterion 6

    const double t_max = 100.0 * 2.0 * std::numbers::pi / omega;
    const auto prime =
        sample_series(env, constants, build_grid(GridKind::t_prime, omega, t_max));
    for (const auto& s : prime.samples) {
      worst_margin = std::min(worst_margin, 2.0 * s.abs - prod_p);
      if (2.0 * s.abs < prod_p - 1e-12) ++violations;
      ++checked;
    }

    const auto dp = sample_series(env, constants,
                                  build_grid(GridKind::t_doubleprime, omega, t_max));
    for (const auto& s : dp.samples) {
      if (2.0 * s.abs < prod_ap - 1e-12) ++violations;
      ++checked;
    }

    auto bare = env;
    for (auto& s : bare.spins) s.p = 0.0;
    const auto cap =
        sample_series(bare, constants, build_grid(GridKind::t_prime, omega, t_max));
    for (const auto& s : cap.samples) {
      if (2.0 * s.abs > prod_a + 1e-12) ++violations;
      ++checked;
    }
  }
  o.pass = violations == 0;
  o.detail = fmt("%d violations in %d sampled bounds (slack 1e-12), "
                 "tightest floor margin %.3e", violations, checked, worst_margin);
  return o;
}

// --- criterion 8 ---------------------------------------------------------

Outcome criterion_8() {
  Outcome o;
  o.title = "measured amplitude calibration keeps the de-weighted bound sound";
  std::mt19937_64 rng(20250822);
  int violations = 0, trials = 0;

  for (int trial = 0; trial < 200; ++trial) {
    const auto env = random_env(rng);
    const double omega = larmor_frequency(env.b_z, constants);

    double prod_p = 1.0, prod_a = 1.0;
    for (const auto& s : env.spins) {
      prod_p *= std::abs(s.p);
      prod_a *= std::abs(amplitude(s.coupling, omega));
    }

    const double t_max = 100.0 * 2.0 * std::numbers::pi / omega;
    auto bare = env;
    for (auto& s : bare.spins) s.p = 0.0;
    const auto cal = calibrate_amplitudes(sample_series(
        bare, constants, build_grid(GridKind::t_prime, omega, t_max)));
    if (cal.amplitude_product_lower_bound > prod_a + 1e-12) ++violations;

    const auto dp = sample_series(env, constants,
                                  build_grid(GridKind::t_doubleprime, omega, t_max));
    const auto est = estimate_from_doubleprime(dp, env.size(), cal);
    if (est.product_bound < prod_p - 1e-12) ++violations;
    ++trials;
  }
  o.pass = violations == 0;
  o.detail = fmt("%d soundness violations in %d calibrated estimates (slack 1e-12)",
                 violations, trials);
  return o;
}

// --- criterion 9 ---------------------------------------------------------

Outcome criterion_9() {
  Outcome o;
  o.title = "lock-index evaluation equals the generic form on both grids";
  std::mt19937_64 rng(20250823);
  double worst = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    CouplingRow row{4 * unit(rng) - 2, 4 * unit(rng) - 2, 4 * unit(rng) - 2};
    const double omega = 0.5 + 59.5 * unit(rng);
    const auto s = dress(row, omega, 2 * unit(rng) - 1);
    const long n = static_cast<long>(unit(rng) * 1001.0);
    const double period = 2.0 * std::numbers::pi / omega;

    const double tp = period * (n + 0.5);
    worst = std::max(worst, std::abs(single_spin_factor(tp, s, omega) -
                                     single_spin_factor_prime(s, tp, n)));
    const double tpp = period * n;
    worst = std::max(worst, std::abs(single_spin_factor(tpp, s, omega) -
                                     single_spin_factor_doubleprime(s, tpp, n)));
  }
  o.pass = worst < 1e-12;
  o.detail = fmt("worst deviation = %.3e over %d draws with n <= 1000, budget 1e-12",
                 worst, trials);
  return o;
}

// --- criterion 10 --------------------------------------------------------

Outcome criterion_10() {
  Outcome o;
  o.title = "every bundled realization respects its floors at 3 T";
  std::string parts;
  bool all_ok = true;
  for (const std::string table : {"table2", "table3", "table4"}) {
    const double omega = larmor_frequency(3.0, constants);
    double min_a = 1.0;
    for (const auto& s : fixture_environment(table).spins)
      min_a = std::min(min_a, amplitude(s.coupling, omega));

    for (double p : {0.8, 0.6}) {
      const auto series = fixture_series(table, 3.0, p, GridKind::t_prime, 1600.0);
      double min_abs = 1.0;
      for (const auto& s : series.samples) min_abs = std::min(min_abs, s.abs);
      const double floor = 0.5 * std::pow(p, 8);
      const bool ok = min_a >= p && min_abs >= floor - 1e-6;
      all_ok = all_ok && ok;
      parts += fmt("%s%s p=%.1f: min=%.6f floor=%.6f %s", parts.empty() ? "" : "; ",
                   table.c_str(), p, min_abs, floor, ok ? "ok" : "VIOLATED");
    }
  }
  o.pass = all_ok;
  o.detail = parts;
  return o;
}

// --- criterion 11 --------------------------------------------------------

Outcome criterion_11() {
  Outcome o;
  o.title = "bound staircase refines early and keeps refining late";
  const auto series = fixture_series("table1", 1.0, 0.8, GridKind::t_prime, 1600.0);
  const auto stairs = running_min(series);
  int early = 0, late = 0;
  for (const auto& pt : stairs) {
    if (pt.t_first < 400.0) ++early;
    if (pt.t_first > 1000.0 && pt.t_first <= 1600.0) ++late;
  }
  const bool early_ok = early >= 3;
  const bool late_ok = late >= 1;
  o.pass = early_ok && late_ok;
  o.detail = fmt("%d improvements below 400 us (need >= 3, %s); "
                 "%d in (1000, 1600] us (need >= 1, %s); last improvement at %.3f us",
                 early, early_ok ? "ok" : "NO", late, late_ok ? "ok" : "NONE",
                 stairs.empty() ? 0.0 : stairs.back().t_first);
  return o;
}

using CriterionFn = Outcome (*)();

constexpr CriterionFn criteria[] = {criterion_1, criterion_2, criterion_3,
                                    criterion_4, criterion_5, criterion_6,
                                    criterion_7, criterion_8, criterion_9,
                                    criterion_10, criterion_11};

int run_one(int idx) {
  const Outcome o = criteria[idx - 1]();
  std::printf("%s  criterion %d: %s  [%s]\n", o.pass ? "PASS" : "FAIL", idx,
              o.title.c_str(), o.detail.c_str());
  return o.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  int which = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      which = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  const int n_criteria = static_cast<int>(std::size(criteria));
  if (which < 0 || which > n_criteria) {
    std::fprintf(stderr, "criterion must be 1..%d\n", n_criteria);
    return 2;
  }
  if (which > 0) return run_one(which);

  int failures = 0;
  for (int i = 1; i <= n_criteria; ++i) failures += run_one(i);
  std::printf("%d of %d criteria passed\n", n_criteria - failures, n_criteria);
  return failures == 0 ? 0 : 1;
}
