#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "nvpol/coherence.hpp"
#include "nvpol/environment.hpp"
#include "nvpol/errors.hpp"
#include "nvpol/grid.hpp"

namespace nvpol {

struct StaircasePoint {
  double t_first = 0;   // time the running minimum first reached this value
  double min_abs = 0;   // running minimum of |rho01|
};

struct PolarizationEstimate {
  std::vector<StaircasePoint> staircase;
  double product_bound = 0;  // 2 min|rho01|, an upper bound on prod p_k
  double p_bar = 0;          // product_bound^(1/N), per-nucleus figure
  int n_spins = 0;
  GridKind grid_kind = GridKind::t_prime;
  double b_z = 0;
  double horizon_us = 0;
  // doubleprime estimates: true when no measured calibration was supplied
  // and prod|a_k| was assumed to be 1 (high-field limit)
  bool high_field_assumption = false;
  std::optional<double> calibration_value;
};

struct AmplitudeCalibration {
  double amplitude_product_lower_bound = 0;  // 2 max|rho01| of an unpolarized run
  double b_z = 0;
  double horizon_us = 0;
};

// Running minimum of |rho01|; a point is emitted only at a strict
// improvement, so the staircase is strictly decreasing.
inline std::vector<StaircasePoint> running_min(const CoherenceSeries& series) {
  if (series.grid.kind == GridKind::continuous)
    throw ValidationError("running_min: estimation is defined on the discrete grids only");
  if (series.samples.empty()) throw ValidationError("running_min: empty series");
  std::vector<StaircasePoint> out;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : series.samples) {
    if (s.abs < best) {
      best = s.abs;
      out.push_back({s.t, best});
    }
  }
  return out;
}

inline double p_bar_from_bound(double product_bound, int n_spins) {
  if (n_spins < 1) throw ValidationError("p_bar: spin count must be >= 1");
  return std::pow(std::clamp(product_bound, 0.0, 1.0), 1.0 / n_spins);
}

namespace detail {

inline double min_abs_within(const CoherenceSeries& series, double horizon) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : series.samples)
    if (s.t <= horizon) best = std::min(best, s.abs);
  if (!std::isfinite(best))
    throw ValidationError("estimate: no samples inside the horizon");
  return best;
}

inline double max_abs_within(const CoherenceSeries& series, double horizon) {
  double best = -1;
  for (const auto& s : series.samples)
    if (s.t <= horizon) best = std::max(best, s.abs);
  if (best < 0) throw ValidationError("calibrate: no samples inside the horizon");
  return best;
}

inline std::vector<StaircasePoint> staircase_within(const CoherenceSeries& series,
                                                    double horizon) {
  auto stairs = running_min(series);
  while (!stairs.empty() && stairs.back().t_first > horizon) stairs.pop_back();
  return stairs;
}

}  // namespace detail

// Polarization-product bound from a prime-grid run: every sampled 2|rho01|
// sits above prod p_k whenever all amplitudes dominate the polarizations,
// so the running minimum is an upper-bound estimate of the product.
inline PolarizationEstimate estimate_from_prime(
    const CoherenceSeries& series, int n_spins,
    double horizon_us = std::numeric_limits<double>::infinity()) {
  if (series.grid.kind != GridKind::t_prime)
    throw ValidationError("estimate_from_prime: series was not sampled on the prime grid");
  if (n_spins < 1) throw ValidationError("estimate_from_prime: spin count must be >= 1");

  PolarizationEstimate est;
  est.staircase = detail::staircase_within(series, horizon_us);
  est.product_bound = std::clamp(2.0 * detail::min_abs_within(series, horizon_us), 0.0, 1.0);
  est.p_bar = p_bar_from_bound(est.product_bound, n_spins);
  est.n_spins = n_spins;
  est.grid_kind = GridKind::t_prime;
  est.b_z = series.b_z;
  est.horizon_us = std::isfinite(horizon_us) ? horizon_us : series.grid.t_max;
  return est;
}

// Lower bound on prod|a_k| from an unpolarized prime-grid run: with every
// p_k = 0 the sampled 2|rho01| never exceeds prod|a_k|, so its maximum is a
// safe calibration divisor for the doubleprime estimate.
inline AmplitudeCalibration calibrate_amplitudes(
    const CoherenceSeries& series,
    double horizon_us = std::numeric_limits<double>::infinity()) {
  if (series.grid.kind != GridKind::t_prime)
    throw ValidationError("calibrate_amplitudes: calibration runs on the prime grid");
  if (series.max_abs_polarization != 0.0)
    throw ValidationError("calibrate_amplitudes: the calibration run must be unpolarized (every p_k = 0)");

  AmplitudeCalibration cal;
  cal.amplitude_product_lower_bound =
      std::clamp(2.0 * detail::max_abs_within(series, horizon_us), 0.0, 1.0);
  cal.b_z = series.b_z;
  cal.horizon_us = std::isfinite(horizon_us) ? horizon_us : series.grid.t_max;
  return cal;
}

// Doubleprime-grid estimate: 2 min|rho01| bounds prod|a_k p_k| with no
// condition on the field; dividing by a calibration (a lower bound on
// prod|a_k|) de-weights it into a bound on prod|p_k|. Without a
// calibration the high-field assumption prod|a_k| ~ 1 is flagged.
inline PolarizationEstimate estimate_from_doubleprime(
    const CoherenceSeries& series, int n_spins,
    const std::optional<AmplitudeCalibration>& calibration = std::nullopt,
    double horizon_us = std::numeric_limits<double>::infinity()) {
  if (series.grid.kind != GridKind::t_doubleprime)
    throw ValidationError("estimate_from_doubleprime: series was not sampled on the doubleprime grid");
  if (n_spins < 1) throw ValidationError("estimate_from_doubleprime: spin count must be >= 1");

  double divisor = 1.0;
  if (calibration) {
    if (std::abs(calibration->b_z - series.b_z) >
        1e-9 * std::max(1.0, std::abs(series.b_z)))
      throw ValidationError("estimate_from_doubleprime: calibration was taken at a different field");
    if (!(calibration->amplitude_product_lower_bound > 0))
      throw ValidationError("estimate_from_doubleprime: calibration value must be positive");
    divisor = calibration->amplitude_product_lower_bound;
  }

  const double weighted = 2.0 * detail::min_abs_within(series, horizon_us);

  PolarizationEstimate est;
  est.staircase = detail::staircase_within(series, horizon_us);
  est.product_bound = std::clamp(weighted / divisor, 0.0, 1.0);
  est.p_bar = p_bar_from_bound(est.product_bound, n_spins);
  est.n_spins = n_spins;
  est.grid_kind = GridKind::t_doubleprime;
  est.b_z = series.b_z;
  est.horizon_us = std::isfinite(horizon_us) ? horizon_us : series.grid.t_max;
  est.high_field_assumption = !calibration.has_value();
  if (calibration) est.calibration_value = divisor;
  return est;
}

// One prime-grid estimate per field value, each on its own frequency-locked
// grid reaching the same horizon.
inline std::vector<PolarizationEstimate> sweep(const EnvironmentRealization& env,
                                               const PhysicalConstants& constants,
                                               const std::vector<double>& fields_t,
                                               const PolarizationSpec& polarizations,
                                               double horizon_us) {
  if (fields_t.empty()) throw ValidationError("sweep: field list must be non-empty");
  if (!(horizon_us > 0)) throw ValidationError("sweep: horizon must be positive");

  std::vector<PolarizationEstimate> out;
  out.reserve(fields_t.size());
  for (double b : fields_t) {
    EnvironmentRealization e = polarizations.apply(env);
    e.b_z = b;
    const auto grid =
        build_grid(GridKind::t_prime, larmor_frequency(b, constants), horizon_us);
    const auto series = sample_series(e, constants, grid);
    out.push_back(estimate_from_prime(series, e.size(), horizon_us));
  }
  return out;
}

}  // namespace nvpol
