#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nvpol/errors.hpp"

namespace nvpol {

// Measurement grids locked to the bath Larmor frequency:
//   t_prime        t'_n  = (2pi/omega)(n + 1/2), where cos(omega t/2) = 0
//   t_doubleprime  t''_n = (2pi/omega) n,        where sin(omega t/2) = 0
//   continuous     plain dt-spaced sampling for curve plotting
enum class GridKind { continuous, t_prime, t_doubleprime };

inline const char* to_string(GridKind k) {
  switch (k) {
    case GridKind::continuous: return "continuous";
    case GridKind::t_prime: return "prime";
    default: return "doubleprime";
  }
}

inline GridKind grid_kind_from_string(const std::string& s) {
  if (s == "continuous") return GridKind::continuous;
  if (s == "prime") return GridKind::t_prime;
  if (s == "doubleprime") return GridKind::t_doubleprime;
  throw ValidationError("unknown grid kind '" + s +
                        "' (expected prime, doubleprime or continuous)");
}

struct TimeGrid {
  GridKind kind = GridKind::t_prime;
  double omega = 0;   // rad/us
  double t_max = 0;   // us
  double dt = 0;      // us, continuous only
  long n_start = 0;   // first index of a discrete grid
  std::vector<double> times;

  // lock index of the i-th sample (discrete kinds)
  long index_of(std::size_t i) const { return n_start + static_cast<long>(i); }
};

inline TimeGrid build_grid(GridKind kind, double omega, double t_max, double dt = 0.0,
                           long n_start = 0) {
  if (!(omega > 0) || !std::isfinite(omega))
    throw ValidationError("build_grid: omega must be positive (grids are locked to the Larmor frequency)");
  if (!(t_max > 0) || !std::isfinite(t_max))
    throw ValidationError("build_grid: t_max must be positive");
  if (n_start < 0) throw ValidationError("build_grid: n_start must be >= 0");

  TimeGrid g;
  g.kind = kind;
  g.omega = omega;
  g.t_max = t_max;
  g.dt = dt;
  g.n_start = n_start;

  const double period = 2.0 * std::numbers::pi / omega;
  switch (kind) {
    case GridKind::continuous: {
      if (!(dt > 0)) throw ValidationError("build_grid: continuous grid needs dt > 0");
      const long steps = static_cast<long>(std::floor(t_max / dt + 1e-9));
      g.times.reserve(steps + 1);
      for (long j = 0; j <= steps; ++j) g.times.push_back(j * dt);
      break;
    }
    case GridKind::t_prime:
      for (long n = n_start;; ++n) {
        const double t = period * (n + 0.5);
        if (t > t_max) break;
        g.times.push_back(t);
      }
      break;
    case GridKind::t_doubleprime:
      for (long n = n_start;; ++n) {
        const double t = period * n;
        if (t > t_max) break;
        g.times.push_back(t);
      }
      break;
  }
  return g;
}

}  // namespace nvpol
