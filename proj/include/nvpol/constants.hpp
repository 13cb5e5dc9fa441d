#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "nvpol/errors.hpp"

namespace nvpol {

// Units used throughout: frequencies rad/us, fields tesla, distances nm,
// times us. Coupling tables and gyromagnetic ratios are usually quoted as
// plain numbers whose 2pi bookkeeping differs between sources, so the
// interpretation is explicit:
//   as_given      values are already angular (rad/us per tesla etc.)
//   times_two_pi  values are ordinary frequencies (MHz per tesla), scaled
//                 by 2pi on use
enum class AngularConvention { as_given, times_two_pi };

inline const char* to_string(AngularConvention c) {
  return c == AngularConvention::as_given ? "as_given" : "times_two_pi";
}

inline AngularConvention angular_convention_from_string(const std::string& s) {
  if (s == "as_given") return AngularConvention::as_given;
  if (s == "times_two_pi") return AngularConvention::times_two_pi;
  throw ValidationError("unknown angular convention '" + s +
                        "' (expected as_given or times_two_pi)");
}

// dipolar prefactor (mu0/4pi) gamma_e gamma_n hbar for the 13C bath,
// converted to rad nm^3 / us
inline constexpr double mu0_over_4pi_si = 1e-7;          // T m / A
inline constexpr double hbar_si = 1.054571817e-34;       // J s
inline constexpr double gamma_e_si = 1.76085963023e11;   // rad / (s T)
inline constexpr double gamma_c13_si = 67.2828e6;        // rad / (s T)
inline constexpr double default_dipolar_prefactor =
    mu0_over_4pi_si * gamma_e_si * gamma_c13_si * hbar_si * 1e21;

struct PhysicalConstants {
  // bath (13C) gyromagnetic ratio; rad/(us T) under as_given
  double gamma_n = 10.71;
  // electron gyromagnetic ratio, only enters the optional free-phase factor
  // (quoted sources vary on MHz/T vs GHz/T; taken verbatim, configurable)
  double gamma_e = 28.08;
  // zero-field splitting in GHz, likewise only in the free phase
  double delta_ghz = 2.87;
  // coupling strength C in A = (C/r^3)(delta_zj - 3 n_z n_j), rad nm^3/us
  double dipolar_prefactor = default_dipolar_prefactor;
  AngularConvention convention = AngularConvention::as_given;

  double angular_scale() const {
    return convention == AngularConvention::times_two_pi ? 2.0 * std::numbers::pi
                                                         : 1.0;
  }

  // qubit free-precession rate Delta - gamma_e B_z in rad/us; irrelevant
  // for magnitudes, kept for completeness of the off-diagonal element
  double free_phase_rate(double b_z) const {
    return (delta_ghz * 1e3 - gamma_e * b_z) * angular_scale();
  }

  void validate() const {
    if (!(gamma_n > 0) || !std::isfinite(gamma_n))
      throw ValidationError("constants: gamma_n must be positive and finite");
    if (!(dipolar_prefactor > 0) || !std::isfinite(dipolar_prefactor))
      throw ValidationError("constants: dipolar_prefactor must be positive and finite");
    if (!std::isfinite(gamma_e) || !std::isfinite(delta_ghz))
      throw ValidationError("constants: gamma_e and delta_ghz must be finite");
  }
};

}  // namespace nvpol
