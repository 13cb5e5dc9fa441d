#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nvpol/constants.hpp"
#include "nvpol/errors.hpp"
#include "nvpol/format.hpp"
#include "nvpol/hyperfine.hpp"
#include "nvpol/vec3.hpp"

namespace nvpol {

// displacement from the qubit in the NV frame (z along the symmetry axis), nm
using SitePosition = Vec3;

struct BathSpin {
  CouplingRow coupling;
  double p = 0.0;                        // initial polarization, [-1, 1]
  std::optional<SitePosition> position;  // kept when the spin came from a lattice
};

// One concrete realization of the nuclear environment plus the applied field.
struct EnvironmentRealization {
  std::vector<BathSpin> spins;
  double b_z = 0.0;  // tesla

  int size() const { return static_cast<int>(spins.size()); }

  double max_abs_polarization() const {
    double m = 0;
    for (const auto& s : spins) m = std::max(m, std::abs(s.p));
    return m;
  }

  void validate() const {
    if (spins.empty()) throw ValidationError("empty environment");
    for (std::size_t k = 0; k < spins.size(); ++k) {
      const auto& s = spins[k];
      if (!(std::abs(s.p) <= 1.0))
        throw ValidationError("polarization out of range at index " + std::to_string(k));
      if (!std::isfinite(s.coupling.azx) || !std::isfinite(s.coupling.azy) ||
          !std::isfinite(s.coupling.azz))
        throw ValidationError("non-finite coupling row at index " + std::to_string(k));
    }
  }
};

inline EnvironmentRealization set_polarizations(EnvironmentRealization env, double uniform) {
  if (!(std::abs(uniform) <= 1.0))
    throw ValidationError("set_polarizations: value " + detail::format_g9(uniform) +
                          " outside [-1, 1]");
  for (auto& s : env.spins) s.p = uniform;
  return env;
}

inline EnvironmentRealization set_polarizations(EnvironmentRealization env,
                                                const std::vector<double>& p) {
  if (p.size() != env.spins.size())
    throw ValidationError("set_polarizations: got " + std::to_string(p.size()) +
                          " values for " + std::to_string(env.spins.size()) + " spins");
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(std::abs(p[k]) <= 1.0))
      throw ValidationError("set_polarizations: value out of range at index " +
                            std::to_string(k));
    env.spins[k].p = p[k];
  }
  return env;
}

// either one value for every spin or an explicit per-spin list
struct PolarizationSpec {
  std::optional<double> uniform;
  std::vector<double> per_spin;

  bool empty() const { return !uniform && per_spin.empty(); }

  EnvironmentRealization apply(EnvironmentRealization env) const {
    if (uniform && !per_spin.empty())
      throw ValidationError("polarization spec: give either a uniform value or a list, not both");
    if (uniform) return set_polarizations(std::move(env), *uniform);
    if (!per_spin.empty()) return set_polarizations(std::move(env), per_spin);
    return env;
  }
};

// Canonical content hash (couplings at 9 significant digits, polarizations,
// field). Stable across platforms; used to tie series files to the
// environment they came from.
inline std::string fingerprint(const EnvironmentRealization& env) {
  std::string s = "B_z=" + detail::format_g9(env.b_z);
  for (const auto& spin : env.spins) {
    s += ";" + detail::format_g9(spin.coupling.azx) + "," +
         detail::format_g9(spin.coupling.azy) + "," +
         detail::format_g9(spin.coupling.azz) + "," + detail::format_g9(spin.p);
  }
  return detail::to_hex(detail::fnv1a64(s));
}

inline std::vector<DressedSpin> dressed_spins(const EnvironmentRealization& env,
                                              const PhysicalConstants& c) {
  const double omega = larmor_frequency(env.b_z, c);
  std::vector<DressedSpin> out;
  out.reserve(env.spins.size());
  for (const auto& s : env.spins) out.push_back(dress(s.coupling, omega, s.p));
  return out;
}

// Spins whose amplitude nearly vanishes (omega + Azz ~ 0) contribute a
// vacuous factor to the polarization bound; flagged so runs can warn or,
// under strict mode, refuse.
inline std::vector<std::size_t> detect_degenerate_spins(const EnvironmentRealization& env,
                                                        const PhysicalConstants& c,
                                                        double threshold = 1e-6) {
  const double omega = larmor_frequency(env.b_z, c);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < env.spins.size(); ++k) {
    const auto& row = env.spins[k].coupling;
    const double wk = effective_frequency(row, omega);
    if (wk == 0.0 || std::abs((omega + row.azz) / wk) < threshold) out.push_back(k);
  }
  return out;
}

}  // namespace nvpol
