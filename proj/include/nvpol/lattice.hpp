#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "nvpol/constants.hpp"
#include "nvpol/environment.hpp"
#include "nvpol/errors.hpp"
#include "nvpol/hyperfine.hpp"
#include "nvpol/vec3.hpp"

namespace nvpol {

enum class SelectionRule { strongest_coupling, nearest };

inline const char* to_string(SelectionRule r) {
  return r == SelectionRule::strongest_coupling ? "strongest_coupling" : "nearest";
}

inline SelectionRule selection_rule_from_string(const std::string& s) {
  if (s == "strongest_coupling") return SelectionRule::strongest_coupling;
  if (s == "nearest") return SelectionRule::nearest;
  throw ValidationError("unknown selection rule '" + s + "'");
}

struct LatticeConfig {
  std::uint64_t seed = 1;
  double supercell_radius_nm = 3.0;
  double abundance = 0.011;  // natural 13C fraction
  int max_spins = 8;
  SelectionRule selection_rule = SelectionRule::strongest_coupling;
  double exclusion_radius_nm = 0.0;

  void validate() const {
    if (!(abundance >= 0.0 && abundance <= 1.0))
      throw ValidationError("lattice: abundance must be in [0, 1]");
    if (!(supercell_radius_nm > 0))
      throw ValidationError("lattice: supercell_radius must be positive");
    if (max_spins < 1) throw ValidationError("lattice: max_spins must be >= 1");
    if (exclusion_radius_nm < 0)
      throw ValidationError("lattice: exclusion_radius must be >= 0");
  }
};

inline constexpr double diamond_lattice_constant_nm = 0.3567;

// NV frame: z along crystal [111], x along the projection of crystal [100]
// onto the plane normal to z, y completing a right-handed frame.
inline Vec3 crystal_to_nv_frame(const Vec3& r) {
  static const double s6 = 1.0 / std::sqrt(6.0);
  static const double s2 = 1.0 / std::sqrt(2.0);
  static const double s3 = 1.0 / std::sqrt(3.0);
  return {(2.0 * r.x - r.y - r.z) * s6, (r.y - r.z) * s2, (r.x + r.y + r.z) * s3};
}

namespace detail {
// uniform in [0, 1) with exactly 53 random bits; keeps draws identical
// across standard libraries, unlike std::uniform_real_distribution
inline double canonical_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace detail

// Random spinful 13C sites on the diamond lattice inside a ball around the
// vacancy, NV-frame coordinates. Deterministic for a fixed config. An empty
// return (possible at small abundance) is a valid outcome the caller must
// handle; select_environment rejects it explicitly.
inline std::vector<SitePosition> generate_sites(const LatticeConfig& cfg) {
  cfg.validate();
  const double a0 = diamond_lattice_constant_nm;
  const double r_max = cfg.supercell_radius_nm;
  const double r_min = cfg.exclusion_radius_nm;
  const int m = static_cast<int>(std::ceil(r_max / a0)) + 1;

  // conventional cell: FCC translations plus the two-atom basis, all
  // expressed in quarter-lattice-constant integer coordinates
  static constexpr int fcc[4][3] = {{0, 0, 0}, {0, 2, 2}, {2, 0, 2}, {2, 2, 0}};
  static constexpr int basis[2][3] = {{0, 0, 0}, {1, 1, 1}};

  std::mt19937_64 rng(cfg.seed);
  std::vector<SitePosition> sites;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j)
      for (int k = -m; k <= m; ++k)
        for (const auto& f : fcc)
          for (const auto& b : basis) {
            const int qx = 4 * i + f[0] + b[0];
            const int qy = 4 * j + f[1] + b[1];
            const int qz = 4 * k + f[2] + b[2];
            // vacancy at the origin, substitutional nitrogen at (1,1,1)/4 a0
            if (qx == 0 && qy == 0 && qz == 0) continue;
            if (qx == 1 && qy == 1 && qz == 1) continue;
            const Vec3 pos{0.25 * a0 * qx, 0.25 * a0 * qy, 0.25 * a0 * qz};
            const double r = pos.norm();
            if (r > r_max || r < r_min) continue;
            if (detail::canonical_unit(rng) < cfg.abundance)
              sites.push_back(crystal_to_nv_frame(pos));
          }
  return sites;
}

// Couple every site and keep the max_spins highest-ranked ones; rank by
// coupling-row magnitude or by distance depending on the rule.
inline EnvironmentRealization select_environment(const std::vector<SitePosition>& sites,
                                                 const PhysicalConstants& constants,
                                                 const LatticeConfig& cfg) {
  cfg.validate();
  if (sites.empty()) throw ValidationError("empty environment: no spinful site was drawn");

  std::vector<BathSpin> spins;
  spins.reserve(sites.size());
  for (const auto& pos : sites) {
    BathSpin s;
    s.coupling = coupling_tensor_row(pos, constants);
    s.position = pos;
    spins.push_back(s);
  }

  auto rank = [&cfg](const BathSpin& s) {
    return cfg.selection_rule == SelectionRule::strongest_coupling
               ? -s.coupling.norm()
               : s.position->norm();
  };
  std::stable_sort(spins.begin(), spins.end(),
                   [&](const BathSpin& a, const BathSpin& b) { return rank(a) < rank(b); });
  if (static_cast<int>(spins.size()) > cfg.max_spins) spins.resize(cfg.max_spins);

  EnvironmentRealization env;
  env.spins = std::move(spins);
  return env;
}

}  // namespace nvpol
