#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "nvpol/constants.hpp"
#include "nvpol/errors.hpp"
#include "nvpol/vec3.hpp"

namespace nvpol {

// Secular row (A_zx, A_zy, A_zz) of the qubit-nucleus coupling tensor,
// rad/us. Only this row survives the secular approximation for a
// spin-1/2 qubit subspace, so it is all the dynamics ever needs.
struct CouplingRow {
  double azx = 0, azy = 0, azz = 0;
  std::optional<double> r_nm;  // qubit-nucleus distance, informational

  double transverse2() const { return azx * azx + azy * azy; }
  double norm2() const { return transverse2() + azz * azz; }
  double norm() const { return std::sqrt(norm2()); }
};

// point-dipole coupling row A_zj = (C/r^3)(delta_zj - 3 n_z n_j)
inline CouplingRow coupling_tensor_row(const Vec3& displacement,
                                       const PhysicalConstants& c) {
  const double r = displacement.norm();
  if (!(r > 0) || !std::isfinite(r))
    throw ValidationError("coupling_tensor_row: displacement must be finite and nonzero");
  const Vec3 n = displacement / r;
  const double x = c.dipolar_prefactor / (r * r * r);
  CouplingRow row;
  row.azx = -3.0 * x * n.z * n.x;
  row.azy = -3.0 * x * n.z * n.y;
  row.azz = x * (1.0 - 3.0 * n.z * n.z);
  row.r_nm = r;
  return row;
}

// bath Larmor frequency omega = gamma_n B_z, rad/us; the discrete
// measurement grids are locked to it, hence the positivity requirement
inline double larmor_frequency(double b_z, const PhysicalConstants& c) {
  if (!(b_z > 0) || !std::isfinite(b_z))
    throw ValidationError("larmor_frequency: B_z must be positive (the measurement grids degenerate at omega = 0)");
  return c.gamma_n * c.angular_scale() * b_z;
}

// effective precession frequency of a dressed bath spin,
// omega_k = sqrt(Azx^2 + Azy^2 + (omega + Azz)^2)
inline double effective_frequency(const CouplingRow& row, double omega) {
  const double z = omega + row.azz;
  return std::sqrt(row.transverse2() + z * z);
}

// amplitude a_k = (omega + Azz)/omega_k; |a_k| <= 1 always, and
// a_k -> 1 when the field dominates the coupling
inline double amplitude(const CouplingRow& row, double omega) {
  const double wk = effective_frequency(row, omega);
  if (wk == 0.0)
    throw DegenerateSpinError(
        "amplitude: omega + Azz = 0 with no transverse coupling, the dressed "
        "frequency vanishes; shift the applied field");
  return (omega + row.azz) / wk;
}

// per-spin quantities actually used by the evolution
struct DressedSpin {
  double omega_k = 0;  // effective frequency, rad/us
  double a = 0;        // amplitude in [-1, 1]
  double p = 0;        // initial polarization in [-1, 1]
};

inline DressedSpin dress(const CouplingRow& row, double omega, double p) {
  return {effective_frequency(row, omega), amplitude(row, omega), p};
}

// Inversion of the point-dipole form: given a measured/published row,
// recover the effective prefactor and direction that reproduce it.
struct TensorFit {
  double c_eff = 0;   // effective prefactor at the row's distance, rad nm^3/us
  Vec3 n;             // unit direction, n_z >= 0 representative
  double residual = 0;
};

// Any nonzero row is realizable by some (C > 0, unit n); the fit recovers
// them and the residual certifies the reconstruction. A zero row (or a
// numerically broken one) yields nullopt.
inline std::optional<TensorFit> table_consistency_check(const CouplingRow& row,
                                                        double tolerance = 1e-9) {
  if (!row.r_nm || !(*row.r_nm > 0))
    throw ValidationError("table_consistency_check: the row must carry a distance");
  const double a2 = row.norm2();
  if (!(a2 > 0)) return std::nullopt;

  // with x = C/r^3: |A|^2 = x^2(1 + 3 n_z^2), Azz = x(1 - 3 n_z^2)
  // eliminate n_z: 2x^2 - Azz x - |A|^2 = 0, keep the positive root
  const double x = (row.azz + std::sqrt(row.azz * row.azz + 8.0 * a2)) / 4.0;
  if (!(x > 0) || !std::isfinite(x)) return std::nullopt;

  const double nz2 = std::clamp((1.0 - row.azz / x) / 3.0, 0.0, 1.0);
  const double nz = std::sqrt(nz2);
  const double nt = std::sqrt(std::max(0.0, 1.0 - nz2));
  // transverse components satisfy (n_x, n_y) ~ -(Azx, Azy); the in-plane
  // magnitude nt is fixed by normalization, so only the azimuth is read off
  const double phi = std::atan2(-row.azy, -row.azx);
  const Vec3 n{nt * std::cos(phi), nt * std::sin(phi), nz};

  CouplingRow recon;
  recon.azx = -3.0 * x * n.z * n.x;
  recon.azy = -3.0 * x * n.z * n.y;
  recon.azz = x * (1.0 - 3.0 * n.z * n.z);
  const double scale = std::max(1.0, std::sqrt(a2));
  const double residual = std::max({std::abs(recon.azx - row.azx),
                                    std::abs(recon.azy - row.azy),
                                    std::abs(recon.azz - row.azz)});
  if (residual > tolerance * scale) return std::nullopt;

  const double r = *row.r_nm;
  return TensorFit{x * r * r * r, n, residual};
}

}  // namespace nvpol
