#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "nvpol/coherence.hpp"
#include "nvpol/constants.hpp"
#include "nvpol/environment.hpp"
#include "nvpol/errors.hpp"
#include "nvpol/hyperfine.hpp"

// Brute-force cross-checks of the closed forms: conditional unitary
// evolution on explicit Hilbert spaces, 2x2 per spin and 2^N for the
// whole bath. Nothing here is needed for estimation; it exists to verify.

namespace nvpol {

using Matrix2c = Eigen::Matrix2cd;

namespace oracle_detail {
inline const std::complex<double> im{0.0, 1.0};
}

// spin-1/2 operators, half the Pauli matrices
inline Matrix2c spin_x() {
  Matrix2c m;
  m << 0.0, 0.5, 0.5, 0.0;
  return m;
}
inline Matrix2c spin_y() {
  Matrix2c m;
  m << 0.0, -0.5 * oracle_detail::im, 0.5 * oracle_detail::im, 0.0;
  return m;
}
inline Matrix2c spin_z() {
  Matrix2c m;
  m << 0.5, 0.0, 0.0, -0.5;
  return m;
}

// conditional single-spin Hamiltonians: free precession vs precession
// plus the secular coupling row
struct SpinHamiltonianPair {
  Matrix2c h0;  // omega I_z
  Matrix2c h1;  // omega I_z + Azx I_x + Azy I_y + Azz I_z
};

inline SpinHamiltonianPair spin_hamiltonian_pair(const CouplingRow& row, double omega) {
  SpinHamiltonianPair pair;
  pair.h0 = omega * spin_z();
  pair.h1 = pair.h0 + row.azx * spin_x() + row.azy * spin_y() + row.azz * spin_z();
  return pair;
}

// exp(-i H t) for Hermitian H via eigendecomposition
inline Matrix2c hermitian_propagator(const Matrix2c& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix2c> es(h);
  const auto& v = es.eigenvectors();
  Eigen::Vector2cd phases;
  for (int j = 0; j < 2; ++j)
    phases(j) = std::exp(-oracle_detail::im * es.eigenvalues()(j) * t);
  return v * phases.asDiagonal() * v.adjoint();
}

// closed rotation form exp(-i t h.S) = cos(|h|t/2) - i sin(|h|t/2) hhat.sigma,
// the cross-check on the eigensolver route
inline Matrix2c pauli_rotation_propagator(double hx, double hy, double hz, double t) {
  const double h = std::sqrt(hx * hx + hy * hy + hz * hz);
  if (h == 0.0) return Matrix2c::Identity();
  const double half = 0.5 * h * t;
  const double c = std::cos(half);
  const std::complex<double> s = -oracle_detail::im * std::sin(half) / h;
  Matrix2c m;
  m << c + s * hz, s * (hx - oracle_detail::im * hy),
       s * (hx + oracle_detail::im * hy), c - s * hz;
  return m;
}

inline std::pair<Matrix2c, Matrix2c> conditional_propagators(const SpinHamiltonianPair& pair,
                                                             double t) {
  return {hermitian_propagator(pair.h0, t), hermitian_propagator(pair.h1, t)};
}

// single-spin thermal-like state with polarization p along z
inline Matrix2c spin_state(double p) {
  if (!(std::abs(p) <= 1.0)) throw ValidationError("spin_state: |p| must be <= 1");
  Matrix2c m = Matrix2c::Zero();
  m(0, 0) = 0.5 * (1.0 + p);
  m(1, 1) = 0.5 * (1.0 - p);
  return m;
}

// Per-spin dephasing factor from conditional evolution. The decoupled
// branch propagates on the left of the coherence element, so the factor is
// Tr[U0 rho U1^dag]; this reproduces the closed-form single_spin_factor
// exactly (the opposite ordering gives its complex conjugate).
inline std::complex<double> oracle_single_factor(const CouplingRow& row, double p,
                                                 double omega, double t) {
  const auto [u0, u1] = conditional_propagators(spin_hamiltonian_pair(row, omega), t);
  return (u0 * spin_state(p) * u1.adjoint()).trace();
}

namespace oracle_detail {

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// I x ... x m (slot k) x ... x I on n spins
inline Eigen::MatrixXcd embed(const Matrix2c& m, int k, int n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int j = 0; j < n; ++j)
    out = kron(out, j == k ? Eigen::MatrixXcd(m)
                           : Eigen::MatrixXcd(Matrix2c::Identity()));
  return out;
}

}  // namespace oracle_detail

inline constexpr int full_system_max_spins = 12;

// Dense full-bath coherence: rho01(t) = 1/2 [phase] Tr[U0 R(0) U1^dag] with
// U0 = exp(-i H_E t), U1 = exp(-i (H_E + V) t) on the full 2^N space and
// R(0) the product of single-spin states. Verifies that the coherence
// factorizes into the per-spin closed forms.
inline std::complex<double> full_system_coherence(const EnvironmentRealization& env,
                                                  const PhysicalConstants& constants,
                                                  double t,
                                                  bool include_free_phase = false) {
  env.validate();
  const int n = env.size();
  if (n > full_system_max_spins)
    throw ResourceError("full_system_coherence: dense oracle capped at " +
                        std::to_string(full_system_max_spins) + " spins");
  const double omega = larmor_frequency(env.b_z, constants);
  const Eigen::Index dim = Eigen::Index(1) << n;

  Eigen::MatrixXcd h_env = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd h_coupled = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd state = Eigen::MatrixXcd::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    const auto& row = env.spins[k].coupling;
    h_env += oracle_detail::embed(omega * spin_z(), k, n);
    h_coupled += oracle_detail::embed(
        omega * spin_z() + row.azx * spin_x() + row.azy * spin_y() + row.azz * spin_z(),
        k, n);
    state = oracle_detail::kron(state, spin_state(env.spins[k].p));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es0(h_env);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es1(h_coupled);
  Eigen::VectorXcd ph0(dim), ph1(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    ph0(j) = std::exp(-oracle_detail::im * es0.eigenvalues()(j) * t);
    ph1(j) = std::exp(-oracle_detail::im * es1.eigenvalues()(j) * t);
  }
  const Eigen::MatrixXcd u0 =
      es0.eigenvectors() * ph0.asDiagonal() * es0.eigenvectors().adjoint();
  const Eigen::MatrixXcd u1 =
      es1.eigenvectors() * ph1.asDiagonal() * es1.eigenvectors().adjoint();

  std::complex<double> out = 0.5 * (u0 * state * u1.adjoint()).trace();
  if (include_free_phase) out *= free_phase(t, env.b_z, constants);
  return out;
}

// ---- randomized verification battery ----------------------------------

struct VerificationReport {
  int single_factor_trials = 0;
  double worst_single_factor_dev = 0;   // vs closed form, budget 1e-10
  // eigensolver vs rotation form; phases reach ~3e3 rad so entries carry
  // ~|lambda| t eps of irreducible drift, budget 1e-10
  double worst_propagator_cross_dev = 0;
  double worst_unitarity_defect = 0;    // ||U U^dag - 1||_max, 1e-13
  int factorization_trials = 0;
  double worst_factorization_dev = 0;   // |full - product|/N, budget 1e-9
  double worst_phase_flag_dev = 0;      // |abs(with phase) - abs(without)|, 1e-12
  double worst_state_eigenvalue_dev = 0;
  bool pass = false;
};

inline VerificationReport run_verification(std::uint64_t seed = 20250819,
                                           int single_trials = 10000,
                                           int envs_per_size = 2,
                                           int times_per_env = 100) {
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(); };

  PhysicalConstants constants;  // defaults; the battery is convention-agnostic
  VerificationReport rep;

  for (int trial = 0; trial < single_trials; ++trial) {
    CouplingRow row;
    row.azx = uniform(-2.0, 2.0);
    row.azy = uniform(-2.0, 2.0);
    row.azz = uniform(-2.0, 2.0);
    const double omega = uniform(0.5, 60.0);
    const double p = uniform(-1.0, 1.0);
    const double t = uniform(0.0, 100.0);

    const auto closed = single_spin_factor(t, dress(row, omega, p), omega);
    const auto traced = oracle_single_factor(row, p, omega, t);
    rep.worst_single_factor_dev =
        std::max(rep.worst_single_factor_dev, std::abs(closed - traced));

    const auto pair = spin_hamiltonian_pair(row, omega);
    const auto [u0, u1] = conditional_propagators(pair, t);
    const auto u1_rot = pauli_rotation_propagator(row.azx, row.azy, omega + row.azz, t);
    rep.worst_propagator_cross_dev = std::max(
        rep.worst_propagator_cross_dev, (u1 - u1_rot).cwiseAbs().maxCoeff());
    rep.worst_unitarity_defect =
        std::max({rep.worst_unitarity_defect,
                  (u0 * u0.adjoint() - Matrix2c::Identity()).cwiseAbs().maxCoeff(),
                  (u1 * u1.adjoint() - Matrix2c::Identity()).cwiseAbs().maxCoeff()});

    const Matrix2c rho = spin_state(p);
    rep.worst_state_eigenvalue_dev =
        std::max({rep.worst_state_eigenvalue_dev,
                  std::abs(rho(0, 0).real() - 0.5 * (1.0 + p)),
                  std::abs(rho(1, 1).real() - 0.5 * (1.0 - p))});
  }
  rep.single_factor_trials = single_trials;

  for (int n = 1; n <= 6; ++n) {
    for (int e = 0; e < envs_per_size; ++e) {
      EnvironmentRealization env;
      const double omega = uniform(2.0, 40.0);
      env.b_z = omega / (constants.gamma_n * constants.angular_scale());
      for (int k = 0; k < n; ++k) {
        BathSpin s;
        s.coupling.azx = uniform(-1.0, 1.0);
        s.coupling.azy = uniform(-1.0, 1.0);
        s.coupling.azz = uniform(-1.0, 1.0);
        s.p = uniform(-1.0, 1.0);
        env.spins.push_back(s);
      }
      for (int j = 0; j < times_per_env; ++j) {
        const double t = uniform(0.0, 50.0);
        const bool with_phase = (rng() & 1) != 0;
        const auto full = full_system_coherence(env, constants, t, with_phase);
        const auto closed = coherence(t, env, constants, with_phase);
        rep.worst_factorization_dev =
            std::max(rep.worst_factorization_dev, std::abs(full - closed) / n);
        const auto full_other = full_system_coherence(env, constants, t, !with_phase);
        rep.worst_phase_flag_dev = std::max(
            rep.worst_phase_flag_dev, std::abs(std::abs(full) - std::abs(full_other)));
        ++rep.factorization_trials;
      }
    }
  }

  rep.pass = rep.worst_single_factor_dev < 1e-10 &&
             rep.worst_propagator_cross_dev < 1e-10 &&
             rep.worst_unitarity_defect < 1e-13 &&
             rep.worst_factorization_dev < 1e-9 &&
             rep.worst_phase_flag_dev < 1e-12 &&
             rep.worst_state_eigenvalue_dev == 0.0;
  return rep;
}

}  // namespace nvpol
