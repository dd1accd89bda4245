#pragma once

#include <vector>

#include "stackcap/circuit.hpp"
#include "stackcap/core.hpp"

namespace stackcap::timescale {

/// Spectrum of the charging dynamics linearized about equilibrium, i.e. of
/// alpha diag(m_k C(zeta_inf_k))^{-1} T. All eigenvalues are real and
/// nonnegative; exactly one vanishes (the conserved-charge mode), and the
/// reciprocal of the smallest positive one is the charging timescale tau_n.
struct SpectrumReport {
  std::vector<double> eigenvalues;  ///< ascending, size 2n
  double lambda_c = 0.0;            ///< smallest eigenvalue above threshold
  double tau_n = 0.0;               ///< 1/lambda_c, in units of tau_c
  double zero_threshold = 0.0;      ///< 1e-10 * max eigenvalue
};

/// Computes the spectrum by the exact similarity transform to the symmetric
/// tridiagonal matrix W^{-1/2} (alpha T) W^{-1/2}, W = diag(m_k C(zeta_k)).
/// Requires zeta_inf to be a converged equilibrium (residual checked; throws
/// ParameterError otherwise).
SpectrumReport spectrum(const circuit::CircuitSystem& s, const circuit::ZetaVector& zeta_inf);

/// assemble -> equilibrium -> spectrum; returns tau_n in units of tau_c.
double charging_timescale(const StackGeometry& g, const DriveSpec& d, const ElectrolyteSpec& e);

struct SweepRow {
  int n = 0;
  double H = 0.0;
  double ratio = 0.0;  ///< H / L
  double tau_n = 0.0;
};

struct SweepFit {
  double H = 0.0;
  double A = 0.0;          ///< slope of tau_n vs n
  double B = 0.0;          ///< intercept
  double r_squared = 0.0;  ///< regression quality over n >= 5
};

struct SweepTable {
  std::vector<SweepRow> rows;  ///< keyed by (n, H), H-major then n ascending
  std::vector<SweepFit> fits;  ///< one per H
};

/// tau_n for every (H, n) pair with L = 1 - H, plus per-H linear fits
/// tau_n = A(H) n + B(H) over the rows with n >= 5. Entries are independent
/// and are fanned out over `threads` worker threads when threads > 1.
SweepTable sweep_tau_vs_n(const ElectrolyteSpec& e, const DriveSpec& d,
                          const std::vector<double>& H_list, int n_min, int n_max,
                          int threads = 1);

/// Fits log ||zeta(t) - zeta_inf||_2 to a line over samples with t in
/// [t_lo, t_hi] and returns the decay rate (-slope). The window must sit in
/// the late-time regime: the gap at t_lo must be below 10% of the initial
/// gap ||zeta_inf||. Throws FitError when the window is too short, the drive
/// gives no signal, or the gap has reached the numerical noise floor.
double relaxation_rate_fit(const circuit::ZetaTrajectory& traj,
                           const circuit::ZetaVector& zeta_inf, double t_lo, double t_hi);

}  // namespace stackcap::timescale
