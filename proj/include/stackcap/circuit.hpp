#pragma once

#include <cstddef>
#include <vector>

#include "stackcap/core.hpp"

namespace stackcap::circuit {

/// 2n boundary-layer potential drops ordered
///   [zeta^{n,L}, ..., zeta^{1,L}, zeta^{1',R}, ..., zeta^{n',R}],
/// i.e. left stacks from the outer wall inward, then right stacks from the
/// center outward; index n-1 and n are the two center-adjacent layers.
using ZetaVector = std::vector<double>;

/// Assembled reduced model: m_k C(zeta_k) dzeta_k/dt = alpha (-T zeta + Y)_k.
///
/// T is symmetric tridiagonal with zero row sums (T 1 = 0): off-diagonals
/// -1/h except the central coupling -1/(2L); Y vanishes except in the two
/// central rows (-(V+ - V-)/(2L), +(V+ - V-)/(2L)); the multiplicities m are
/// (1, 2, ..., 2, 1) because interior stacks carry a layer on both faces.
struct CircuitSystem {
  ElectrolyteSpec electrolyte;
  StackGeometry geometry;
  DriveSpec drive;
  std::vector<double> T_diag;  ///< size 2n
  std::vector<double> T_off;   ///< size 2n-1 (symmetric off-diagonal)
  std::vector<double> Y;       ///< size 2n
  std::vector<double> m;       ///< size 2n, multiplicity weights

  std::size_t size() const { return T_diag.size(); }
};

/// Builds T, Y and m for the given geometry/drive/electrolyte. For n = 1 the
/// two-variable system has T = (1/(2L)) [[1,-1],[-1,1]], m = (1, 1).
CircuitSystem assemble(const StackGeometry& g, const DriveSpec& d, const ElectrolyteSpec& e);

/// y = T x (tridiagonal product).
void apply_T(const CircuitSystem& s, const ZetaVector& x, ZetaVector& y);

/// dzeta/dt = alpha diag(m_k C(zeta_k))^{-1} (-T zeta + Y).
ZetaVector rhs(const ZetaVector& state, const CircuitSystem& s);

/// Bulk currents implied by a state, one per sub-domain, ordered from the
/// left outer wall to the right outer wall (2n-1 values; 1 for n = 1):
///   [j^n, ..., j^2, j^1, j^{2'}, ..., j^{n'}],
/// with j^1 = (zeta^{1,L} - zeta^{1',R} + V+ - V-)/(2L) through the central
/// bulk and j^k = (zeta^{k,L} - zeta^{k-1,L})/h between stacks (mirrored on
/// the right half).
std::vector<double> currents(const ZetaVector& state, const CircuitSystem& s);

/// Integration control for the adaptive implicit integrator.
struct IntegrateControl {
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 0.0;      ///< 0 = unlimited
  double initial_step = 1e-3;
};

/// Time history of the reduced model from zero initial data.
struct ZetaTrajectory {
  std::vector<double> times;
  std::vector<ZetaVector> states;
  std::vector<std::vector<double>> currents;  ///< per sample, see currents()
};

/// Integrates the stiff ODE system from zeta = 0 to t_final with an
/// L-stable two-stage singly diagonally implicit (SDIRK2) method, adaptive
/// step-doubling error control, and Newton stage solves using the analytic
/// tridiagonal Jacobian. States are recorded exactly at `sample_times`
/// (default: 201 equally spaced samples including t = 0 and t_final).
/// Throws NumericError on step-size collapse or Newton failure.
ZetaTrajectory integrate(const CircuitSystem& s, double t_final,
                         const IntegrateControl& ctrl = {},
                         std::vector<double> sample_times = {});

/// Equilibrium state: T zeta = Y on the range of T, with the nullspace
/// component pinned by the conserved total charge sum m_k Q(zeta_k) = 0
/// carried from zero initial data. All left drops equal a, all right drops
/// equal a + (V+ - V-); a solves a strictly monotone scalar equation by a
/// safeguarded Newton iteration (residual <= 1e-13).
ZetaVector equilibrium(const CircuitSystem& s);

/// Conserved total diffuse charge sum m_k Q_signed(zeta_k); identically 0
/// along every trajectory started from zero initial data.
double conserved_charge(const ZetaVector& state, const CircuitSystem& s);

}  // namespace stackcap::circuit
