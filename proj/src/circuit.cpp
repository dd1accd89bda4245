#include "stackcap/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stackcap/edl.hpp"
#include "stackcap/tridiag.hpp"

namespace stackcap::circuit {

CircuitSystem assemble(const StackGeometry& g, const DriveSpec& d, const ElectrolyteSpec& e) {
  if (g.n < 1) throw ParameterError("assemble: geometry must have n >= 1");
  if (std::fabs(g.L + g.H - 1.0) > 1e-12)
    throw ParameterError("assemble: geometry must satisfy L + H = 1");
  if (g.n == 1 && g.H != 0.0)
    throw ParameterError("assemble: n = 1 requires H = 0 (two-plate cell)");

  CircuitSystem s;
  s.electrolyte = e;
  s.geometry = g;
  s.drive = d;

  const std::size_t N = static_cast<std::size_t>(2 * g.n);
  s.T_diag.assign(N, 0.0);
  s.T_off.assign(N - 1, 0.0);
  s.Y.assign(N, 0.0);
  s.m.assign(N, 2.0);
  s.m.front() = 1.0;
  s.m.back() = 1.0;

  const double dV = d.V_plus - d.V_minus;
  const double cL = 1.0 / (2.0 * g.L);  // central bulk coupling

  if (g.n == 1) {
    s.T_diag = {cL, cL};
    s.T_off = {-cL};
    s.Y = {-dV * cL, +dV * cL};
    return s;
  }

  const double ih = 1.0 / g.h();
  const std::size_t n = static_cast<std::size_t>(g.n);
  for (std::size_t i = 0; i + 1 < N; ++i) s.T_off[i] = -ih;
  s.T_off[n - 1] = -cL;  // coupling across the central bulk
  s.T_diag.front() = ih;
  s.T_diag.back() = ih;
  for (std::size_t i = 1; i + 1 < N; ++i) s.T_diag[i] = 2.0 * ih;
  s.T_diag[n - 1] = ih + cL;
  s.T_diag[n] = ih + cL;
  s.Y[n - 1] = -dV * cL;
  s.Y[n] = +dV * cL;
  return s;
}

void apply_T(const CircuitSystem& s, const ZetaVector& x, ZetaVector& y) {
  const std::size_t N = s.size();
  y.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    double v = s.T_diag[i] * x[i];
    if (i > 0) v += s.T_off[i - 1] * x[i - 1];
    if (i + 1 < N) v += s.T_off[i] * x[i + 1];
    y[i] = v;
  }
}

ZetaVector rhs(const ZetaVector& state, const CircuitSystem& s) {
  const std::size_t N = s.size();
  if (state.size() != N) throw ParameterError("rhs: state size mismatch");
  const double a = alpha(s.electrolyte);
  ZetaVector Tz;
  apply_T(s, state, Tz);
  ZetaVector f(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double C = edl::differential_capacitance(state[i], s.electrolyte);
    f[i] = a * (s.Y[i] - Tz[i]) / (s.m[i] * C);
  }
  return f;
}

std::vector<double> currents(const ZetaVector& state, const CircuitSystem& s) {
  const std::size_t N = s.size();
  if (state.size() != N) throw ParameterError("currents: state size mismatch");
  const std::size_t n = N / 2;
  const double dV = s.drive.V_plus - s.drive.V_minus;
  std::vector<double> j(N - 1);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    if (i == n - 1)
      j[i] = (state[i] - state[i + 1] + dV) / (2.0 * s.geometry.L);
    else
      j[i] = (state[i] - state[i + 1]) / s.geometry.h();
  }
  return j;
}

double conserved_charge(const ZetaVector& state, const CircuitSystem& s) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    total += s.m[i] * edl::signed_diffuse_charge(state[i], s.electrolyte);
  return total;
}

namespace {

// One Newton-solved SDIRK stage: solve Y = r + gamma_h f(Y). Returns false if
// Newton stalls (caller shrinks the step). On success Y holds the stage state.
bool solve_stage(const CircuitSystem& s, const ZetaVector& r, double gamma_h, ZetaVector& Y,
                 double newton_tol) {
  const std::size_t N = s.size();
  const double a = alpha(s.electrolyte);
  ZetaVector Tz(N), f(N), C(N), Cp(N), g(N), lower(N - 1), diag(N), upper(N - 1), scratch;
  for (int it = 0; it < 25; ++it) {
    apply_T(s, Y, Tz);
    bool finite = true;
    for (std::size_t i = 0; i < N; ++i) {
      C[i] = edl::differential_capacitance(Y[i], s.electrolyte);
      Cp[i] = edl::capacitance_derivative(Y[i], s.electrolyte);
      f[i] = a * (s.Y[i] - Tz[i]) / (s.m[i] * C[i]);
      g[i] = Y[i] - r[i] - gamma_h * f[i];
      finite = finite && std::isfinite(g[i]);
    }
    if (!finite) return false;
    double gnorm = 0.0;
    for (std::size_t i = 0; i < N; ++i) gnorm = std::max(gnorm, std::fabs(g[i]));
    if (gnorm <= newton_tol) return true;
    // Jacobian of f is tridiagonal: -alpha T_ij/(m_i C_i) off the diagonal;
    // the diagonal additionally carries the capacitance dependence.
    for (std::size_t i = 0; i < N; ++i) {
      const double Ji = -a * s.T_diag[i] / (s.m[i] * C[i]) - f[i] * Cp[i] / C[i];
      diag[i] = 1.0 - gamma_h * Ji;
      if (i + 1 < N) {
        const double Jo = -a * s.T_off[i];
        upper[i] = -gamma_h * Jo / (s.m[i] * C[i]);
        lower[i] = -gamma_h * Jo / (s.m[i + 1] * C[i + 1]);
      }
    }
    solve_tridiagonal(lower, diag, upper, g, scratch);
    for (std::size_t i = 0; i < N; ++i) Y[i] -= g[i];
  }
  return false;
}

// Shifts the state along the nullspace of T (a constant added to every zeta)
// until the conserved total charge returns to `target`. The shift leaves
// -T zeta + Y unchanged (T 1 = 0), so it corrects only the neutral mode,
// which the truncation error of any Runge-Kutta step lets wander because the
// invariant sum m_k Q(zeta_k) is nonlinear in zeta. The scalar equation is
// strictly monotone (dq/dshift = -sum m_k C < 0); Newton converges in one or
// two iterations for the tiny per-step drift this repairs.
void project_conserved_charge(const CircuitSystem& s, ZetaVector& y, double target) {
  const std::size_t N = s.size();
  for (int it = 0; it < 8; ++it) {
    double q = -target, dq = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double qi = s.m[i] * edl::signed_diffuse_charge(y[i], s.electrolyte);
      q += qi;
      scale += std::fabs(qi);
      dq -= s.m[i] * edl::differential_capacitance(y[i], s.electrolyte);
    }
    if (std::fabs(q) <= 1e-15 * scale) return;
    const double shift = -q / dq;
    if (!std::isfinite(shift)) return;
    for (std::size_t i = 0; i < N; ++i) y[i] += shift;
  }
}

// One SDIRK2 step (Alexander's L-stable two-stage method, gamma = 1 - 1/sqrt 2).
bool sdirk2_step(const CircuitSystem& s, const ZetaVector& y, double h, ZetaVector& out,
                 double newton_tol) {
  constexpr double gamma = 0.29289321881345248;  // 1 - 1/sqrt(2)
  const std::size_t N = s.size();
  ZetaVector Y1 = y;
  if (!solve_stage(s, y, gamma * h, Y1, newton_tol)) return false;
  // f(Y1) = (Y1 - y)/(gamma h) algebraically; reusing it keeps the two
  // stages consistent without re-evaluating the right-hand side.
  ZetaVector r(N);
  const double w = (1.0 - gamma) / gamma;
  for (std::size_t i = 0; i < N; ++i) r[i] = y[i] + w * (Y1[i] - y[i]);
  out = Y1;
  return solve_stage(s, r, gamma * h, out, newton_tol);
}

}  // namespace

ZetaTrajectory integrate(const CircuitSystem& s, double t_final, const IntegrateControl& ctrl,
                         std::vector<double> sample_times) {
  if (!(t_final > 0.0)) throw ParameterError("integrate: t_final must be > 0");
  const std::size_t N = s.size();

  if (sample_times.empty()) {
    sample_times.resize(201);
    for (std::size_t i = 0; i < sample_times.size(); ++i)
      sample_times[i] = t_final * static_cast<double>(i) / 200.0;
  }
  std::sort(sample_times.begin(), sample_times.end());
  if (sample_times.front() < 0.0 || sample_times.back() > t_final * (1.0 + 1e-12))
    throw ParameterError("integrate: sample times must lie in [0, t_final]");

  ZetaTrajectory traj;
  traj.times.reserve(sample_times.size());
  traj.states.reserve(sample_times.size());
  traj.currents.reserve(sample_times.size());

  ZetaVector y(N, 0.0), y_full(N), y_half(N), y_new(N);
  double t = 0.0;
  double h = ctrl.initial_step > 0.0 ? ctrl.initial_step : 1e-3;
  const double h_floor = 1e-14 * std::max(1.0, t_final);
  const double newton_tol = std::max(1e-14, 0.01 * ctrl.atol);

  auto record = [&](double tt) {
    traj.times.push_back(tt);
    traj.states.push_back(y);
    traj.currents.push_back(currents(y, s));
  };

  std::size_t si = 0;
  while (si < sample_times.size() && sample_times[si] <= t + h_floor) {
    record(sample_times[si]);
    ++si;
  }

  while (si < sample_times.size()) {
    const double target = sample_times[si];
    if (ctrl.max_step > 0.0) h = std::min(h, ctrl.max_step);
    double h_try = std::min(h, target - t);
    bool accepted = false;
    double err = 0.0;
    while (!accepted) {
      if (h_try < h_floor)
        throw NumericError("integrate: step size collapsed at t = " + std::to_string(t));
      const bool ok_full = sdirk2_step(s, y, h_try, y_full, newton_tol);
      const bool ok_half = ok_full && sdirk2_step(s, y, 0.5 * h_try, y_half, newton_tol) &&
                           sdirk2_step(s, y_half, 0.5 * h_try, y_new, newton_tol);
      if (!ok_full || !ok_half) {
        h_try *= 0.25;
        continue;
      }
      err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double scale = ctrl.atol + ctrl.rtol * std::max(std::fabs(y[i]), std::fabs(y_new[i]));
        err = std::max(err, std::fabs(y_full[i] - y_new[i]) / (3.0 * scale));
      }
      if (err <= 1.0) {
        accepted = true;
      } else {
        h_try *= std::clamp(0.9 * std::pow(err, -1.0 / 3.0), 0.1, 0.5);
      }
    }
    y = y_new;
    project_conserved_charge(s, y, 0.0);
    t += h_try;
    const double grow = err > 0.0 ? std::clamp(0.9 * std::pow(err, -1.0 / 3.0), 0.2, 2.5) : 2.5;
    h = std::max(h_try * grow, h_floor * 10.0);
    while (si < sample_times.size() && sample_times[si] <= t + h_floor) {
      record(sample_times[si]);
      ++si;
    }
  }
  return traj;
}

ZetaVector equilibrium(const CircuitSystem& s) {
  const std::size_t N = s.size();
  const double dV = s.drive.V_plus - s.drive.V_minus;
  ZetaVector z(N, 0.0);
  if (dV == 0.0) return z;  // T zeta = 0 with zero conserved charge

  const auto& e = s.electrolyte;
  auto F = [&](double a) {
    return edl::signed_diffuse_charge(a, e) + edl::signed_diffuse_charge(a + dV, e);
  };
  // F is strictly decreasing (F' = -C(a) - C(a + dV) < 0); bracket then Newton.
  double lo = -std::fabs(dV) - 1.0, hi = std::fabs(dV) + 1.0;
  for (int k = 0; k < 60 && F(lo) < 0.0; ++k) lo = 2.0 * lo - 1.0;
  for (int k = 0; k < 60 && F(hi) > 0.0; ++k) hi = 2.0 * hi + 1.0;

  double a = -0.5 * dV;  // exact for symmetric electrolytes (F odd around it)
  const double ftol = 1e-13 * std::max(1.0, std::sqrt(alpha(e)) * (1.0 + std::fabs(dV)));
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const double fa = F(a);
    if (fa > 0.0) lo = std::max(lo, a);
    if (fa < 0.0) hi = std::min(hi, a);
    if (std::fabs(fa) <= ftol) {
      converged = true;
      break;
    }
    const double dfa = -edl::differential_capacitance(a, e) -
                       edl::differential_capacitance(a + dV, e);
    double a_next = a - fa / dfa;
    if (!(a_next > lo) || !(a_next < hi)) a_next = 0.5 * (lo + hi);  // bisection safeguard
    if (a_next == a) {
      converged = true;  // at floating-point resolution
      break;
    }
    a = a_next;
  }
  if (!converged) throw NumericError("equilibrium: Newton failed to converge");

  const std::size_t n = N / 2;
  for (std::size_t i = 0; i < n; ++i) z[i] = a;
  for (std::size_t i = n; i < N; ++i) z[i] = a + dV;
  return z;
}

}  // namespace stackcap::circuit
