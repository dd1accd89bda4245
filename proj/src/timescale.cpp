#include "stackcap/timescale.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "stackcap/edl.hpp"

namespace stackcap::timescale {

SpectrumReport spectrum(const circuit::CircuitSystem& s, const circuit::ZetaVector& zeta_inf) {
  const std::size_t N = s.size();
  if (zeta_inf.size() != N) throw ParameterError("spectrum: equilibrium size mismatch");

  // Precondition: zeta_inf solves T zeta = Y (the linearization point).
  circuit::ZetaVector Tz;
  circuit::apply_T(s, zeta_inf, Tz);
  double resid = 0.0, yscale = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    resid = std::max(resid, std::fabs(Tz[i] - s.Y[i]));
    yscale = std::max(yscale, std::fabs(s.Y[i]));
  }
  if (resid > 1e-8 * std::max(1.0, yscale))
    throw ParameterError("spectrum: state is not a converged equilibrium (residual " +
                         std::to_string(resid) + ")");

  // alpha W^{-1} T with W = diag(m_k C_k) is similar to the symmetric
  // tridiagonal W^{-1/2} (alpha T) W^{-1/2}; the transform preserves the
  // spectrum exactly and guarantees real eigenvalues.
  const double a = alpha(s.electrolyte);
  Eigen::VectorXd w(static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i)
    w[static_cast<Eigen::Index>(i)] =
        s.m[i] * edl::differential_capacitance(zeta_inf[i], s.electrolyte);
  Eigen::VectorXd diag(static_cast<Eigen::Index>(N)), sub(static_cast<Eigen::Index>(N) - 1);
  for (std::size_t i = 0; i < N; ++i)
    diag[static_cast<Eigen::Index>(i)] = a * s.T_diag[i] / w[static_cast<Eigen::Index>(i)];
  for (std::size_t i = 0; i + 1 < N; ++i)
    sub[static_cast<Eigen::Index>(i)] =
        a * s.T_off[i] /
        std::sqrt(w[static_cast<Eigen::Index>(i)] * w[static_cast<Eigen::Index>(i) + 1]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericError("spectrum: tridiagonal eigensolver failed");

  SpectrumReport rep;
  rep.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + N);
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());
  const double max_ev = rep.eigenvalues.back();
  rep.zero_threshold = 1e-10 * std::fabs(max_ev);
  rep.lambda_c = 0.0;
  for (double ev : rep.eigenvalues) {
    if (ev > rep.zero_threshold) {
      rep.lambda_c = ev;
      break;
    }
  }
  if (rep.lambda_c <= 0.0) throw NumericError("spectrum: no positive eigenvalue found");
  rep.tau_n = 1.0 / rep.lambda_c;
  return rep;
}

double charging_timescale(const StackGeometry& g, const DriveSpec& d, const ElectrolyteSpec& e) {
  const auto sys = circuit::assemble(g, d, e);
  const auto zinf = circuit::equilibrium(sys);
  return spectrum(sys, zinf).tau_n;
}

namespace {

void fit_line(const std::vector<double>& xs, const std::vector<double>& ys, double& slope,
              double& intercept, double& r_squared) {
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  slope = sxy / sxx;
  intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss_res += r * r;
  }
  r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
}

}  // namespace

SweepTable sweep_tau_vs_n(const ElectrolyteSpec& e, const DriveSpec& d,
                          const std::vector<double>& H_list, int n_min, int n_max, int threads) {
  if (n_min < 2 || n_max > 200 || n_min > n_max)
    throw ParameterError("sweep_tau_vs_n: n range must satisfy 2 <= n_min <= n_max <= 200");
  if (H_list.empty()) throw ParameterError("sweep_tau_vs_n: empty H list");

  SweepTable table;
  const int per_h = n_max - n_min + 1;
  table.rows.resize(H_list.size() * static_cast<std::size_t>(per_h));

  auto compute = [&](std::size_t flat) {
    const std::size_t hi = flat / static_cast<std::size_t>(per_h);
    const int n = n_min + static_cast<int>(flat % static_cast<std::size_t>(per_h));
    const double H = H_list[hi];
    StackGeometry g(n, 1.0 - H);
    SweepRow row;
    row.n = n;
    row.H = H;
    row.ratio = H / g.L;
    row.tau_n = charging_timescale(g, d, e);
    table.rows[flat] = row;
  };

  const std::size_t total = table.rows.size();
  const int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    for (std::size_t i = 0; i < total; ++i) compute(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int k = 0; k < nthreads; ++k)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) compute(i);
      });
    for (auto& th : pool) th.join();
  }

  for (std::size_t hi = 0; hi < H_list.size(); ++hi) {
    std::vector<double> ns, taus;
    for (int n = std::max(n_min, 5); n <= n_max; ++n) {
      const std::size_t flat = hi * static_cast<std::size_t>(per_h) +
                               static_cast<std::size_t>(n - n_min);
      ns.push_back(static_cast<double>(n));
      taus.push_back(table.rows[flat].tau_n);
    }
    SweepFit fit;
    fit.H = H_list[hi];
    if (ns.size() >= 2) fit_line(ns, taus, fit.A, fit.B, fit.r_squared);
    table.fits.push_back(fit);
  }
  return table;
}

double relaxation_rate_fit(const circuit::ZetaTrajectory& traj,
                           const circuit::ZetaVector& zeta_inf, double t_lo, double t_hi) {
  if (!(t_hi > t_lo)) throw ParameterError("relaxation_rate_fit: empty window");
  double g0 = 0.0;
  for (double z : zeta_inf) g0 += z * z;
  g0 = std::sqrt(g0);
  if (g0 == 0.0) throw FitError("relaxation_rate_fit: no signal (zero equilibrium gap)");

  std::vector<double> ts, logs;
  bool window_checked = false;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    if (t < t_lo || t > t_hi) continue;
    double gap = 0.0;
    for (std::size_t i = 0; i < zeta_inf.size(); ++i) {
      const double d = traj.states[k][i] - zeta_inf[i];
      gap += d * d;
    }
    gap = std::sqrt(gap);
    if (!window_checked) {
      if (gap > 0.1 * g0)
        throw FitError("relaxation_rate_fit: window starts before the late-time regime");
      window_checked = true;
    }
    if (gap < 1e-13 * g0)
      throw FitError("relaxation_rate_fit: gap at numerical noise floor inside window");
    ts.push_back(t);
    logs.push_back(std::log(gap));
  }
  if (ts.size() < 3) throw FitError("relaxation_rate_fit: window too short (need >= 3 samples)");
  double slope, intercept, r2;
  fit_line(ts, logs, slope, intercept, r2);
  return -slope;
}

}  // namespace stackcap::timescale
