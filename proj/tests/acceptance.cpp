// Acceptance suite: one numbered end-to-end check per behavioral guarantee.
// Usage: acceptance [N]  (no argument = run all checks). Each check prints a
// single [PASS]/[FAIL] line; the exit status is nonzero if any check failed.
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "stackcap/analysis.hpp"
#include "stackcap/circuit.hpp"
#include "stackcap/config.hpp"
#include "stackcap/core.hpp"
#include "stackcap/edl.hpp"
#include "stackcap/errors.hpp"
#include "stackcap/io.hpp"
#include "stackcap/mae.hpp"
#include "stackcap/pnp.hpp"
#include "stackcap/runner.hpp"
#include "stackcap/timescale.hpp"

using namespace stackcap;

namespace {

struct Result {
  bool pass = false;
  std::string note;
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  v.back() = b;
  return v;
}

const ElectrolyteSpec kSym(1, -1);
const ElectrolyteSpec kAsym(2, -1);

// ---------------------------------------------------------------------------
// 1. Closed-form capacitance for symmetric z:z salts.
Result c1() {
  double worst = 0.0;
  for (int z : {1, 2, 3}) {
    const ElectrolyteSpec e(z, -z);
    const double zf = static_cast<double>(z);
    for (double u : linspace(-5.0, 5.0, 201)) {
      const double got = edl::differential_capacitance(u, e);
      const double ref = std::sqrt(2.0) * std::pow(zf, 1.5) * std::cosh(zf * u / 2.0);
      worst = std::max(worst, std::abs(got - ref) / std::max(1.0, ref));
    }
  }
  return {worst <= 1e-12, fmt("max deviation %.3e (tol 1e-12)", worst)};
}

// 2. Capacitance is the negative derivative of the signed diffuse charge.
Result c2() {
  double worst = 0.0;
  const double h = 1e-5;
  for (const ElectrolyteSpec& e : {kSym, kAsym}) {
    for (double mag : {0.3, 1.0, 2.0}) {
      for (double u : {mag, -mag}) {
        const double dq = (edl::signed_diffuse_charge(u + h, e) -
                           edl::signed_diffuse_charge(u - h, e)) /
                          (2.0 * h);
        const double c = edl::differential_capacitance(u, e);
        worst = std::max(worst, std::abs(-dq - c) / c);
      }
    }
  }
  return {worst <= 1e-6, fmt("max relative mismatch %.3e (tol 1e-6)", worst)};
}

// 3. Equilibrium layer profile vs the analytic 1:1 solution.
Result c3() {
  double worst = 0.0;
  for (double zeta : {0.5, 2.0, 4.0}) {
    const auto prof = edl::pb_profile({zeta, edl::LayerSide::LeftFacing}, kSym);
    const double k = std::tanh(zeta / 4.0);
    for (std::size_t i = 0; i < prof.y.size(); ++i) {
      const double ref = 4.0 * std::atanh(k * std::exp(-std::sqrt(2.0) * prof.y[i]));
      worst = std::max(worst, std::abs(prof.phi[i] - ref));
      worst = std::max(worst, std::abs(prof.c_plus[i] - std::exp(-ref)));
      worst = std::max(worst, std::abs(prof.c_minus[i] - std::exp(ref)));
    }
  }
  return {worst <= 1e-8, fmt("max abs err %.3e (tol 1e-8)", worst)};
}

// 4. Spectrum structure on random systems + dense eigensolver oracle.
Result c4() {
  std::mt19937 rng(20260826u);
  std::uniform_real_distribution<double> uL(0.25, 0.75), uV(0.05, 0.4);
  const std::vector<ElectrolyteSpec> salts = {{1, -1}, {2, -1}, {3, -1}, {2, -2}};
  std::string note;
  for (int n : {1, 2, 5, 10, 25, 50}) {
    const ElectrolyteSpec& e = salts[rng() % salts.size()];
    const double L = (n == 1) ? 1.0 : uL(rng);
    const DriveSpec d{uV(rng), -uV(rng)};
    const auto sys = circuit::assemble(StackGeometry(n, L), d, e);
    const auto zinf = circuit::equilibrium(sys);
    const auto rep = timescale::spectrum(sys, zinf);

    const double maxev = rep.eigenvalues.back();
    int zeros = 0;
    for (double ev : rep.eigenvalues)
      if (ev <= rep.zero_threshold) ++zeros;
    if (zeros != 1) return {false, fmt("n=%d: %d eigenvalues below threshold", n, zeros)};
    for (std::size_t i = 2; i < rep.eigenvalues.size(); ++i)
      if (rep.eigenvalues[i] - rep.eigenvalues[i - 1] <= 1e-10 * maxev)
        return {false, fmt("n=%d: positive eigenvalues not distinct near index %zu", n, i)};

    const auto N = static_cast<Eigen::Index>(sys.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
    const double a = alpha(e);
    for (Eigen::Index i = 0; i < N; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double w = sys.m[ui] * edl::differential_capacitance(zinf[ui], e);
      M(i, i) = a * sys.T_diag[ui] / w;
      if (i + 1 < N) M(i, i + 1) = a * sys.T_off[ui] / w;
      if (i > 0) M(i, i - 1) = a * sys.T_off[ui - 1] / w;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> dense(M);
    if (dense.info() != Eigen::Success) return {false, fmt("n=%d: dense solver failed", n)};
    std::vector<double> ref(sys.size());
    for (Eigen::Index i = 0; i < N; ++i) ref[static_cast<std::size_t>(i)] = dense.eigenvalues()[i].real();
    std::sort(ref.begin(), ref.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i)
      worst = std::max(worst, std::abs(rep.eigenvalues[i] - ref[i]) / maxev);
    if (worst > 1e-9) return {false, fmt("n=%d: oracle mismatch %.3e", n, worst)};
    note = fmt("last: n=%d oracle mismatch %.3e", n, worst);
  }
  return {true, note};
}

// 5. Two-plate charging timescale vs the analytic RC value.
Result c5() {
  const double tau = timescale::charging_timescale(StackGeometry(1, 1.0), {0.05, -0.05}, kSym);
  const double ref = edl::differential_capacitance(0.05, kSym) / 2.0;
  const double rel = std::abs(tau / ref - 1.0);
  return {rel <= 0.02, fmt("tau_1 = %.6f vs C(V+)/2 = %.6f (rel %.3e, tol 2%%)", tau, ref, rel)};
}

// 6. Charging timescale grows linearly with stack count; thinner gaps mean
//    shallower growth.
Result c6() {
  const auto table =
      timescale::sweep_tau_vs_n(kSym, {0.2, -0.2}, {0.25, 0.5, 0.75}, 5, 30, 4);
  std::string note;
  for (const auto& fit : table.fits) {
    note += fmt("H=%.2f: A=%.4f R2=%.6f  ", fit.H, fit.A, fit.r_squared);
    if (fit.r_squared < 0.999) return {false, note + "(R^2 below 0.999)"};
  }
  const bool ordered =
      table.fits[0].A > table.fits[1].A && table.fits[1].A > table.fits[2].A;
  return {ordered, note + (ordered ? "" : "(slopes not decreasing in H)")};
}

// 7. The 2:-1 salt charges strictly faster than 1:-1 at every n.
Result c7() {
  const auto sym = timescale::sweep_tau_vs_n(kSym, {0.2, -0.2}, {0.5}, 5, 30, 4);
  const auto asym = timescale::sweep_tau_vs_n(kAsym, {0.2, -0.2}, {0.5}, 5, 30, 4);
  double min_gap = 1e300;
  for (std::size_t i = 0; i < sym.rows.size(); ++i) {
    if (!(asym.rows[i].tau_n < sym.rows[i].tau_n))
      return {false, fmt("n=%d: tau 2:-1 %.4f !< tau 1:-1 %.4f", sym.rows[i].n,
                         asym.rows[i].tau_n, sym.rows[i].tau_n)};
    min_gap = std::min(min_gap, sym.rows[i].tau_n - asym.rows[i].tau_n);
  }
  return {true, fmt("smallest margin %.4f tau_c over n = 5..30", min_gap)};
}

// 8. Total diffuse charge stays conserved along every trajectory.
Result c8() {
  double worst = 0.0;
  for (const ElectrolyteSpec& e : {kSym, kAsym}) {
    for (int n : {1, 2, 5}) {
      const double L = (n == 1) ? 1.0 : 0.5;
      for (double V : {0.2, 0.5}) {
        const auto sys = circuit::assemble(StackGeometry(n, L), {V, -V}, e);
        const auto traj = circuit::integrate(sys, 30.0);
        for (const auto& state : traj.states)
          worst = std::max(worst, std::abs(circuit::conserved_charge(state, sys)));
      }
    }
  }
  return {worst <= 1e-8, fmt("max |sum m_k Q(zeta_k)| = %.3e (tol 1e-8)", worst)};
}

// 9. Newton equilibrium vs long-time integration, plus the symmetric identity.
Result c9() {
  circuit::IntegrateControl ctrl;
  ctrl.rtol = 1e-10;
  ctrl.atol = 1e-12;
  double worst = 0.0, worst_sym = 0.0;
  for (const ElectrolyteSpec& e : {kSym, kAsym}) {
    for (int n : {1, 2, 5}) {
      const double L = (n == 1) ? 1.0 : 0.5;
      const auto sys = circuit::assemble(StackGeometry(n, L), {0.2, -0.2}, e);
      const auto zinf = circuit::equilibrium(sys);
      const auto traj = circuit::integrate(sys, 200.0, ctrl, {200.0});
      for (std::size_t i = 0; i < zinf.size(); ++i) {
        worst = std::max(worst, std::abs(traj.states[0][i] - zinf[i]));
        if (e.z_plus == 1 && i < zinf.size() / 2)
          worst_sym = std::max(worst_sym, std::abs(zinf[i] + 0.2));
      }
    }
  }
  const bool ok = worst <= 1e-8 && worst_sym <= 1e-8;
  return {ok, fmt("integration gap %.3e, symmetric identity gap %.3e (tol 1e-8)", worst,
                  worst_sym)};
}

// 10. Mass conservation and joint space-time convergence order of the field
//     solver (nested uniform grids, dt halved with dx).
Result c10() {
  const StackGeometry g(1, 1.0);
  const DriveSpec d{0.2, -0.2};
  const double eps = 0.05;
  double drift = 0.0;
  auto solve = [&](std::size_t cells, double dt) {
    pnp::GridSpec gs;
    gs.kind = pnp::GridSpec::Kind::Uniform;
    gs.uniform_cells = cells;
    pnp::RunOptions opt;
    opt.dt = dt;
    opt.t_final = 1.0;
    opt.output_times = {1.0};
    const auto res = pnp::run(g, d, kSym, eps, opt, gs);
    for (std::size_t k = 0; k < res.diagnostics.times.size(); ++k) {
      drift = std::max(drift, std::abs(res.diagnostics.mass_plus[k] -
                                       res.diagnostics.mass_plus[0]));
      drift = std::max(drift, std::abs(res.diagnostics.mass_minus[k] -
                                       res.diagnostics.mass_minus[0]));
    }
    return res;
  };
  const auto r1 = solve(200, 0.05);
  const auto r2 = solve(400, 0.025);
  const auto r3 = solve(800, 0.0125);

  auto gap = [](const pnp::PnpResult& coarse, const pnp::PnpResult& fine) {
    double e = 0.0;
    const auto& a = coarse.snapshots[0];
    const auto& b = fine.snapshots[0];
    for (std::size_t j = 0; j < coarse.grid.size(); ++j) {
      e = std::max(e, std::abs(a.phi[j] - b.phi[2 * j]));
      e = std::max(e, std::abs(a.c_plus[j] - b.c_plus[2 * j]));
      e = std::max(e, std::abs(a.c_minus[j] - b.c_minus[2 * j]));
    }
    return e;
  };
  const double e12 = gap(r1, r2);
  const double e23 = gap(r2, r3);
  const double order = std::log2(e12 / e23);
  const bool ok = drift <= 1e-10 && order >= 1.9;
  return {ok, fmt("mass drift %.3e (tol 1e-10); errors %.3e -> %.3e, order %.2f (need >= 1.9)",
                  drift, e12, e23, order)};
}

// Shared by 11: plateau of the composite-vs-field potential error. The error
// curve is flat over t in [0.25, 1]: late enough that the layer-formation
// transient (timescale ~ eps) and the fastest circuit mode (~0.04) have died
// out, early enough that the asymptotic truncation error still dominates the
// field solver's own discretization floor. The mesh and step are refined
// beyond the defaults so that floor stays well below the signal.
double phi_plateau(double eps) {
  const StackGeometry g(5, 0.5);
  const DriveSpec d{0.2, -0.2};
  const std::vector<double> times{0.25, 0.5, 0.75, 1.0};
  pnp::RunOptions opt;
  opt.dt = 0.01;
  opt.t_final = 1.0;
  opt.output_times = times;
  pnp::GridSpec gs;
  gs.layer_dx = 0.02;
  gs.growth = 1.08;
  gs.bulk_dx = 0.005;
  const auto res = pnp::run(g, d, kSym, eps, opt, gs);

  const auto sys = circuit::assemble(g, d, kSym);
  circuit::IntegrateControl ctrl;
  ctrl.rtol = 1e-10;
  ctrl.atol = 1e-12;
  const auto traj = circuit::integrate(sys, 1.0, ctrl, times);

  double plateau = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto comp = mae::composite_field(traj.states[i], sys, res.grid);
    const auto rep = mae::compare(comp, res.grid, res.snapshots[i], res.grid);
    plateau = std::max(plateau, rep.rel_err_phi);
  }
  return plateau;
}

// 11. The composite reconstruction tracks the field solution, and the error
//     shrinks roughly linearly with the layer width.
Result c11() {
  const double p2 = phi_plateau(0.02);
  const double p1 = phi_plateau(0.01);
  const double factor = p2 / p1;
  const bool ok = p2 <= 0.05 && factor >= 1.5 && factor <= 3.0;
  return {ok, fmt("plateau rel err: %.4f at eps=0.02, %.4f at eps=0.01 (factor %.2f, need "
                  "<= 0.05 and factor in [1.5, 3])",
                  p2, p1, factor)};
}

// 12. Outermost stacks hold half the interior charge and charge up last.
Result c12() {
  const StackGeometry g(5, 0.5);
  pnp::RunOptions opt;
  opt.dt = 0.02;
  opt.t_final = 30.0;
  const auto res = pnp::run(g, {0.2, -0.2}, kSym, 0.02, opt);
  const auto& diag = res.diagnostics;
  const auto& qend = diag.stack_charge.back();

  // Right-half stacks are indices 5..9, center-adjacent first, wall last.
  double interior = 0.0;
  for (std::size_t i = 5; i < 9; ++i) interior += std::abs(qend[i]);
  interior /= 4.0;
  const double ratio = std::abs(qend[9]) / interior;

  auto half_time = [&](std::size_t i) {
    const double target = 0.5 * std::abs(qend[i]);
    for (std::size_t k = 1; k < diag.times.size(); ++k) {
      const double a = std::abs(diag.stack_charge[k - 1][i]);
      const double b = std::abs(diag.stack_charge[k][i]);
      if (b >= target) {
        const double s = (target - a) / (b - a);
        return diag.times[k - 1] + s * (diag.times[k] - diag.times[k - 1]);
      }
    }
    return diag.times.back();
  };
  std::string note = fmt("wall/interior charge ratio %.4f; half-times", ratio);
  bool ordered = true;
  double prev = -1.0;
  for (std::size_t i = 5; i < 10; ++i) {
    const double t = half_time(i);
    note += fmt(" %.2f", t);
    if (t <= prev) ordered = false;
    prev = t;
  }
  const bool ok = std::abs(ratio - 0.5) <= 0.05 * 0.5 && ordered;
  return {ok, note + (ordered ? "" : " (not increasing)")};
}

// 13. Strong drives relax in two phases (fast RC + slow diffusion), weak
//     drives in one; strong drives deplete the center salt.
Result c13() {
  const StackGeometry g(1, 1.0);
  const double eps = 0.01;
  // The floor trims the record where it drops beneath the resolution of the
  // phase structure being classified. The strong drive keeps five decades so
  // its small-amplitude diffusive tail (carried by the ~1% salt deficit) is
  // fully visible to the fit; the weak drive keeps three, beneath which only
  // a sub-resolution remnant (~1e-5 amplitude) remains.
  auto relax = [&](double V, double dt, double t_final, double floor) {
    pnp::RunOptions opt;
    opt.dt = dt;
    opt.t_final = t_final;
    const auto res = pnp::run(g, {V, -V}, kSym, eps, opt);
    const auto r = pnp::charge_relaxation(res.diagnostics, 1);
    std::vector<double> ts, rs;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!(r[i] > floor) || r[i] > 1.0 + 1e-12) break;
      ts.push_back(res.diagnostics.times[i]);
      rs.push_back(r[i]);
    }
    return std::make_pair(analysis::biexponential_fit(ts, rs),
                          analysis::salt_depletion(res.diagnostics.center_salt));
  };

  const auto [strong, dep_strong] = relax(2.0, 0.02, 300.0, 1e-5);
  const auto [weak, dep_weak] = relax(0.1, 0.01, 8.0, 1e-3);

  const double ratio = strong.tau_slow / strong.tau_fast;
  const bool a = strong.two_phase() && ratio >= 5.0;
  const bool b = strong.tau_slow >= (1.0 / eps) / 3.0 && strong.tau_slow <= (1.0 / eps) * 3.0;
  const bool c = weak.single_phase || weak.tau_slow / weak.tau_fast < 2.0;
  const bool d = dep_strong.depletion_fraction > 0.10;
  const bool e = dep_weak.depletion_fraction < 0.01;

  std::string note;
  note += fmt("phase ratio %.1f (>=5: %s); ", ratio, a ? "ok" : "FAIL");
  note += fmt("tau_slow %.1f vs 1/eps %.0f (within 3x: %s); ", strong.tau_slow, 1.0 / eps,
              b ? "ok" : "FAIL");
  note += fmt("weak drive %s (%s); ", weak.single_phase ? "single-phase" : "two-phase",
              c ? "ok" : "FAIL");
  note += fmt("strong depletion %.4f (>0.10: %s); ", dep_strong.depletion_fraction,
              d ? "ok" : "FAIL");
  note += fmt("weak depletion %.2e (<0.01: %s)", dep_weak.depletion_fraction,
              e ? "ok" : "FAIL");
  return {a && b && c && d && e, note};
}

// 14. First-phase decay rate of the wall charge vs the circuit eigenvalue.
Result c14() {
  std::string note;
  for (int n : {1, 3, 5}) {
    const double L = (n == 1) ? 1.0 : 0.5;
    const StackGeometry g(n, L);
    const DriveSpec d{0.2, -0.2};
    const double lambda = 1.0 / timescale::charging_timescale(g, d, kSym);

    pnp::RunOptions opt;
    opt.dt = 0.01;
    opt.t_final = (n == 1) ? 8.0 : (n == 3 ? 15.0 : 22.0);
    const auto res = pnp::run(g, d, kSym, 0.02, opt);
    const auto r = pnp::charge_relaxation(res.diagnostics, res.diagnostics.stack_charge.front().size() - 1);

    // Log-linear fit over the first-phase window 0.5 >= r >= 0.02.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] > 0.5 || r[i] < 0.02) continue;
      const double t = res.diagnostics.times[i], y = std::log(r[i]);
      sx += t;
      sy += y;
      sxx += t * t;
      sxy += t * y;
      ++m;
    }
    if (m < 10) return {false, fmt("n=%d: only %zu samples in the fit window", n, m)};
    const double mm = static_cast<double>(m);
    const double rate = -(mm * sxy - sx * sy) / (mm * sxx - sx * sx);
    const double rel = std::abs(rate / lambda - 1.0);
    note += fmt("n=%d: rate %.4f vs lambda_c %.4f (rel %.3f)  ", n, rate, lambda, rel);
    if (rel > 0.15) return {false, note + "(outside 15%)"};
  }
  return {true, note};
}

// 15. Reruns produce byte-identical CSV artifacts.
Result c15() {
  auto read_all = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return in.good() ? ss.str() : std::string("<unreadable " + path + ">");
  };

  std::vector<cli::ExperimentConfig> cfgs;
  {
    cli::ExperimentConfig c;
    c.model = cli::Model::Circuit;
    c.n = 3;
    c.L = 0.5;
    c.H = 0.5;
    c.V_plus = 0.2;
    c.V_minus = -0.2;
    c.t_final = 5.0;
    c.samples = 51;
    c.prefix = "det_circ";
    cfgs.push_back(c);
  }
  {
    cli::ExperimentConfig c;
    c.model = cli::Model::Pnp;
    c.n = 1;
    c.L = 1.0;
    c.H = 0.0;
    c.V_plus = 0.3;
    c.V_minus = -0.3;
    c.epsilon = 0.05;
    c.dt = 0.05;
    c.t_final = 2.0;
    c.output_times = {1.0, 2.0};
    c.prefix = "det_pnp";
    cfgs.push_back(c);
  }
  {
    cli::ExperimentConfig c;
    c.model = cli::Model::TimescaleSweep;
    c.V_plus = 0.2;
    c.V_minus = -0.2;
    c.n = 2;
    c.L = 0.5;
    c.H = 0.5;
    c.n_min = 5;
    c.n_max = 15;
    c.H_values = {0.25, 0.5};
    c.threads = 4;  // fan-out must not affect the bytes
    c.prefix = "det_sweep";
    cfgs.push_back(c);
  }

  for (const auto& cfg : cfgs) {
    const auto m1 = cli::run_experiment(cfg, "acceptance_scratch/run1");
    const auto m2 = cli::run_experiment(cfg, "acceptance_scratch/run2");
    if (m1.status != "ok" || m2.status != "ok")
      return {false, fmt("%s: run failed (%s)", cfg.prefix.c_str(), m1.error.c_str())};
    for (const auto& name : m1.outputs) {
      const auto a = read_all("acceptance_scratch/run1/" + name);
      const auto b = read_all("acceptance_scratch/run2/" + name);
      if (a != b) return {false, fmt("%s differs between reruns", name.c_str())};
    }
  }
  return {true, "circuit, field, and sweep artifacts byte-identical across reruns"};
}

struct Criterion {
  int number;
  const char* description;
  Result (*fn)();
};

const Criterion kCriteria[] = {
    {1, "closed-form capacitance for symmetric salts", c1},
    {2, "capacitance equals the negative charge derivative", c2},
    {3, "equilibrium layer profile matches the analytic solution", c3},
    {4, "spectrum structure and dense eigensolver cross-check", c4},
    {5, "two-plate charging timescale", c5},
    {6, "charging timescale grows linearly with stack count", c6},
    {7, "divalent counterions always charge faster", c7},
    {8, "total diffuse charge conserved along trajectories", c8},
    {9, "Newton equilibrium agrees with long-time integration", c9},
    {10, "field solver conserves mass and converges at second order", c10},
    {11, "composite reconstruction tracks the field solution", c11},
    {12, "outermost stacks hold half charge and charge up last", c12},
    {13, "strong drives relax in two phases, weak drives in one", c13},
    {14, "field-model charging rate matches the circuit eigenvalue", c14},
    {15, "reruns are byte-identical", c15},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc == 2) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > 15) {
      std::fprintf(stderr, "usage: %s [1..15]\n", argv[0]);
      return 2;
    }
  } else if (argc > 2) {
    std::fprintf(stderr, "usage: %s [1..15]\n", argv[0]);
    return 2;
  }

  bool all_pass = true;
  for (const auto& c : kCriteria) {
    if (only != 0 && c.number != only) continue;
    Result r;
    try {
      r = c.fn();
    } catch (const std::exception& ex) {
      r = {false, std::string("exception: ") + ex.what()};
    }
    std::printf("[%s] %2d %s%s%s\n", r.pass ? "PASS" : "FAIL", c.number, c.description,
                r.note.empty() ? "" : " -- ", r.note.c_str());
    std::fflush(stdout);
    if (!r.pass) all_pass = false;
  }
  return all_pass ? 0 : 1;
}
