#include "stackcap/pnp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stackcap/errors.hpp"
#include "stackcap/tridiag.hpp"

namespace stackcap::pnp {

namespace {

// Bernoulli function B(x) = x / (e^x - 1), the exponential-fitting weight.
double bernoulli(double x) {
  if (std::abs(x) < 1e-10) return 1.0 - 0.5 * x + x * x / 12.0;
  if (x > 40.0) return x * std::exp(-x) / (-std::expm1(-x));
  return x / std::expm1(x);
}

// Spacings filling [0, len] from the refined end: first spacing d0 growing
// geometrically by `growth`, capped at dcap, then rescaled so they sum to
// len exactly. Returned in refined-first order.
std::vector<double> graded_spacings(double len, double d0, double growth, double dcap) {
  std::vector<double> ds;
  double cum = 0.0;
  double d = std::min(d0, len);
  while (cum < len) {
    d = std::min(d, dcap);
    ds.push_back(d);
    cum += d;
    d *= growth;
  }
  const double scale = len / cum;
  for (double& v : ds) v *= scale;
  return ds;
}

// Spacings for one inter-stack interval (or the half interval [0, x_1]),
// refined toward whichever ends host a stack.
std::vector<double> interval_spacings(double len, bool refine_left, bool refine_right,
                                      double d0, double growth, double dcap) {
  if (!refine_left && !refine_right) {
    const auto cells = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / dcap)));
    return std::vector<double>(cells, len / static_cast<double>(cells));
  }
  if (refine_left && refine_right) {
    auto left = graded_spacings(0.5 * len, d0, growth, dcap);
    auto right = left;  // symmetric interval
    std::reverse(right.begin(), right.end());
    left.insert(left.end(), right.begin(), right.end());
    return left;
  }
  auto ds = graded_spacings(len, d0, growth, dcap);
  if (refine_right) std::reverse(ds.begin(), ds.end());
  return ds;
}

void append_nodes(std::vector<double>& x, double from, const std::vector<double>& ds) {
  double pos = from;
  for (double d : ds) {
    pos += d;
    x.push_back(pos);
  }
}

struct SpeciesSystem {
  std::vector<double> lower, diag, upper, rhs;
};

// Assembles the backward-Euler-type stage system for one species:
//   w_j c_j + dtau * eps * (J_{j+1/2} - J_{j-1/2}) = w_j base_j
// with Scharfetter-Gummel face fluxes evaluated against `phi` and zero flux
// through the outer walls. Interior stacks are ordinary nodes, so ions pass
// through them freely. The row sum telescopes: total mass is conserved to
// rounding regardless of the mesh.
void assemble_species(SpeciesSystem& s, const std::vector<double>& base,
                      const std::vector<double>& phi, const Grid1D& g, double z,
                      double dtau_eps) {
  const std::size_t n = g.size();
  s.lower.assign(n - 1, 0.0);
  s.upper.assign(n - 1, 0.0);
  s.diag.assign(n, 0.0);
  s.rhs.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    s.diag[j] = g.w[j];
    s.rhs[j] = g.w[j] * base[j];
  }
  for (std::size_t f = 0; f + 1 < n; ++f) {
    const double dpsi = z * (phi[f + 1] - phi[f]);
    const double bp = bernoulli(dpsi);   // weight on the left node
    const double bm = bernoulli(-dpsi);  // weight on the right node
    const double fac = dtau_eps / g.dx[f];
    // Flux J_{f+1/2} = fac/dtau_eps * (bp c_f - bm c_{f+1}); it leaves cell f
    // and enters cell f+1.
    s.diag[f] += fac * bp;
    s.upper[f] -= fac * bm;
    s.diag[f + 1] += fac * bm;
    s.lower[f] -= fac * bp;
  }
}

// dB/dx of the Bernoulli function, via B'(x) = e^{-x} (1 - e^{-x} - x) /
// (1 - e^{-x})^2 for x > 0 and the reflection B'(-x) = -1 - B'(x).
double bernoulli_prime(double x) {
  if (std::abs(x) < 1e-5) return -0.5 + x / 6.0;
  if (x < 0.0) return -1.0 - bernoulli_prime(-x);
  const double om = -std::expm1(-x);  // 1 - e^{-x}
  return std::exp(-x) * (om - x) / (om * om);
}

// Newton data for one coupled implicit stage. Unknowns are ordered
// (c+, c-, phi) per node; the Jacobian is block tridiagonal with 3x3 blocks
// because both the fluxes and the Poisson stencil are nearest-neighbor.
struct StageBlocks {
  std::vector<Eigen::Matrix3d> lower, diag, upper;
  std::vector<Eigen::Vector3d> rhs;
};

// Residual of the coupled stage equations
//   F_c:   w_j c_j + dtau_eps (J_{j+1/2} - J_{j-1/2}) - w_j base_j = 0
//   F_phi: eps^2 sum_faces (phi_j - phi_nbr)/dx - w_j rho_j = 0   (interior)
//          phi_j - V(side) = 0                                    (stacks)
// into R, plus the exact Jacobian blocks when `jac` is non-null. Returns
// max_j |R_j|.
double stage_residual(const std::vector<double>& cp, const std::vector<double>& cm,
                      const std::vector<double>& phi, const std::vector<double>& base_p,
                      const std::vector<double>& base_m, const Grid1D& g, const DriveSpec& d,
                      const ElectrolyteSpec& e, double dtau_eps,
                      std::vector<Eigen::Vector3d>& R, StageBlocks* jac) {
  const std::size_t n = g.size();
  const std::size_t nf = n - 1;
  const double eps2 = g.epsilon * g.epsilon;
  const double zs[2] = {static_cast<double>(e.z_plus), static_cast<double>(e.z_minus)};
  const std::vector<double>* cs[2] = {&cp, &cm};
  const std::vector<double>* bases[2] = {&base_p, &base_m};

  // Per-face flux J, node weights bp/bm, and potential sensitivity gph for
  // each species: J = (bp c_L - bm c_R)/dx, dJ/dphi_R = z gph = -dJ/dphi_L.
  static thread_local std::vector<double> flux[2], bp[2], bm[2], gph[2];
  for (int s = 0; s < 2; ++s) {
    flux[s].resize(nf);
    bp[s].resize(nf);
    bm[s].resize(nf);
    gph[s].resize(nf);
    const std::vector<double>& c = *cs[s];
    for (std::size_t f = 0; f < nf; ++f) {
      const double dpsi = zs[s] * (phi[f + 1] - phi[f]);
      const double inv = 1.0 / g.dx[f];
      bp[s][f] = bernoulli(dpsi) * inv;
      bm[s][f] = bernoulli(-dpsi) * inv;
      flux[s][f] = bp[s][f] * c[f] - bm[s][f] * c[f + 1];
      if (jac)
        gph[s][f] = (bernoulli_prime(dpsi) * c[f] + bernoulli_prime(-dpsi) * c[f + 1]) * inv;
    }
  }

  R.resize(n);
  if (jac) {
    jac->lower.assign(n, Eigen::Matrix3d::Zero());
    jac->diag.assign(n, Eigen::Matrix3d::Zero());
    jac->upper.assign(n, Eigen::Matrix3d::Zero());
    jac->rhs.resize(n);
  }

  static thread_local std::vector<char> dirichlet;
  dirichlet.assign(n, 0);
  for (std::size_t idx : g.stack_index) dirichlet[idx] = 1;

  double norm = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::Vector3d r = Eigen::Vector3d::Zero();
    for (int s = 0; s < 2; ++s) {
      const std::vector<double>& c = *cs[s];
      double v = g.w[j] * (c[j] - (*bases[s])[j]);
      if (j + 1 < n) v += dtau_eps * flux[s][j];
      if (j > 0) v -= dtau_eps * flux[s][j - 1];
      r[s] = v;
    }
    if (dirichlet[j]) {
      r[2] = phi[j] - ((g.x[j] < 0.0) ? d.V_minus : d.V_plus);
    } else {
      double v = -g.w[j] * (zs[0] * cp[j] + zs[1] * cm[j]);
      if (j + 1 < n) v += eps2 * (phi[j] - phi[j + 1]) / g.dx[j];
      if (j > 0) v += eps2 * (phi[j] - phi[j - 1]) / g.dx[j - 1];
      r[2] = v;
    }
    R[j] = r;
    norm = std::max(norm, r.cwiseAbs().maxCoeff());

    if (!jac) continue;
    Eigen::Matrix3d& D = jac->diag[j];
    Eigen::Matrix3d& U = jac->upper[j];
    Eigen::Matrix3d& Lo = jac->lower[j];
    for (int s = 0; s < 2; ++s) {
      D(s, s) = g.w[j];
      if (j + 1 < n) {
        D(s, s) += dtau_eps * bp[s][j];
        U(s, s) = -dtau_eps * bm[s][j];
        D(s, 2) -= dtau_eps * zs[s] * gph[s][j];
        U(s, 2) = dtau_eps * zs[s] * gph[s][j];
      }
      if (j > 0) {
        D(s, s) += dtau_eps * bm[s][j - 1];
        Lo(s, s) = -dtau_eps * bp[s][j - 1];
        D(s, 2) -= dtau_eps * zs[s] * gph[s][j - 1];
        Lo(s, 2) = dtau_eps * zs[s] * gph[s][j - 1];
      }
    }
    if (dirichlet[j]) {
      D(2, 2) = 1.0;
    } else {
      D(2, 0) = -g.w[j] * zs[0];
      D(2, 1) = -g.w[j] * zs[1];
      if (j + 1 < n) {
        D(2, 2) += eps2 / g.dx[j];
        U(2, 2) = -eps2 / g.dx[j];
      }
      if (j > 0) {
        D(2, 2) += eps2 / g.dx[j - 1];
        Lo(2, 2) = -eps2 / g.dx[j - 1];
      }
    }
  }
  return norm;
}

// In-place block-Thomas elimination: on return rhs holds the solution of the
// block-tridiagonal system; diag/upper are overwritten with the factors.
void solve_block_tridiagonal(StageBlocks& s) {
  const std::size_t n = s.diag.size();
  Eigen::PartialPivLU<Eigen::Matrix3d> lu(s.diag[0]);
  if (n > 1) s.upper[0] = lu.solve(s.upper[0]);
  s.rhs[0] = lu.solve(s.rhs[0]);
  for (std::size_t j = 1; j < n; ++j) {
    s.diag[j].noalias() -= s.lower[j] * s.upper[j - 1];
    s.rhs[j].noalias() -= s.lower[j] * s.rhs[j - 1];
    lu.compute(s.diag[j]);
    if (j + 1 < n) s.upper[j] = lu.solve(s.upper[j]);
    s.rhs[j] = lu.solve(s.rhs[j]);
  }
  for (std::size_t j = n - 1; j-- > 0;) s.rhs[j].noalias() -= s.upper[j] * s.rhs[j + 1];
}

// One coupled implicit stage shared by both schemes: damped Newton on the
// stage equations, with steps limited to keep concentrations positive and
// halved while they fail to reduce the residual. After convergence the
// species systems are re-solved once against the final potential so that the
// discrete balances hold to rounding and total mass telescopes exactly.
void newton_stage(std::vector<double>& cp, std::vector<double>& cm, std::vector<double>& phi,
                  const std::vector<double>& base_p, const std::vector<double>& base_m,
                  const Grid1D& g, const DriveSpec& d, const ElectrolyteSpec& e, double dtau,
                  const StepOptions& opt) {
  const std::size_t n = g.size();
  const double dtau_eps = dtau * g.epsilon;
  StageBlocks jac;
  std::vector<Eigen::Vector3d> R(n), R_trial(n);
  std::vector<double> tp(n), tm(n), tphi(n);

  auto polish = [&] {
    SpeciesSystem sys;
    std::vector<double> scratch(n);
    assemble_species(sys, base_p, phi, g, static_cast<double>(e.z_plus), dtau_eps);
    cp = sys.rhs;
    solve_tridiagonal(sys.lower, sys.diag, sys.upper, cp, scratch);
    assemble_species(sys, base_m, phi, g, static_cast<double>(e.z_minus), dtau_eps);
    cm = sys.rhs;
    solve_tridiagonal(sys.lower, sys.diag, sys.upper, cm, scratch);
  };

  for (int it = 0; it < opt.max_coupling; ++it) {
    const double res = stage_residual(cp, cm, phi, base_p, base_m, g, d, e, dtau_eps, R, &jac);
    if (!std::isfinite(res))
      throw NumericError("coupled stage solve produced a non-finite residual");
    for (std::size_t j = 0; j < n; ++j) jac.rhs[j] = -R[j];
    solve_block_tridiagonal(jac);

    // Step limit: never let a concentration cross zero within one update.
    double sigma = 1.0;
    double du_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Eigen::Vector3d& du = jac.rhs[j];
      du_max = std::max(du_max, du.cwiseAbs().maxCoeff());
      if (cp[j] + du[0] < 0.0) sigma = std::min(sigma, -0.9 * cp[j] / du[0]);
      if (cm[j] + du[1] < 0.0) sigma = std::min(sigma, -0.9 * cm[j] / du[1]);
    }

    double trial_res = res;
    for (int bt = 0; bt < 9; ++bt) {
      for (std::size_t j = 0; j < n; ++j) {
        tp[j] = cp[j] + sigma * jac.rhs[j][0];
        tm[j] = cm[j] + sigma * jac.rhs[j][1];
        tphi[j] = phi[j] + sigma * jac.rhs[j][2];
      }
      trial_res =
          stage_residual(tp, tm, tphi, base_p, base_m, g, d, e, dtau_eps, R_trial, nullptr);
      if (std::isfinite(trial_res) && trial_res <= res * (1.0 - 1e-4 * sigma)) break;
      if (du_max * sigma <= opt.coupling_tol) break;  // exhausted: update is noise-level
      sigma *= 0.5;
    }
    cp.swap(tp);
    cm.swap(tm);
    phi.swap(tphi);

    // Converged when a full (undamped, unclipped) update would move nothing.
    if (sigma >= 0.99 && du_max <= opt.coupling_tol) {
      polish();
      return;
    }
  }
  throw NumericError("coupled stage solve did not converge within " +
                     std::to_string(opt.max_coupling) + " Newton iterations");
}

void check_positive(const std::vector<double>& c, double t, const char* label) {
  for (double v : c) {
    if (!(v > 0.0)) {
      throw StabilityError(std::string("concentration ") + label +
                           " lost positivity at t = " + std::to_string(t) +
                           "; reduce the time step or refine the grid");
    }
  }
}

double linear_mass(const std::vector<double>& w, const std::vector<double>& c) {
  double m = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) m += w[j] * c[j];
  return m;
}

// Integral of the piecewise-linear nodal field rho over [a, b].
double integrate_segment(const Grid1D& g, const std::vector<double>& rho, double a, double b) {
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < g.size(); ++j) {
    const double xl = std::max(g.x[j], a);
    const double xr = std::min(g.x[j + 1], b);
    if (xr <= xl) continue;
    const double inv = 1.0 / g.dx[j];
    const double vl = rho[j] + (rho[j + 1] - rho[j]) * (xl - g.x[j]) * inv;
    const double vr = rho[j] + (rho[j + 1] - rho[j]) * (xr - g.x[j]) * inv;
    total += 0.5 * (vl + vr) * (xr - xl);
  }
  return total;
}

void record_diagnostics(PnpDiagnostics& diag, const FieldState& s, const Grid1D& g,
                        const ElectrolyteSpec& e, const std::vector<double>& cell_edges) {
  const std::size_t n = g.size();
  std::vector<double> rho(n);
  for (std::size_t j = 0; j < n; ++j)
    rho[j] = e.z_plus * s.c_plus[j] + e.z_minus * s.c_minus[j];
  std::vector<double> q(cell_edges.size() - 1);
  for (std::size_t i = 0; i + 1 < cell_edges.size(); ++i)
    q[i] = integrate_segment(g, rho, cell_edges[i], cell_edges[i + 1]);
  diag.times.push_back(s.time);
  diag.stack_charge.push_back(std::move(q));
  const std::size_t c = g.center_index;
  const double zp = e.z_plus, zm = e.z_minus;
  diag.center_salt.push_back((zp * s.c_plus[c] - zm * s.c_minus[c]) / (zp - zm));
  diag.mass_plus.push_back(linear_mass(g.w, s.c_plus));
  diag.mass_minus.push_back(linear_mass(g.w, s.c_minus));
}

}  // namespace

Grid1D build_grid(const StackGeometry& g, double epsilon, const GridSpec& spec) {
  if (!(epsilon > 0.0) || epsilon >= 1.0)
    throw ParameterError("epsilon must lie in (0, 1); got " + std::to_string(epsilon));
  if (spec.kind == GridSpec::Kind::Uniform && spec.uniform_cells < 4)
    throw ParameterError("uniform grid needs at least 4 cells across [-1, 1]");
  if (spec.kind == GridSpec::Kind::Refined &&
      (!(spec.layer_dx > 0.0) || !(spec.growth >= 1.0) || !(spec.bulk_dx > 0.0)))
    throw ParameterError("grid refinement parameters must be positive with growth >= 1");

  const std::vector<double> stacks = g.positions();  // x_1 < ... < x_n = 1

  // Build the right half [0, 1]; the full grid is its mirror image, so x = 0
  // is always a node and symmetric drives stay symmetric to rounding.
  std::vector<double> right;
  right.push_back(0.0);
  if (spec.kind == GridSpec::Kind::Uniform) {
    const double target = 2.0 / static_cast<double>(spec.uniform_cells);
    double prev = 0.0;
    for (double s : stacks) {
      const double len = s - prev;
      const auto cells =
          std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(len / target)));
      append_nodes(right, prev, std::vector<double>(cells, len / static_cast<double>(cells)));
      right.back() = s;  // pin the stack node exactly
      prev = s;
    }
  } else {
    const double d0 = spec.layer_dx * epsilon;
    double prev = 0.0;
    for (std::size_t k = 0; k < stacks.size(); ++k) {
      // [prev, x_{k+1}]: refined toward the right end always (a stack), and
      // toward the left end when prev is itself a stack (k > 0). The center
      // interval [0, x_1] is refined only at x_1.
      const double len = stacks[k] - prev;
      append_nodes(right, prev,
                   interval_spacings(len, k > 0, true, d0, spec.growth, spec.bulk_dx));
      right.back() = stacks[k];
      prev = stacks[k];
    }
  }

  Grid1D grid;
  grid.epsilon = epsilon;
  grid.x.reserve(2 * right.size() - 1);
  for (std::size_t i = right.size(); i-- > 1;) grid.x.push_back(-right[i]);
  grid.x.insert(grid.x.end(), right.begin(), right.end());
  grid.center_index = right.size() - 1;

  const std::size_t n = grid.x.size();
  grid.dx.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    grid.dx[i] = grid.x[i + 1] - grid.x[i];
    if (!(grid.dx[i] > 0.0)) throw NumericError("grid construction produced a degenerate cell");
  }
  grid.w.assign(n, 0.0);
  grid.w[0] = 0.5 * grid.dx[0];
  grid.w[n - 1] = 0.5 * grid.dx[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) grid.w[i] = 0.5 * (grid.dx[i - 1] + grid.dx[i]);

  // Locate the stack nodes (exact by construction).
  for (std::size_t i = stacks.size(); i-- > 0;) {
    const auto it = std::lower_bound(grid.x.begin(), grid.x.end(), -stacks[i] - 1e-15);
    grid.stack_index.push_back(static_cast<std::size_t>(it - grid.x.begin()));
  }
  for (double s : stacks) {
    const auto it = std::lower_bound(grid.x.begin(), grid.x.end(), s - 1e-15);
    grid.stack_index.push_back(static_cast<std::size_t>(it - grid.x.begin()));
  }
  for (std::size_t i = 0; i < grid.stack_index.size(); ++i) {
    const double want = (i < stacks.size()) ? -stacks[stacks.size() - 1 - i] : stacks[i - stacks.size()];
    if (std::abs(grid.x[grid.stack_index[i]] - want) > 1e-12)
      throw NumericError("stack position is not a grid node");
  }
  return grid;
}

std::vector<double> solve_poisson(const std::vector<double>& c_plus,
                                  const std::vector<double>& c_minus, const Grid1D& g,
                                  const DriveSpec& d, const ElectrolyteSpec& e) {
  const std::size_t n = g.size();
  if (c_plus.size() != n || c_minus.size() != n)
    throw ParameterError("concentration arrays do not match the grid");
  std::vector<double> phi(n, 0.0);
  const double eps2 = g.epsilon * g.epsilon;

  for (std::size_t idx : g.stack_index) phi[idx] = (g.x[idx] < 0.0) ? d.V_minus : d.V_plus;

  // Every stack is a Dirichlet node, so the domain splits into independent
  // sub-intervals between consecutive stacks.
  std::vector<double> lower, diag, upper, rhs, scratch;
  for (std::size_t s = 0; s + 1 < g.stack_index.size(); ++s) {
    const std::size_t a = g.stack_index[s], b = g.stack_index[s + 1];
    if (b <= a + 1) continue;  // no interior nodes
    const std::size_t m = b - a - 1;
    lower.assign(m - 1, 0.0);
    upper.assign(m - 1, 0.0);
    diag.assign(m, 0.0);
    rhs.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = a + 1 + i;
      const double aw = eps2 / g.dx[j - 1];
      const double ae = eps2 / g.dx[j];
      diag[i] = aw + ae;
      rhs[i] = g.w[j] * (e.z_plus * c_plus[j] + e.z_minus * c_minus[j]);
      if (i > 0)
        lower[i - 1] = -aw;
      else
        rhs[i] += aw * phi[a];
      if (i + 1 < m)
        upper[i] = -ae;
      else
        rhs[i] += ae * phi[b];
    }
    scratch.resize(m);
    solve_tridiagonal(lower, diag, upper, rhs, scratch);
    for (std::size_t i = 0; i < m; ++i) phi[a + 1 + i] = rhs[i];
  }
  return phi;
}

FieldState step(const FieldState& state, double dt, const Grid1D& g, const DriveSpec& d,
                const ElectrolyteSpec& e, const StepOptions& opt) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  const std::size_t n = g.size();
  if (state.c_plus.size() != n || state.c_minus.size() != n)
    throw ParameterError("state arrays do not match the grid");

  FieldState out;
  out.time = state.time + dt;
  out.c_plus = state.c_plus;
  out.c_minus = state.c_minus;
  out.phi = state.phi.size() == n ? state.phi : solve_poisson(out.c_plus, out.c_minus, g, d, e);

  if (!opt.second_order) {
    newton_stage(out.c_plus, out.c_minus, out.phi, state.c_plus, state.c_minus, g, d, e, dt, opt);
  } else {
    // Two-stage SDIRK with gamma = 1 - 1/sqrt(2): each stage is a
    // backward-Euler-type solve with step gamma*dt. Stage 1 advances from
    // the step base; stage 2 advances from base + (1-gamma)/gamma * (Y1 - base),
    // which injects the stage-1 slope without re-evaluating it.
    const double gamma = 1.0 - 1.0 / std::sqrt(2.0);
    newton_stage(out.c_plus, out.c_minus, out.phi, state.c_plus, state.c_minus, g, d, e,
                 gamma * dt, opt);
    const double wgt = (1.0 - gamma) / gamma;
    std::vector<double> base_p(n), base_m(n);
    for (std::size_t j = 0; j < n; ++j) {
      base_p[j] = state.c_plus[j] + wgt * (out.c_plus[j] - state.c_plus[j]);
      base_m[j] = state.c_minus[j] + wgt * (out.c_minus[j] - state.c_minus[j]);
    }
    newton_stage(out.c_plus, out.c_minus, out.phi, base_p, base_m, g, d, e, gamma * dt, opt);
  }
  check_positive(out.c_plus, out.time, "c+");
  check_positive(out.c_minus, out.time, "c-");
  return out;
}

PnpResult run(const StackGeometry& g, const DriveSpec& d, const ElectrolyteSpec& e,
              double epsilon, const RunOptions& opt, const GridSpec& grid_spec) {
  if (!(opt.dt > 0.0)) throw ParameterError("run requires dt > 0");
  if (!(opt.t_final >= opt.dt)) throw ParameterError("run requires t_final >= dt");
  std::vector<double> outputs = opt.output_times.empty()
                                    ? std::vector<double>{opt.t_final}
                                    : opt.output_times;
  std::sort(outputs.begin(), outputs.end());
  for (double t : outputs) {
    if (!(t >= 0.0) || t > opt.t_final * (1.0 + 1e-12))
      throw ParameterError("output times must lie in [0, t_final]");
  }

  PnpResult res;
  res.grid = build_grid(g, epsilon, grid_spec);
  const Grid1D& grid = res.grid;

  FieldState s;
  s.time = 0.0;
  s.c_plus.assign(grid.size(), e.bulk_plus());
  s.c_minus.assign(grid.size(), e.bulk_minus());
  s.phi = solve_poisson(s.c_plus, s.c_minus, grid, d, e);

  // Diagnostic cell edges: outer walls and midpoints between adjacent stacks.
  std::vector<double> edges;
  edges.push_back(-1.0);
  for (std::size_t i = 0; i + 1 < grid.stack_index.size(); ++i)
    edges.push_back(0.5 * (grid.x[grid.stack_index[i]] + grid.x[grid.stack_index[i + 1]]));
  edges.push_back(1.0);

  record_diagnostics(res.diagnostics, s, grid, e, edges);
  std::size_t next_out = 0;
  while (next_out < outputs.size() && outputs[next_out] <= 1e-14) {
    res.snapshots.push_back(s);
    ++next_out;
  }

  const double t_end = opt.t_final;
  const double tiny = 1e-12 * std::max(1.0, t_end);
  while (s.time < t_end - tiny) {
    double h = std::min(opt.dt, t_end - s.time);
    if (next_out < outputs.size()) h = std::min(h, outputs[next_out] - s.time);
    if (h < tiny) h = tiny;
    s = step(s, h, grid, d, e, opt.step);
    record_diagnostics(res.diagnostics, s, grid, e, edges);
    while (next_out < outputs.size() && s.time >= outputs[next_out] - tiny) {
      res.snapshots.push_back(s);
      ++next_out;
    }
  }
  return res;
}

std::vector<double> charge_relaxation(const PnpDiagnostics& diag, std::size_t stack_index) {
  if (diag.times.empty()) throw ParameterError("diagnostics are empty");
  if (stack_index >= diag.stack_charge.front().size())
    throw ParameterError("stack index out of range");
  double peak = 0.0;
  for (const auto& q : diag.stack_charge) peak = std::max(peak, std::abs(q[stack_index]));
  const double q_end = diag.stack_charge.back()[stack_index];
  if (std::abs(q_end) <= 1e-12 * std::max(1.0, peak))
    throw NumericError("final stack charge is too small to normalize the relaxation curve");
  std::vector<double> r(diag.times.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = 1.0 - diag.stack_charge[i][stack_index] / q_end;
  return r;
}

}  // namespace stackcap::pnp
