#include "stackcap/mae.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "stackcap/edl.hpp"
#include "stackcap/errors.hpp"

namespace stackcap::mae {

namespace {

// Piecewise-linear evaluation of (xs, vs) at x, clamped to the end values.
double interp_linear(const std::vector<double>& xs, const std::vector<double>& vs, double x) {
  if (x <= xs.front()) return vs.front();
  if (x >= xs.back()) return vs.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double t = (x - xs[j]) / (xs[j + 1] - xs[j]);
  return vs[j] + t * (vs[j + 1] - vs[j]);
}

struct ErrPair {
  double linf;
  double l2;
};

ErrPair relative_error(const std::vector<double>& a, const std::vector<double>& r,
                       const std::vector<double>& w) {
  double max_diff = 0.0, max_ref = 0.0, ss_diff = 0.0, ss_ref = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - r[j];
    max_diff = std::max(max_diff, std::abs(d));
    max_ref = std::max(max_ref, std::abs(r[j]));
    ss_diff += w[j] * d * d;
    ss_ref += w[j] * r[j] * r[j];
  }
  ErrPair e;
  e.linf = max_diff / (max_ref > 0.0 ? max_ref : 1.0);
  e.l2 = std::sqrt(ss_diff) / (ss_ref > 0.0 ? std::sqrt(ss_ref) : 1.0);
  return e;
}

}  // namespace

std::size_t BulkFields::locate(double x) const {
  const double lo = edges.front(), hi = edges.back();
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  if (x < lo - slack || x > hi + slack)
    throw RangeError("point " + std::to_string(x) + " lies outside the electrode span");
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  std::size_t i = (it == edges.begin()) ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
  return std::min(i, domains() - 1);
}

double BulkFields::phi(double x) const {
  const std::size_t i = locate(x);
  return offset[i] + slope[i] * x;
}

BulkFields bulk_fields(const circuit::ZetaVector& state, const circuit::CircuitSystem& s) {
  if (state.size() != s.size())
    throw ParameterError("state size does not match the circuit system");
  const std::size_t n = s.geometry.n;
  const std::vector<double> pos = s.geometry.positions();

  BulkFields b;
  b.edges.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) b.edges[i] = -pos[n - 1 - i];
  for (std::size_t i = 0; i < n; ++i) b.edges[n + i] = pos[i];

  b.slope = circuit::currents(state, s);
  b.offset.resize(b.slope.size());
  for (std::size_t i = 0; i < b.offset.size(); ++i) {
    if (i <= n - 1) {
      // Left half (and the central gap): the sub-domain's left end is the
      // left-half stack carrying state[i], held at V-.
      b.offset[i] = (s.drive.V_minus - state[i]) - b.slope[i] * b.edges[i];
    } else {
      // Right half: the sub-domain's right end is the right-half stack
      // carrying state[i + 1], held at V+.
      b.offset[i] = (s.drive.V_plus - state[i + 1]) - b.slope[i] * b.edges[i + 1];
    }
  }
  return b;
}

CompositeField composite_field(const circuit::ZetaVector& state,
                               const circuit::CircuitSystem& s, const pnp::Grid1D& grid) {
  if (state.size() != s.size())
    throw ParameterError("state size does not match the circuit system");
  if (grid.stack_index.size() != state.size())
    throw ParameterError("grid stack count does not match the circuit system");

  const BulkFields bulk = bulk_fields(state, s);
  for (std::size_t i = 0; i < bulk.edges.size(); ++i) {
    if (std::abs(grid.x[grid.stack_index[i]] - bulk.edges[i]) > 1e-12)
      throw ParameterError("grid stack positions do not match the circuit geometry");
  }

  const ElectrolyteSpec& e = s.electrolyte;
  const double eps = grid.epsilon;
  const std::size_t n_nodes = grid.size();

  CompositeField out;
  out.field.time = 0.0;
  out.field.c_plus.assign(n_nodes, e.bulk_plus());
  out.field.c_minus.assign(n_nodes, e.bulk_minus());
  out.field.phi.resize(n_nodes);
  for (std::size_t j = 0; j < n_nodes; ++j) out.field.phi[j] = bulk.phi(grid.x[j]);

  // Scale-separation and resolution notices.
  const double min_gap = std::min(2.0 * s.geometry.L,
                                  s.geometry.n >= 2 ? s.geometry.h() : 2.0 * s.geometry.L);
  if (min_gap < 10.0 * eps)
    out.warnings.push_back(
        "smallest inter-stack gap is below 10 epsilon; adjacent boundary layers overlap and "
        "the leading-order reconstruction degrades");
  double worst_dx = 0.0;
  for (std::size_t idx : grid.stack_index) {
    if (idx > 0) worst_dx = std::max(worst_dx, grid.dx[idx - 1]);
    if (idx + 1 < n_nodes) worst_dx = std::max(worst_dx, grid.dx[idx]);
  }
  if (worst_dx > 0.5 * eps)
    out.warnings.push_back(
        "grid spacing next to a stack exceeds epsilon/2; layer profiles are under-resolved "
        "on this grid");

  // Layer corrections: each stack contributes the same equilibrium drop
  // profile on both of its faces (one zeta per stack), truncated where it
  // has decayed below round-off and confined to the adjacent sub-domains.
  const double cutoff = 25.0 * eps;
  const std::size_t n_stacks = grid.stack_index.size();
  std::vector<char> is_stack_node(n_nodes, 0);
  for (std::size_t idx : grid.stack_index) is_stack_node[idx] = 1;

  std::vector<double> ys;
  std::vector<std::size_t> which;
  for (std::size_t i = 0; i < n_stacks; ++i) {
    const double zeta = state[i];
    if (zeta == 0.0) continue;
    const std::size_t center = grid.stack_index[i];
    const double X = grid.x[center];
    const double lo = (i > 0) ? grid.x[grid.stack_index[i - 1]] : grid.x.front();
    const double hi = (i + 1 < n_stacks) ? grid.x[grid.stack_index[i + 1]] : grid.x.back();

    for (int dir : {-1, +1}) {
      ys.clear();
      which.clear();
      if (dir > 0) {
        ys.push_back(0.0);  // the stack node itself belongs to one side only
        which.push_back(center);
      }
      for (std::size_t step = 1;; ++step) {
        if (dir < 0 && center < step) break;
        const std::size_t j = (dir > 0) ? center + step : center - step;
        if (dir > 0 && j >= n_nodes) break;
        const double d = std::abs(grid.x[j] - X);
        if (d > cutoff || grid.x[j] < lo - 1e-15 || grid.x[j] > hi + 1e-15) break;
        if (is_stack_node[j]) break;  // never touch a neighboring electrode node
        ys.push_back(d / eps);
        which.push_back(j);
      }
      if (ys.empty()) continue;
      const std::vector<double> drop = edl::pb_profile_at(zeta, e, ys);
      for (std::size_t k = 0; k < which.size(); ++k) {
        const std::size_t j = which[k];
        out.field.phi[j] += drop[k];
        out.field.c_plus[j] += e.bulk_plus() * std::expm1(-e.z_plus * drop[k]);
        out.field.c_minus[j] += e.bulk_minus() * std::expm1(-e.z_minus * drop[k]);
      }
    }
  }
  return out;
}

CompareReport compare(const CompositeField& approx, const pnp::Grid1D& approx_grid,
                      const pnp::FieldState& reference, const pnp::Grid1D& reference_grid) {
  const std::size_t na = approx_grid.size(), nr = reference_grid.size();
  if (approx.field.phi.size() != na || reference.phi.size() != nr)
    throw ParameterError("field arrays do not match their grids");
  if (std::abs(approx_grid.x.front() - reference_grid.x.front()) > 1e-12 ||
      std::abs(approx_grid.x.back() - reference_grid.x.back()) > 1e-12)
    throw ParameterError("fields live on different domains");

  bool same_nodes = (na == nr);
  if (same_nodes) {
    for (std::size_t j = 0; j < na; ++j) {
      if (std::abs(approx_grid.x[j] - reference_grid.x[j]) > 1e-14) {
        same_nodes = false;
        break;
      }
    }
  }

  std::vector<double> rp, rm, rphi;
  const std::vector<double>*ref_p = &reference.c_plus, *ref_m = &reference.c_minus,
                           *ref_phi = &reference.phi;
  if (!same_nodes) {
    rp.resize(na);
    rm.resize(na);
    rphi.resize(na);
    for (std::size_t j = 0; j < na; ++j) {
      const double x = approx_grid.x[j];
      rp[j] = interp_linear(reference_grid.x, reference.c_plus, x);
      rm[j] = interp_linear(reference_grid.x, reference.c_minus, x);
      rphi[j] = interp_linear(reference_grid.x, reference.phi, x);
    }
    ref_p = &rp;
    ref_m = &rm;
    ref_phi = &rphi;
  }

  CompareReport rep;
  const ErrPair ephi = relative_error(approx.field.phi, *ref_phi, approx_grid.w);
  const ErrPair ep = relative_error(approx.field.c_plus, *ref_p, approx_grid.w);
  const ErrPair em = relative_error(approx.field.c_minus, *ref_m, approx_grid.w);
  rep.rel_err_phi = ephi.linf;
  rep.rel_err_cplus = ep.linf;
  rep.rel_err_cminus = em.linf;
  rep.rel_err_phi_l2 = ephi.l2;
  rep.rel_err_cplus_l2 = ep.l2;
  rep.rel_err_cminus_l2 = em.l2;
  return rep;
}

}  // namespace stackcap::mae
