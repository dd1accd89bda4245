#pragma once

#include <cstddef>
#include <vector>

#include "stackcap/core.hpp"

namespace stackcap::pnp {

/// Mesh construction recipe. Refined grids cluster nodes geometrically on
/// both sides of every stack (first spacing layer_dx * epsilon, growing by
/// `growth` up to bulk_dx); the uniform mode keeps one spacing everywhere
/// and exists for convergence studies (nested under cell doubling).
struct GridSpec {
  enum class Kind { Refined, Uniform };
  Kind kind = Kind::Refined;
  std::size_t uniform_cells = 400;  ///< total cells across [-1, 1] (Uniform)
  double layer_dx = 0.05;           ///< first spacing at a stack, units of epsilon
  double growth = 1.12;             ///< geometric growth ratio away from stacks
  double bulk_dx = 0.01;            ///< spacing cap in the bulk
};

/// Nonuniform node set on [-1, 1] with every stack position +-x_k a node.
/// The grid is symmetric about 0 and always contains the node x = 0.
struct Grid1D {
  std::vector<double> x;                  ///< strictly increasing nodes
  std::vector<double> dx;                 ///< x[i+1] - x[i]
  std::vector<double> w;                  ///< dual-cell widths (trapezoid weights)
  std::vector<std::size_t> stack_index;   ///< node indices of -x_n..-x_1, x_1..x_n
  std::size_t center_index = 0;           ///< node at x = 0
  double epsilon = 0.0;

  std::size_t size() const { return x.size(); }
};

Grid1D build_grid(const StackGeometry& g, double epsilon, const GridSpec& spec = {});

/// Nodal solver state.
struct FieldState {
  double time = 0.0;
  std::vector<double> c_plus;
  std::vector<double> c_minus;
  std::vector<double> phi;
};

/// Time-stepping options. The default scheme is a two-stage L-stable
/// second-order singly diagonally implicit method; backward Euler is kept
/// for robustness comparisons. Each implicit stage solves the coupled
/// concentration/potential system by a damped Newton iteration with the
/// exact block-tridiagonal Jacobian (the lagged a.k.a. Gummel splitting is
/// not contractive at small epsilon or strong drives); a stage is converged
/// when the full, undamped Newton update falls below coupling_tol.
struct StepOptions {
  bool second_order = true;
  double coupling_tol = 1e-10;
  int max_coupling = 50;
};

/// Per-run diagnostics, recorded after every accepted step (and at t = 0):
/// per-stack net charge Q_i = integral of the charge density over the cell
/// between the midpoints of the adjacent inter-stack intervals (half cell at
/// the outermost stacks), center salt concentration, and species masses.
struct PnpDiagnostics {
  std::vector<double> times;
  std::vector<std::vector<double>> stack_charge;  ///< per sample: 2n values, left wall -> right wall
  std::vector<double> center_salt;                ///< (z+ c+(0) - z- c-(0)) / (z+ - z-)
  std::vector<double> mass_plus;
  std::vector<double> mass_minus;
};

struct RunOptions {
  double dt = 0.01;
  double t_final = 10.0;
  std::vector<double> output_times;  ///< snapshot times; empty = {t_final}
  StepOptions step;
};

struct PnpResult {
  Grid1D grid;
  std::vector<FieldState> snapshots;
  PnpDiagnostics diagnostics;
};

/// Solves the Poisson problem -eps^2 phi'' = z+ c+ + z- c- with phi pinned
/// to V- at the left-half stacks and V+ at the right-half stacks. Every
/// stack node is Dirichlet-constrained, so the solve decomposes into
/// independent tridiagonal sub-interval solves.
std::vector<double> solve_poisson(const std::vector<double>& c_plus,
                                  const std::vector<double>& c_minus, const Grid1D& g,
                                  const DriveSpec& d, const ElectrolyteSpec& e);

/// Advances one implicit step of the transport equations
///   dc/dt = eps d/dx (dc/dx + z c dphi/dx)
/// with exponentially fitted (Scharfetter-Gummel) face fluxes, zero flux at
/// the outer walls, and flux continuity across interior stacks (ordinary
/// nodes of the conservative discretization). The returned state carries a
/// potential consistent with the new concentrations. Throws NumericError on
/// Gummel non-convergence and StabilityError if positivity is lost.
FieldState step(const FieldState& state, double dt, const Grid1D& g, const DriveSpec& d,
                const ElectrolyteSpec& e, const StepOptions& opt = {});

/// Time-steps from the uniform neutral initial condition c_± = |z∓|,
/// recording diagnostics every step and snapshots at the requested times
/// (each output time is hit exactly by shortening the step that straddles it).
PnpResult run(const StackGeometry& g, const DriveSpec& d, const ElectrolyteSpec& e,
              double epsilon, const RunOptions& opt, const GridSpec& grid_spec = {});

/// Normalized charge relaxation 1 - Q_i(t)/Q_i(t_final) for one stack
/// (index into the 2n stacks, left wall -> right wall). Throws NumericError
/// when the final charge is too small to normalize by.
std::vector<double> charge_relaxation(const PnpDiagnostics& diag, std::size_t stack_index);

}  // namespace stackcap::pnp
