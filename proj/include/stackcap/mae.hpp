#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stackcap/circuit.hpp"
#include "stackcap/core.hpp"
#include "stackcap/pnp.hpp"

namespace stackcap::mae {

/// Piecewise-affine outer (bulk) potential: sub-domain i of the 2n-1 gaps
/// between adjacent stacks (ordered left wall -> right wall) carries
/// phi(x) = offset[i] + slope[i] * x. Bulk concentrations are the neutral
/// reservoir values at this order.
struct BulkFields {
  std::vector<double> edges;   ///< 2n stack positions, ascending
  std::vector<double> slope;   ///< 2n-1 sub-domain potential gradients
  std::vector<double> offset;  ///< 2n-1 sub-domain offsets

  std::size_t domains() const { return slope.size(); }
  /// Sub-domain index containing x (stack nodes resolve to either neighbor).
  std::size_t locate(double x) const;
  double phi(double x) const;
};

BulkFields bulk_fields(const circuit::ZetaVector& state, const circuit::CircuitSystem& s);

/// Uniformly valid leading-order reconstruction on a grid: affine bulk plus
/// the equilibrium layer drop at every stack, sharing one zeta per stack.
struct CompositeField {
  pnp::FieldState field;
  std::vector<std::string> warnings;  ///< resolution / scale-separation notices
};

CompositeField composite_field(const circuit::ZetaVector& state,
                               const circuit::CircuitSystem& s, const pnp::Grid1D& grid);

/// Field-by-field discrepancy, normalized by the max magnitude of the
/// reference field (absolute error is reported when the reference vanishes).
struct CompareReport {
  double rel_err_phi = 0.0;  ///< relative L-infinity
  double rel_err_cplus = 0.0;
  double rel_err_cminus = 0.0;
  double rel_err_phi_l2 = 0.0;  ///< relative L2 (trapezoid weighted)
  double rel_err_cplus_l2 = 0.0;
  double rel_err_cminus_l2 = 0.0;
};

/// Compares a composite reconstruction against a reference state. The
/// reference is interpolated (piecewise linear) onto the composite's grid
/// when the node sets differ; the domains must coincide.
CompareReport compare(const CompositeField& approx, const pnp::Grid1D& approx_grid,
                      const pnp::FieldState& reference, const pnp::Grid1D& reference_grid);

}  // namespace stackcap::mae
