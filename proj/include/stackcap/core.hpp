#pragma once

#include <vector>

#include "stackcap/errors.hpp"

namespace stackcap {

/// Binary electrolyte with integer valences z+ > 0 > z-.
///
/// Dimensionless bulk concentrations are fixed by charge neutrality,
/// c_{+,b} = |z-| and c_{-,b} = |z+| (in units of the reference
/// concentration c0), so the bulk satisfies z+ c_{+,b} + z- c_{-,b} = 0.
/// Both species share a single diffusivity by construction.
struct ElectrolyteSpec {
  int z_plus = 1;
  int z_minus = -1;

  ElectrolyteSpec() = default;
  ElectrolyteSpec(int zp, int zm);

  double bulk_plus() const { return static_cast<double>(-z_minus); }
  double bulk_minus() const { return static_cast<double>(z_plus); }
};

/// alpha = z-^2 z+ - z+^2 z-, the (positive) electrolyte constant scaling the
/// bulk ionic current in the reduced circuit model.
double alpha(const ElectrolyteSpec& e);

/// Stack-electrode geometry on the rescaled cell [-1, 1].
///
/// n ion-permeable stacks per side sit at x_k = L + (k-1) h, k = 1..n, with
/// stack spacing h = H/(n-1), bulk half-width L and electrode-region width
/// H = 1 - L; the outermost stacks coincide with the blocking walls at +-1.
/// n = 1 is the classical two-plate cell (H = 0, L = 1).
struct StackGeometry {
  int n = 1;
  double L = 1.0;
  double H = 0.0;

  StackGeometry() = default;

  /// Builds a geometry with n stacks per side and bulk half-width L;
  /// H = 1 - L. Throws ParameterError on violated constraints (n >= 1,
  /// 0 < L <= 1, and L = 1 exactly when n = 1).
  StackGeometry(int n_, double L_);

  /// Stack spacing h = H/(n-1); only defined for n >= 2.
  double h() const;

  /// Stack position x_k for k = 1..n. Evaluated in the endpoint-exact form
  /// x_k = (L (n-k) + (k-1)) / (n-1) so x_1 = L and x_n = 1 hold exactly.
  double position(int k) const;

  /// All stack positions x_1..x_n in increasing order.
  std::vector<double> positions() const;
};

/// Applied electrode potentials in thermal-voltage units: all right-half
/// stacks are held at V_plus, all left-half stacks at V_minus.
struct DriveSpec {
  double V_plus = 0.0;
  double V_minus = 0.0;
};

/// Dimensionless groups of the rescaled model.
///
/// epsilon is the ratio of the Debye-type screening length l0 to the cell
/// half-width D and is the small parameter of the thin-layer limit. When the
/// scales were derived from physical inputs, the RC time tau_c = l0 D / D0
/// and the bulk diffusion time tau_bar = D^2 / D0 = tau_c / epsilon are
/// carried along in seconds.
struct Scales {
  double epsilon = 0.0;
  double tau_c_seconds = 0.0;
  double tau_bar_seconds = 0.0;
  bool has_physical = false;

  static Scales from_epsilon(double eps);
};

/// Physical cell description consumed by nondimensionalize().
struct PhysicalInputs {
  double relative_permittivity = 0.0;   ///< solvent dielectric constant
  double temperature = 0.0;             ///< K
  double reference_concentration = 0.0; ///< mol/m^3 (1 mM = 1 mol/m^3)
  double diffusivity = 0.0;             ///< m^2/s, shared by both species
  double half_width = 0.0;              ///< cell half-width D, m
};

/// Computes the dimensionless groups from physical inputs:
///   l0    = sqrt(eps0 epsr kB T / (e^2 NA c0)),
///   epsilon = l0 / D,  tau_c = l0 D / D0,  tau_bar = D^2 / D0.
/// Throws ParameterError if any input is not strictly positive.
Scales nondimensionalize(const PhysicalInputs& p);

}  // namespace stackcap
