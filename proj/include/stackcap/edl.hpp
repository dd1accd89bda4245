#pragma once

#include <cstddef>
#include <vector>

#include "stackcap/core.hpp"

namespace stackcap::edl {

/// Orientation of a boundary layer relative to its electrode: a LeftFacing
/// layer decays to the right of the electrode plane (bulk on its right),
/// a RightFacing layer decays to the left.
enum class LayerSide { LeftFacing, RightFacing };

/// Potential drop across one boundary layer (thermal-voltage units) together
/// with the layer orientation that fixes the diffuse-charge sign convention.
struct ZetaPotential {
  double value = 0.0;
  LayerSide side = LayerSide::LeftFacing;
};

/// Boundary-layer solution sampled on the stretched half-line y >= 0
/// (y = distance from the electrode in units of the screening length).
/// Concentrations follow the Boltzmann closure c_± = |z∓| exp(-z± phi).
struct LayerProfile {
  std::vector<double> y;
  std::vector<double> phi;
  std::vector<double> c_plus;
  std::vector<double> c_minus;
};

/// f(u) = -z- e^{-z+ u} + z+ e^{-z- u} + z- - z+.
///
/// Nonnegative for every valid electrolyte; evaluated via expm1 in extended
/// precision, with tiny negative round-off clamped to zero. Throws RangeError
/// when the result overflows double precision.
double radicand(double u, const ElectrolyteSpec& e);

/// Orientation-signed total diffuse charge of one layer: +sqrt(2 f(zeta))
/// for LeftFacing layers, -sqrt(2 f(zeta)) for RightFacing layers.
///
/// Note: each orientation sign is the physical branch only on the half-line
/// the layer occupies while charging (LeftFacing layers have zeta <= 0 when
/// driven from the left, RightFacing zeta >= 0); the branch that is smooth
/// and valid for all zeta is signed_diffuse_charge().
double diffuse_charge(const ZetaPotential& z, const ElectrolyteSpec& e);

/// Odd continuation of the diffuse charge, Q(u) = -sgn(u) sqrt(2 f(u)).
///
/// Smooth through u = 0 (Q ~ -sqrt(alpha) u), strictly decreasing, and
/// satisfies dQ/du = -C(u) for all u; this is the branch entering the
/// conserved total charge and the equilibrium constraint.
double signed_diffuse_charge(double u, const ElectrolyteSpec& e);

/// Differential double-layer capacitance
///   C(u) = sgn(u) z+ z- (e^{-z+ u} - e^{-z- u}) / sqrt(2 f(u)) > 0,
/// with the removable singularity at u = 0 handled by a series branch below
/// |u| = 1e-5: C = sqrt(alpha) (1 + p u + r u^2), p = -(z+ + z-)/3.
/// Evaluated internally in extended precision. Throws RangeError on overflow.
double differential_capacitance(double u, const ElectrolyteSpec& e);

/// dC/du, needed by implicit integrators' Jacobians; same branch structure
/// as differential_capacitance.
double capacitance_derivative(double u, const ElectrolyteSpec& e);

/// Integrates the boundary-layer potential from the first-integral form
///   dphi/dy = -sgn(zeta) sqrt(2 f(phi)),  phi(0) = zeta,
/// on y in [0, y_max], returning the profile on `samples` equally spaced
/// points with Boltzmann concentrations filled in. The drop decays
/// monotonically to 0 regardless of orientation (orientation only flips the
/// spatial direction in which the caller applies the profile).
LayerProfile pb_profile(const ZetaPotential& z, const ElectrolyteSpec& e,
                        double y_max = 25.0, std::size_t samples = 2001);

/// Evaluates the layer potential at caller-supplied stretched distances
/// (ascending, >= 0) by marching the same first-integral ODE; used to place
/// layer corrections on nonuniform field grids.
std::vector<double> pb_profile_at(double zeta, const ElectrolyteSpec& e,
                                  const std::vector<double>& ys);

}  // namespace stackcap::edl
