#include "stackcap/core.hpp"

#include <cmath>
#include <string>

namespace stackcap {

namespace {
// CODATA 2018 values (e, kB, NA are exact by definition since the SI revision).
constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
constexpr double kElementaryCharge = 1.602176634e-19;     // C
constexpr double kBoltzmann = 1.380649e-23;               // J/K
constexpr double kAvogadro = 6.02214076e23;               // 1/mol
}  // namespace

ElectrolyteSpec::ElectrolyteSpec(int zp, int zm) : z_plus(zp), z_minus(zm) {
  if (zp < 1) throw ParameterError("ElectrolyteSpec: z_plus must be >= 1, got " + std::to_string(zp));
  if (zm > -1) throw ParameterError("ElectrolyteSpec: z_minus must be <= -1, got " + std::to_string(zm));
}

double alpha(const ElectrolyteSpec& e) {
  const double zp = e.z_plus;
  const double zm = e.z_minus;
  return zm * zm * zp - zp * zp * zm;
}

StackGeometry::StackGeometry(int n_, double L_) : n(n_), L(L_), H(1.0 - L_) {
  if (n < 1) throw ParameterError("StackGeometry: n must be >= 1, got " + std::to_string(n));
  if (!(L > 0.0) || L > 1.0) throw ParameterError("StackGeometry: L must lie in (0, 1], got " + std::to_string(L));
  if (n == 1 && L != 1.0)
    throw ParameterError("StackGeometry: n = 1 requires H = 0 (L = 1), got L = " + std::to_string(L));
  if (n >= 2 && L >= 1.0)
    throw ParameterError("StackGeometry: n >= 2 requires H = 1 - L > 0, got L = " + std::to_string(L));
}

double StackGeometry::h() const {
  if (n < 2) throw ParameterError("StackGeometry::h: spacing undefined for n = 1");
  return H / static_cast<double>(n - 1);
}

double StackGeometry::position(int k) const {
  if (k < 1 || k > n) throw ParameterError("StackGeometry::position: k out of range");
  if (k == n) return 1.0;  // outermost stack is the wall, exactly
  if (k == 1) return L;    // innermost stack bounds the bulk gap, exactly
  const double nm1 = static_cast<double>(n - 1);
  return (L * static_cast<double>(n - k) + static_cast<double>(k - 1)) / nm1;
}

std::vector<double> StackGeometry::positions() const {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) xs[static_cast<std::size_t>(k - 1)] = position(k);
  return xs;
}

Scales Scales::from_epsilon(double eps) {
  if (!(eps > 0.0)) throw ParameterError("Scales: epsilon must be > 0");
  Scales s;
  s.epsilon = eps;
  return s;
}

Scales nondimensionalize(const PhysicalInputs& p) {
  if (!(p.relative_permittivity > 0.0) || !(p.temperature > 0.0) ||
      !(p.reference_concentration > 0.0) || !(p.diffusivity > 0.0) ||
      !(p.half_width > 0.0))
    throw ParameterError("nondimensionalize: all physical inputs must be strictly positive");

  const double number_density = kAvogadro * p.reference_concentration;
  const double l0 = std::sqrt(kVacuumPermittivity * p.relative_permittivity * kBoltzmann *
                              p.temperature /
                              (kElementaryCharge * kElementaryCharge * number_density));
  Scales s;
  s.epsilon = l0 / p.half_width;
  s.tau_c_seconds = l0 * p.half_width / p.diffusivity;
  s.tau_bar_seconds = p.half_width * p.half_width / p.diffusivity;
  s.has_physical = true;
  return s;
}

}  // namespace stackcap
