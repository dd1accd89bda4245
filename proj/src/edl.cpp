#include "stackcap/edl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stackcap::edl {

namespace {

// f(u) in extended precision; expm1 keeps the u -> 0 cancellation benign
// (f ~ alpha u^2 / 2) and the large-|u| regime is dominated by one term.
long double radicand_ext(long double u, const ElectrolyteSpec& e) {
  const long double zp = static_cast<long double>(e.z_plus);
  const long double zm = static_cast<long double>(e.z_minus);
  return -zm * expm1l(-zp * u) + zp * expm1l(-zm * u);
}

long double sign_of(long double u) { return u > 0.0L ? 1.0L : (u < 0.0L ? -1.0L : 0.0L); }

}  // namespace

double radicand(double u, const ElectrolyteSpec& e) {
  const long double f = radicand_ext(u, e);
  const double out = static_cast<double>(f);
  if (!std::isfinite(out))
    throw RangeError("radicand: exponential overflow at u = " + std::to_string(u));
  if (out < 0.0) return out > -1e-14 ? 0.0 : out;  // round-off clamp only
  return out;
}

double diffuse_charge(const ZetaPotential& z, const ElectrolyteSpec& e) {
  const long double f = radicand_ext(z.value, e);
  const double magnitude = static_cast<double>(sqrtl(2.0L * std::max(f, 0.0L)));
  if (!std::isfinite(magnitude))
    throw RangeError("diffuse_charge: overflow at zeta = " + std::to_string(z.value));
  return z.side == LayerSide::LeftFacing ? magnitude : -magnitude;
}

double signed_diffuse_charge(double u, const ElectrolyteSpec& e) {
  const long double f = radicand_ext(u, e);
  const long double q = -sign_of(u) * sqrtl(2.0L * std::max(f, 0.0L));
  const double out = static_cast<double>(q);
  if (!std::isfinite(out))
    throw RangeError("signed_diffuse_charge: overflow at u = " + std::to_string(u));
  return out;
}

double differential_capacitance(double u, const ElectrolyteSpec& e) {
  const long double zp = static_cast<long double>(e.z_plus);
  const long double zm = static_cast<long double>(e.z_minus);
  const long double a = zm * zm * zp - zp * zp * zm;
  const long double lu = static_cast<long double>(u);
  long double c;
  if (std::fabs(u) < 1e-5) {
    // series continuation across the removable 0/0 point
    const long double p = -(zp + zm) / 3.0L;
    const long double q = (zp * zp + zp * zm + zm * zm) / 12.0L;
    const long double r = 1.5L * q - 0.375L * p * p;
    c = sqrtl(a) * (1.0L + p * lu + r * lu * lu);
  } else {
    const long double f = radicand_ext(lu, e);
    const long double num = zp * zm * (expl(-zp * lu) - expl(-zm * lu));
    c = sign_of(lu) * num / (sqrtl(2.0L) * sqrtl(f));
  }
  const double out = static_cast<double>(c);
  if (!std::isfinite(out))
    throw RangeError("differential_capacitance: overflow at u = " + std::to_string(u));
  return out;
}

double capacitance_derivative(double u, const ElectrolyteSpec& e) {
  const long double zp = static_cast<long double>(e.z_plus);
  const long double zm = static_cast<long double>(e.z_minus);
  const long double lu = static_cast<long double>(u);
  long double d;
  if (std::fabs(u) < 1e-5) {
    const long double a = zm * zm * zp - zp * zp * zm;
    const long double p = -(zp + zm) / 3.0L;
    const long double q = (zp * zp + zp * zm + zm * zm) / 12.0L;
    const long double r = 1.5L * q - 0.375L * p * p;
    d = sqrtl(a) * (p + 2.0L * r * lu);
  } else {
    // C = sgn(u) f' / sqrt(2 f) with f' = z+ z- (e^{-z+ u} - e^{-z- u}),
    // so C' = sgn(u) [ f'' / sqrt(2 f) - f'^2 / (2 f)^{3/2} ].
    const long double f = radicand_ext(lu, e);
    const long double fp = zp * zm * (expl(-zp * lu) - expl(-zm * lu));
    const long double fpp = zp * zm * (-zp * expl(-zp * lu) + zm * expl(-zm * lu));
    const long double s2f = sqrtl(2.0L * f);
    d = sign_of(lu) * (fpp / s2f - fp * fp / (s2f * s2f * s2f));
  }
  const double out = static_cast<double>(d);
  if (!std::isfinite(out))
    throw RangeError("capacitance_derivative: overflow at u = " + std::to_string(u));
  return out;
}

namespace {

// Right-hand side of the first-integral layer ODE, with the absorbing fixed
// point at phi = 0 made explicit so round-off cannot push the march across it.
double layer_slope(double phi, double orientation, const ElectrolyteSpec& e) {
  if (phi == 0.0) return 0.0;
  const long double f = radicand_ext(phi, e);
  return -orientation * static_cast<double>(sqrtl(2.0L * std::max(f, 0.0L)));
}

// Classical RK4 march of phi from y to y + span, splitting the span into
// steps no longer than hmax; returns phi(y + span).
double march_layer(double phi, double span, double hmax, double orientation,
                   const ElectrolyteSpec& e) {
  if (span <= 0.0) return phi;
  const int nsub = std::max(1, static_cast<int>(std::ceil(span / hmax)));
  const double h = span / nsub;
  for (int i = 0; i < nsub; ++i) {
    const double k1 = layer_slope(phi, orientation, e);
    const double k2 = layer_slope(phi + 0.5 * h * k1, orientation, e);
    const double k3 = layer_slope(phi + 0.5 * h * k2, orientation, e);
    const double k4 = layer_slope(phi + h * k3, orientation, e);
    phi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (phi * orientation < 0.0) phi = 0.0;  // crossed the fixed point: clamp
  }
  return phi;
}

}  // namespace

LayerProfile pb_profile(const ZetaPotential& z, const ElectrolyteSpec& e, double y_max,
                        std::size_t samples) {
  if (!(y_max > 0.0)) throw ParameterError("pb_profile: y_max must be > 0");
  if (samples < 2) throw ParameterError("pb_profile: need at least 2 samples");

  LayerProfile prof;
  prof.y.resize(samples);
  prof.phi.resize(samples);
  prof.c_plus.resize(samples);
  prof.c_minus.resize(samples);

  const double dy = y_max / static_cast<double>(samples - 1);
  const double orientation = z.value > 0.0 ? 1.0 : (z.value < 0.0 ? -1.0 : 0.0);
  double phi = z.value;
  for (std::size_t i = 0; i < samples; ++i) {
    const double y = (i + 1 == samples) ? y_max : dy * static_cast<double>(i);
    if (i > 0 && orientation != 0.0) phi = march_layer(phi, dy, 5e-4, orientation, e);
    prof.y[i] = y;
    prof.phi[i] = phi;
    prof.c_plus[i] = e.bulk_plus() * std::exp(-static_cast<double>(e.z_plus) * phi);
    prof.c_minus[i] = e.bulk_minus() * std::exp(-static_cast<double>(e.z_minus) * phi);
    if (!std::isfinite(phi)) throw NumericError("pb_profile: non-finite layer potential");
  }
  if (y_max >= 20.0 && std::fabs(prof.phi.back()) > 1e-6)
    throw NumericError("pb_profile: layer potential failed to decay on [0, y_max]");
  return prof;
}

std::vector<double> pb_profile_at(double zeta, const ElectrolyteSpec& e,
                                  const std::vector<double>& ys) {
  std::vector<double> out(ys.size(), 0.0);
  if (zeta == 0.0 || ys.empty()) return out;
  const double orientation = zeta > 0.0 ? 1.0 : -1.0;
  double phi = zeta;
  double y = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (ys[i] < y)
      throw ParameterError("pb_profile_at: stretched distances must be ascending and >= 0");
    // Step size grows with y: the drop decays exponentially, so the absolute
    // RK4 error of the longer late steps stays far below the early-step error.
    while (y < ys[i]) {
      const double hmax = std::min(5e-4 * (1.0 + y), 0.05);
      const double span = std::min(ys[i] - y, hmax);
      phi = march_layer(phi, span, hmax, orientation, e);
      y += span;
    }
    out[i] = phi;
  }
  return out;
}

}  // namespace stackcap::edl
