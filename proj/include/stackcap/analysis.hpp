#pragma once

#include <string>
#include <vector>

#include "stackcap/core.hpp"

namespace stackcap::analysis {

/// Result of splitting a normalized relaxation record r(t) = 1 - Q/Q_end
/// into an early fast phase and a late slow phase, each fitted as a single
/// exponential a exp(-t/tau).
struct RelaxationFit {
  double tau_fast = 0.0;
  double tau_slow = 0.0;
  double a_fast = 0.0;
  double a_slow = 0.0;
  double crossover_time = 0.0;  ///< detected phase boundary (end of record if single-phase)
  double residual = 0.0;        ///< RMS misfit of the reconstruction, relative to r(0)
  bool single_phase = false;    ///< set when no slope knee exceeds the ratio threshold

  bool two_phase() const { return !single_phase; }
};

/// Fits r(t) with one or two exponentials. The phase boundary is the point
/// where the smoothed logarithmic slope (moving-window least squares, window
/// = 10% of the samples) crosses the geometric mean of its steepest and
/// flattest values; records whose slope never varies by a factor of 2 are
/// declared single-phase. Two-phase records are fitted tail-first: the slow
/// exponential is regressed on the late samples, subtracted from the early
/// samples, and the fast exponential is regressed on the remainder (plain
/// segment fits leak the slow component into the fast estimate).
///
/// Requires >= 20 samples, strictly increasing times, r in (0, 1], and an
/// overall decreasing record; throws ParameterError otherwise and FitError
/// when a segment cannot support a decaying fit.
RelaxationFit biexponential_fit(const std::vector<double>& times,
                                const std::vector<double>& r);

/// Serializes a fit report (timescales, amplitudes, crossover, flags).
std::string to_json(const RelaxationFit& fit);

/// The slow (bulk-diffusion) timescale 1/epsilon in fast-time units, plus
/// its value in seconds when physical scales are attached.
struct DiffusionTimescale {
  double tau_bar = 0.0;          ///< units of tau_c
  double tau_bar_seconds = 0.0;  ///< valid when has_seconds
  bool has_seconds = false;
};

DiffusionTimescale diffusion_timescale(const Scales& scales);

/// Minimum of a center-salt record c(0, t) and the depletion fraction
/// 1 - min_t c(0, t) / c(0, 0).
struct SaltDepletion {
  double min_value = 0.0;
  double depletion_fraction = 0.0;
};

SaltDepletion salt_depletion(const std::vector<double>& center_salt);

}  // namespace stackcap::analysis
