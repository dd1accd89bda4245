#include "stackcap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "stackcap/errors.hpp"

namespace stackcap::analysis {

namespace {

struct LineFit {
  double slope;
  double intercept;
};

// Least-squares line through (x_i, y_i), i in [begin, end).
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, std::size_t begin,
                 std::size_t end) {
  const auto n = static_cast<double>(end - begin);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("degenerate abscissa in regression segment");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double decay_time(const LineFit& f, const char* segment) {
  if (!(f.slope < 0.0))
    throw FitError(std::string("the ") + segment + " segment does not decay");
  return -1.0 / f.slope;
}

double rms_misfit(const std::vector<double>& t, const std::vector<double>& r,
                  const RelaxationFit& fit) {
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double model = fit.a_fast * std::exp(-t[i] / fit.tau_fast) +
                         (fit.single_phase ? 0.0 : fit.a_slow * std::exp(-t[i] / fit.tau_slow));
    ss += (r[i] - model) * (r[i] - model);
  }
  return std::sqrt(ss / static_cast<double>(t.size())) / r.front();
}

}  // namespace

RelaxationFit biexponential_fit(const std::vector<double>& times,
                                const std::vector<double>& r) {
  const std::size_t n = times.size();
  if (r.size() != n) throw ParameterError("time and value arrays differ in length");
  if (n < 20) throw ParameterError("relaxation fit needs at least 20 samples");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(r[i] > 0.0) || r[i] > 1.0 + 1e-12)
      throw ParameterError("relaxation values must lie in (0, 1]");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw ParameterError("sample times must be strictly increasing");
  }
  if (!(r.back() < r.front()))
    throw ParameterError("relaxation record does not decrease overall");

  std::vector<double> logr(n);
  for (std::size_t i = 0; i < n; ++i) logr[i] = std::log(r[i]);

  // Smoothed logarithmic slope: least-squares slope over a sliding window of
  // ~10% of the record, attributed to the window's central time.
  const std::size_t w = std::max<std::size_t>(3, (n + 5) / 10);
  const std::size_t n_win = n - w + 1;
  std::vector<double> slope_mag(n_win), slope_time(n_win);
  for (std::size_t i = 0; i < n_win; ++i) {
    const LineFit f = fit_line(times, logr, i, i + w);
    slope_mag[i] = std::abs(f.slope);
    slope_time[i] = 0.5 * (times[i] + times[i + w - 1]);
  }
  const double steep = *std::max_element(slope_mag.begin(), slope_mag.end());
  const double flat = *std::min_element(slope_mag.begin(), slope_mag.end());

  RelaxationFit fit;
  if (!(flat > 0.0) || steep / flat < 2.0) {
    // No knee: one decay rate describes the whole record.
    const LineFit f = fit_line(times, logr, 0, n);
    fit.single_phase = true;
    fit.tau_fast = fit.tau_slow = decay_time(f, "whole-record");
    fit.a_fast = fit.a_slow = std::exp(f.intercept);
    fit.crossover_time = times.back();
    fit.residual = rms_misfit(times, r, fit);
    return fit;
  }

  // Knee: first time the slope magnitude falls to the geometric mean of its
  // extremes.
  const double threshold = std::sqrt(steep * flat);
  double knee = slope_time.back();
  for (std::size_t i = 0; i < n_win; ++i) {
    if (slope_mag[i] <= threshold) {
      knee = slope_time[i];
      break;
    }
  }
  fit.crossover_time = knee;

  // Slow phase: regress on the late samples, starting at 2x the knee so the
  // fast component has decayed a further factor ~e^-knee/tau_fast below its
  // knee-time share; fall back to the knee if the record is too short.
  auto first_at = [&](double t0) {
    return static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), t0) - times.begin());
  };
  const std::size_t min_seg = std::max<std::size_t>(5, w);
  std::size_t slow_begin = first_at(2.0 * knee);
  if (n - slow_begin < min_seg) slow_begin = first_at(knee);
  if (n - slow_begin < min_seg)
    throw FitError("too few samples beyond the phase boundary to fit the slow phase");
  const LineFit slow = fit_line(times, logr, slow_begin, n);
  fit.tau_slow = decay_time(slow, "slow");
  fit.a_slow = std::exp(slow.intercept);

  // Fast phase: peel the fitted slow exponential off the pre-knee samples
  // and regress the remainder.
  std::vector<double> tf, yf;
  for (std::size_t i = 0; i < n && times[i] <= knee; ++i) {
    const double resid = r[i] - fit.a_slow * std::exp(-times[i] / fit.tau_slow);
    if (resid > 0.0) {
      tf.push_back(times[i]);
      yf.push_back(std::log(resid));
    }
  }
  if (tf.size() < 3) throw FitError("too few samples before the phase boundary to fit the fast phase");
  const LineFit fast = fit_line(tf, yf, 0, tf.size());
  fit.tau_fast = decay_time(fast, "fast");
  fit.a_fast = std::exp(fast.intercept);

  if (fit.tau_fast > fit.tau_slow) {
    std::swap(fit.tau_fast, fit.tau_slow);
    std::swap(fit.a_fast, fit.a_slow);
  }
  fit.residual = rms_misfit(times, r, fit);
  return fit;
}

std::string to_json(const RelaxationFit& fit) {
  nlohmann::json j;
  j["tau_fast"] = fit.tau_fast;
  j["tau_slow"] = fit.tau_slow;
  j["a_fast"] = fit.a_fast;
  j["a_slow"] = fit.a_slow;
  j["crossover_time"] = fit.crossover_time;
  j["residual"] = fit.residual;
  j["single_phase"] = fit.single_phase;
  return j.dump(2);
}

DiffusionTimescale diffusion_timescale(const Scales& scales) {
  if (!(scales.epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  DiffusionTimescale d;
  d.tau_bar = 1.0 / scales.epsilon;
  d.has_seconds = scales.has_physical;
  d.tau_bar_seconds = scales.has_physical ? scales.tau_bar_seconds : 0.0;
  return d;
}

SaltDepletion salt_depletion(const std::vector<double>& center_salt) {
  if (center_salt.empty()) throw ParameterError("center-salt record is empty");
  if (!(center_salt.front() > 0.0))
    throw ParameterError("initial center-salt value must be positive");
  SaltDepletion s;
  s.min_value = *std::min_element(center_salt.begin(), center_salt.end());
  s.depletion_fraction = 1.0 - s.min_value / center_salt.front();
  return s;
}

}  // namespace stackcap::analysis
