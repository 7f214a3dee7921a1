#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rabical/experiment.hpp"

namespace rabical {

// One fixed-amplitude time trace of a Rabi map.
struct RabiTrace {
  std::vector<double> durations_us;
  std::vector<double> p_values;
  std::uint64_t shots = 1000;
  double amplitude_mv = 0.0;

  // Equal lengths, >= 8 points, strictly increasing durations, shots >= 1.
  void validate() const;
};

// Fit of p(tau) = offset - contrast * exp(-tau / decay_time) * cos(omega * tau).
struct FitResult {
  double omega = 0.0;
  double omega_stderr = 0.0;
  // +infinity when the fitted envelope does not decay.
  double decay_time = 0.0;
  double contrast = 0.0;
  double offset = 0.0;
  // sqrt of the weighted sum of squared residuals (chi).
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct FitOptions {
  int max_iterations = 200;
};

struct RabiFrequencyCurve {
  std::vector<double> amplitudes_mv;
  std::vector<double> omegas;
  std::vector<double> stderrs;
  std::string qubit_label;

  std::size_t size() const { return amplitudes_mv.size(); }
  void validate() const;
};

struct ExcludedFit {
  double amplitude_mv = 0.0;
  FitResult fit;
  std::string reason;
};

struct CurveExtraction {
  RabiFrequencyCurve curve;
  std::vector<ExcludedFit> excluded;
};

// Binomial standard error with both p and 1 - p floored at 0.01.
double binomial_sigma(double p, std::uint64_t shots);

// 2*pi times the frequency of the strongest nonzero DFT bin of the
// mean-subtracted trace; 0 when that bin does not stand out of the noise
// floor (median bin magnitude). Requires uniformly spaced durations.
double initial_frequency_guess(const RabiTrace& trace);

// Weighted Levenberg-Marquardt fit. Never throws on numerical trouble;
// non-convergence is reported through FitResult::converged.
FitResult fit_rabi_frequency(const RabiTrace& trace, const FitOptions& options = {});

// Weighted chi of the model at the given parameters.
double fit_residual_norm(const RabiTrace& trace, double offset, double contrast,
                         double decay_time, double omega);

// Fits whose relative omega stderr exceeds this are excluded from the curve.
inline constexpr double kMaxRelativeStderr = 0.5;

// Fits every amplitude row of the map. Throws std::invalid_argument for an
// invalid/empty map and NumericalError when every fit is excluded.
CurveExtraction extract_curve(const RabiMap& map, const FitOptions& options = {});

RabiTrace trace_of(const RabiMap& map, std::size_t amp_index);

}  // namespace rabical
