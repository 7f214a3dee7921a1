#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rabical/correction_table.hpp"
#include "rabical/fitting.hpp"

namespace rabical {

struct AmplitudeInterval {
  double low_mv = 0.0;
  double high_mv = 0.0;
};

// Proportional model Omega_m(A) = slope * A (zero intercept).
struct LinearModel {
  double slope = 0.0;
  double slope_stderr = 0.0;
  AmplitudeInterval fit_region;

  double omega(double a_mv) const { return slope * a_mv; }
};

// Default model-fit region as fractions of the curve's amplitude span.
inline constexpr double kDefaultFitLowFraction = 0.65;
inline constexpr double kDefaultFitHighFraction = 0.95;
inline constexpr std::size_t kMinModelPoints = 10;

// Piecewise-linear interpolation, exact at knots. Throws std::out_of_range
// outside [min, max] of the curve amplitudes.
double interpolate_curve(const RabiFrequencyCurve& curve, double a_mv);

// Linear interpolation of the curve's stderr column.
double interpolate_stderr(const RabiFrequencyCurve& curve, double a_mv);

AmplitudeInterval default_fit_region(const RabiFrequencyCurve& curve);

// Through-origin weighted least squares, weights 1 / stderr^2. Throws
// std::invalid_argument when fewer than kMinModelPoints points fall inside
// the region.
LinearModel fit_linear_model(const RabiFrequencyCurve& curve,
                             std::optional<AmplitudeInterval> region = std::nullopt);

// argmin over the interpolated curve of (Omega_e(A) - target)^2, scanning
// every segment; the smallest minimizer wins ties. Throws std::out_of_range
// when target is outside [min, max] of the curve omegas.
double invert_amplitude(const RabiFrequencyCurve& curve, double target_omega);

struct ErrorBand {
  double low_mv = 0.0;
  double high_mv = 0.0;
  // Width below the curve's amplitude resolution (minimum knot spacing).
  bool degenerate = false;
};

// Connected interval around `center_mv` in which
// |Omega_e(A) - target| <= epsilon * target, found by walking outward along
// the interpolated curve. `center_mv` must lie inside the band.
ErrorBand error_band_around(const RabiFrequencyCurve& curve, double target_omega,
                            double epsilon, double center_mv);

// Band around invert_amplitude(curve, target). Throws std::out_of_range when
// (1 +- epsilon) * target is not within the curve's omega range.
ErrorBand error_band(const RabiFrequencyCurve& curve, double target_omega,
                     double epsilon);

struct ExcludedGridPoint {
  double amplitude_mv = 0.0;
  std::string reason;
};

struct CorrectionBuild {
  CorrectionTable table;
  std::vector<ExcludedGridPoint> excluded;
};

// Steps: target = slope * A_c, A_o = invert_amplitude(target),
// VC = A_o / A_c, band from error_band. Grid points whose targets (or their
// +-epsilon bands) fall outside the curve's range are excluded and reported.
// Throws NumericalError if no grid point is usable.
CorrectionBuild build_correction(const RabiFrequencyCurve& curve,
                                 const LinearModel& model,
                                 const std::vector<double>& grid_mv,
                                 double epsilon = 0.01);

// Fraction of the common amplitude sub-grid (table_a's amplitudes inside both
// domains) where the two bands intersect; table_b's band edges are linearly
// interpolated. Throws std::invalid_argument for disjoint domains.
double band_overlap(const CorrectionTable& table_a, const CorrectionTable& table_b);

struct PercentErrorPoint {
  double amplitude_mv = 0.0;
  double omega = 0.0;
  double percent_error = 0.0;
  // One-sigma uncertainty of percent_error from the curve stderr.
  double percent_stderr = 0.0;
};

// 100 * |Omega_e(A) - slope * A| / (slope * A) per curve point; A = 0 is
// skipped.
std::vector<PercentErrorPoint> percent_error_report(const RabiFrequencyCurve& curve,
                                                    const LinearModel& model);

struct ErrorSummary {
  std::size_t kept = 0;
  std::size_t exceedances = 0;
  double max_percent = 0.0;
  double max_at_mv = 0.0;
};

// Restricts a report to points whose fitted omega is >= omega_cutoff and
// counts points above threshold_percent.
ErrorSummary summarize_errors(const std::vector<PercentErrorPoint>& report,
                              double omega_cutoff, double threshold_percent);

// FNV-1a over the curve's binary contents; recorded in table headers.
std::uint64_t curve_checksum(const RabiFrequencyCurve& curve);

}  // namespace rabical
