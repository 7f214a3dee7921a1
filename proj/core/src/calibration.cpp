#include "rabical/calibration.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "rabical/error.hpp"

namespace rabical {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_curve(const RabiFrequencyCurve& curve) {
  curve.validate();
  if (curve.size() == 0) {
    throw std::invalid_argument("curve is empty");
  }
}

// Index i of the segment [A_i, A_{i+1}] containing a (a inside the domain).
std::size_t segment_of(const std::vector<double>& xs, double a) {
  auto it = std::upper_bound(xs.begin(), xs.end(), a);
  std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  return std::min(i, xs.size() - 2);
}

double lerp_at(const std::vector<double>& xs, const std::vector<double>& ys, double a) {
  if (xs.size() == 1) return ys.front();
  const std::size_t i = segment_of(xs, a);
  if (a == xs[i]) return ys[i];
  if (a == xs[i + 1]) return ys[i + 1];
  const double t = (a - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + t * (ys[i + 1] - ys[i]);
}

std::pair<double, double> omega_range(const RabiFrequencyCurve& curve) {
  const auto [lo, hi] = std::minmax_element(curve.omegas.begin(), curve.omegas.end());
  return {*lo, *hi};
}

// Slope of the interpolated curve around a, averaged over one knot spacing.
double local_slope(const RabiFrequencyCurve& curve, double a) {
  const auto& xs = curve.amplitudes_mv;
  if (xs.size() < 2) return 0.0;
  const std::size_t i = segment_of(xs, a);
  const double h = xs[i + 1] - xs[i];
  const double left = std::max(xs.front(), a - 0.5 * h);
  const double right = std::min(xs.back(), a + 0.5 * h);
  if (!(right > left)) return 0.0;
  return (interpolate_curve(curve, right) - interpolate_curve(curve, left)) / (right - left);
}

}  // namespace

double interpolate_curve(const RabiFrequencyCurve& curve, double a_mv) {
  require_curve(curve);
  if (!(a_mv >= curve.amplitudes_mv.front() && a_mv <= curve.amplitudes_mv.back())) {
    throw std::out_of_range(fmt::format(
        "amplitude {} mV outside curve range [{}, {}]", a_mv,
        curve.amplitudes_mv.front(), curve.amplitudes_mv.back()));
  }
  return lerp_at(curve.amplitudes_mv, curve.omegas, a_mv);
}

double interpolate_stderr(const RabiFrequencyCurve& curve, double a_mv) {
  require_curve(curve);
  if (!(a_mv >= curve.amplitudes_mv.front() && a_mv <= curve.amplitudes_mv.back())) {
    throw std::out_of_range(fmt::format("amplitude {} mV outside curve range", a_mv));
  }
  return lerp_at(curve.amplitudes_mv, curve.stderrs, a_mv);
}

AmplitudeInterval default_fit_region(const RabiFrequencyCurve& curve) {
  require_curve(curve);
  const double lo = curve.amplitudes_mv.front();
  const double span = curve.amplitudes_mv.back() - lo;
  return {lo + kDefaultFitLowFraction * span, lo + kDefaultFitHighFraction * span};
}

LinearModel fit_linear_model(const RabiFrequencyCurve& curve,
                             std::optional<AmplitudeInterval> region) {
  require_curve(curve);
  const AmplitudeInterval r = region.value_or(default_fit_region(curve));
  if (!(r.high_mv >= r.low_mv)) {
    throw std::invalid_argument("model fit region is inverted");
  }
  double saa = 0.0, sao = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double a = curve.amplitudes_mv[i];
    if (a < r.low_mv || a > r.high_mv || a <= 0.0) continue;
    const double se = std::max(curve.stderrs[i], 1e-12 * curve.omegas[i] + 1e-300);
    const double w = 1.0 / (se * se);
    saa += w * a * a;
    sao += w * a * curve.omegas[i];
    ++used;
  }
  if (used < kMinModelPoints) {
    throw std::invalid_argument(fmt::format(
        "model fit region [{}, {}] mV holds {} curve points (need {})", r.low_mv,
        r.high_mv, used, kMinModelPoints));
  }
  LinearModel m;
  m.slope = sao / saa;
  m.slope_stderr = 1.0 / std::sqrt(saa);
  m.fit_region = r;
  if (!(m.slope > 0.0)) {
    throw std::invalid_argument("fitted model slope is not positive");
  }
  return m;
}

double invert_amplitude(const RabiFrequencyCurve& curve, double target_omega) {
  require_curve(curve);
  const auto [lo, hi] = omega_range(curve);
  if (!(target_omega >= lo && target_omega <= hi)) {
    throw std::out_of_range(fmt::format(
        "target omega {} outside achievable range [{}, {}]", target_omega, lo, hi));
  }
  const auto& xs = curve.amplitudes_mv;
  const auto& ys = curve.omegas;
  if (curve.size() == 1) {
    return xs.front();
  }
  // On each segment the objective is a convex quadratic in A whose minimum
  // is zero wherever the segment spans the target; the first such segment
  // holds the smallest global minimizer.
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double y0 = ys[i];
    const double y1 = ys[i + 1];
    if (y0 == target_omega) return xs[i];
    if ((y0 < target_omega && target_omega <= y1) ||
        (y0 > target_omega && target_omega >= y1)) {
      if (y1 == target_omega) return xs[i + 1];
      const double t = (target_omega - y0) / (y1 - y0);
      return std::clamp(xs[i] + t * (xs[i + 1] - xs[i]), xs[i], xs[i + 1]);
    }
  }
  return xs.back();
}

ErrorBand error_band_around(const RabiFrequencyCurve& curve, double target_omega,
                            double epsilon, double center_mv) {
  require_curve(curve);
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("epsilon must be >= 0");
  }
  const auto& xs = curve.amplitudes_mv;
  const auto& ys = curve.omegas;
  const double band_lo = target_omega * (1.0 - epsilon);
  const double band_hi = target_omega * (1.0 + epsilon);
  const double slack = 1e-12 * std::abs(target_omega);
  const auto inside = [&](double y) { return y >= band_lo - slack && y <= band_hi + slack; };

  const double y_center = interpolate_curve(curve, center_mv);
  if (!inside(y_center)) {
    throw std::invalid_argument(fmt::format(
        "band center {} mV is outside the epsilon band of target {}", center_mv,
        target_omega));
  }
  // Position where the segment (xa, ya) -> (xb, yb) leaves the band.
  const auto exit_point = [&](double xa, double ya, double xb, double yb) {
    const double edge = yb > band_hi ? band_hi : band_lo;
    if (yb == ya) return xa;
    const double t = std::clamp((edge - ya) / (yb - ya), 0.0, 1.0);
    return xa + t * (xb - xa);
  };

  ErrorBand band;
  if (xs.size() == 1) {
    band.low_mv = band.high_mv = xs.front();
    band.degenerate = true;
    return band;
  }

  // Right walk.
  {
    double x = center_mv;
    double y = y_center;
    std::size_t j = static_cast<std::size_t>(
        std::upper_bound(xs.begin(), xs.end(), center_mv) - xs.begin());
    double edge = xs.back();
    for (; j < xs.size(); ++j) {
      if (!inside(ys[j])) {
        edge = exit_point(x, y, xs[j], ys[j]);
        break;
      }
      x = xs[j];
      y = ys[j];
    }
    band.high_mv = edge;
  }
  // Left walk.
  {
    double x = center_mv;
    double y = y_center;
    auto it = std::lower_bound(xs.begin(), xs.end(), center_mv);
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(it - xs.begin()) - 1;
    double edge = xs.front();
    for (; j >= 0; --j) {
      const auto k = static_cast<std::size_t>(j);
      if (!inside(ys[k])) {
        edge = exit_point(x, y, xs[k], ys[k]);
        break;
      }
      x = xs[k];
      y = ys[k];
    }
    band.low_mv = edge;
  }
  band.low_mv = std::min(band.low_mv, center_mv);
  band.high_mv = std::max(band.high_mv, center_mv);
  const double resolution = 1e-9 * std::max(1.0, std::abs(xs.back()));
  band.degenerate = (band.high_mv - band.low_mv) < resolution;
  return band;
}

ErrorBand error_band(const RabiFrequencyCurve& curve, double target_omega,
                     double epsilon) {
  require_curve(curve);
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("epsilon must be >= 0");
  }
  const auto [lo, hi] = omega_range(curve);
  const double t_lo = target_omega * (1.0 - epsilon);
  const double t_hi = target_omega * (1.0 + epsilon);
  if (!(t_lo >= lo && t_hi <= hi)) {
    throw std::out_of_range(fmt::format(
        "band [{}, {}] outside achievable omega range [{}, {}]", t_lo, t_hi, lo, hi));
  }
  return error_band_around(curve, target_omega, epsilon,
                           invert_amplitude(curve, target_omega));
}

CorrectionBuild build_correction(const RabiFrequencyCurve& curve,
                                 const LinearModel& model,
                                 const std::vector<double>& grid_mv, double epsilon) {
  require_curve(curve);
  if (!(model.slope > 0.0)) {
    throw std::invalid_argument("linear model slope must be > 0");
  }
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("epsilon must be >= 0");
  }
  const auto [lo, hi] = omega_range(curve);

  CorrectionBuild out;
  CorrectionTable& t = out.table;
  t.epsilon = epsilon;
  t.source_qubit = curve.qubit_label;
  t.model_slope = model.slope;
  t.fit_low_mv = model.fit_region.low_mv;
  t.fit_high_mv = model.fit_region.high_mv;
  t.source_checksum = curve_checksum(curve);

  for (const double a_c : grid_mv) {
    if (!(a_c > 0.0)) {
      out.excluded.push_back({a_c, "zero_amplitude"});
      continue;
    }
    const double target = model.omega(a_c);
    if (!(target >= lo && target <= hi)) {
      out.excluded.push_back({a_c, "target_outside_range"});
      continue;
    }
    if (!(target * (1.0 - epsilon) >= lo && target * (1.0 + epsilon) <= hi)) {
      out.excluded.push_back({a_c, "band_outside_range"});
      continue;
    }
    const double a_o = invert_amplitude(curve, target);
    const ErrorBand band = error_band_around(curve, target, epsilon, a_o);

    const double d_omega = local_slope(curve, a_o);
    const double se_omega = interpolate_stderr(curve, a_o);
    const double se_target = a_c * model.slope_stderr;
    const double se_vc = d_omega > 0.0
                             ? std::hypot(se_omega, se_target) / d_omega / a_c
                             : kInf;

    if (!t.amplitudes_mv.empty() && !(a_c > t.amplitudes_mv.back())) {
      throw std::invalid_argument("correction grid must be strictly increasing");
    }
    // The applied amplitude is stored as vc * A_c so that the pair is
    // exactly consistent; it may differ from a_o by an ulp.
    const double vc = a_o / a_c;
    const double applied = vc * a_c;
    t.amplitudes_mv.push_back(a_c);
    t.applied_mv.push_back(applied);
    t.vc_factors.push_back(vc);
    t.band_low_mv.push_back(std::min(band.low_mv, applied));
    t.band_high_mv.push_back(std::max(band.high_mv, applied));
    t.vc_stderr.push_back(se_vc);
  }
  if (t.size() == 0) {
    throw NumericalError("no grid amplitude admits a correction");
  }
  return out;
}

double band_overlap(const CorrectionTable& a, const CorrectionTable& b) {
  a.validate();
  b.validate();
  const double lo = std::max(a.min_amplitude(), b.min_amplitude());
  const double hi = std::min(a.max_amplitude(), b.max_amplitude());
  if (lo > hi) {
    throw std::invalid_argument("correction tables have disjoint amplitude domains");
  }
  std::size_t common = 0;
  std::size_t overlapping = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.amplitudes_mv[i];
    if (x < lo || x > hi) continue;
    const double b_low = lerp_at(b.amplitudes_mv, b.band_low_mv, x);
    const double b_high = lerp_at(b.amplitudes_mv, b.band_high_mv, x);
    ++common;
    if (std::max(a.band_low_mv[i], b_low) <= std::min(a.band_high_mv[i], b_high)) {
      ++overlapping;
    }
  }
  if (common == 0) {
    throw std::invalid_argument("correction tables share no common grid amplitude");
  }
  return static_cast<double>(overlapping) / static_cast<double>(common);
}

std::vector<PercentErrorPoint> percent_error_report(const RabiFrequencyCurve& curve,
                                                    const LinearModel& model) {
  require_curve(curve);
  if (!(model.slope > 0.0)) {
    throw std::invalid_argument("linear model slope must be > 0");
  }
  std::vector<PercentErrorPoint> report;
  report.reserve(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double a = curve.amplitudes_mv[i];
    if (a <= 0.0) continue;
    const double expected = model.omega(a);
    report.push_back({a, curve.omegas[i],
                      100.0 * std::abs(curve.omegas[i] - expected) / expected,
                      100.0 * curve.stderrs[i] / expected});
  }
  return report;
}

ErrorSummary summarize_errors(const std::vector<PercentErrorPoint>& report,
                              double omega_cutoff, double threshold_percent) {
  ErrorSummary s;
  for (const auto& p : report) {
    if (p.omega < omega_cutoff) continue;
    ++s.kept;
    if (p.percent_error > threshold_percent) ++s.exceedances;
    if (p.percent_error > s.max_percent) {
      s.max_percent = p.percent_error;
      s.max_at_mv = p.amplitude_mv;
    }
  }
  return s;
}

std::uint64_t curve_checksum(const RabiFrequencyCurve& curve) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix_byte = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  const auto mix_double = [&](double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) mix_byte(static_cast<unsigned char>(bits >> (8 * k)));
  };
  for (const char c : curve.qubit_label) mix_byte(static_cast<unsigned char>(c));
  for (std::size_t i = 0; i < curve.size(); ++i) {
    mix_double(curve.amplitudes_mv[i]);
    mix_double(curve.omegas[i]);
    mix_double(curve.stderrs[i]);
  }
  return h;
}

}  // namespace rabical
