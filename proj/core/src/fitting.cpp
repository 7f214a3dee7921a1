#include "rabical/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "rabical/error.hpp"

namespace rabical {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Internal parameter order. The envelope is parameterized by its rate
// (1 / decay_time) so that a non-decaying envelope sits at 0 instead of at
// infinity.
enum Param { kOffset = 0, kContrast = 1, kRate = 2, kOmega = 3 };
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

struct Problem {
  const std::vector<double>& tau;
  const std::vector<double>& y;
  std::vector<double> inv_sigma;
};

Problem make_problem(const RabiTrace& trace) {
  Problem pb{trace.durations_us, trace.p_values, {}};
  pb.inv_sigma.reserve(trace.p_values.size());
  for (const double p : trace.p_values) {
    pb.inv_sigma.push_back(1.0 / binomial_sigma(p, trace.shots));
  }
  return pb;
}

double chi2(const Problem& pb, const Vec4& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pb.tau.size(); ++i) {
    const double t = pb.tau[i];
    const double m = x[kOffset] - x[kContrast] * std::exp(-x[kRate] * t) *
                                      std::cos(x[kOmega] * t);
    const double r = (pb.y[i] - m) * pb.inv_sigma[i];
    acc += r * r;
  }
  return acc;
}

// Normal-equation pieces for r_i = (y_i - m_i) / sigma_i.
void linearize(const Problem& pb, const Vec4& x, Mat4& jtj, Vec4& jtr) {
  jtj.setZero();
  jtr.setZero();
  for (std::size_t i = 0; i < pb.tau.size(); ++i) {
    const double t = pb.tau[i];
    const double env = std::exp(-x[kRate] * t);
    const double c = std::cos(x[kOmega] * t);
    const double s = std::sin(x[kOmega] * t);
    const double w = pb.inv_sigma[i];
    const double m = x[kOffset] - x[kContrast] * env * c;
    const double r = (pb.y[i] - m) * w;
    // dr/dx = -dm/dx * w
    Vec4 g;
    g[kOffset] = -w;
    g[kContrast] = env * c * w;
    g[kRate] = -x[kContrast] * t * env * c * w;
    g[kOmega] = -x[kContrast] * t * env * s * w;
    jtj.noalias() += g * g.transpose();
    jtr.noalias() += g * r;
  }
}

// Best (offset, contrast) for fixed rate and omega by weighted linear least
// squares; returns the resulting chi2.
double profiled_chi2(const Problem& pb, double rate, double omega,
                     double* offset, double* contrast) {
  double s00 = 0, s01 = 0, s11 = 0, b0 = 0, b1 = 0;
  for (std::size_t i = 0; i < pb.tau.size(); ++i) {
    const double t = pb.tau[i];
    const double w2 = pb.inv_sigma[i] * pb.inv_sigma[i];
    const double f = -std::exp(-rate * t) * std::cos(omega * t);
    s00 += w2;
    s01 += w2 * f;
    s11 += w2 * f * f;
    b0 += w2 * pb.y[i];
    b1 += w2 * f * pb.y[i];
  }
  const double det = s00 * s11 - s01 * s01;
  double o, c;
  if (std::abs(det) <= 1e-14 * s00 * s11) {
    o = b0 / s00;
    c = 0.0;
  } else {
    o = (b0 * s11 - b1 * s01) / det;
    c = (s00 * b1 - s01 * b0) / det;
  }
  *offset = o;
  *contrast = c;
  return chi2(pb, Vec4(o, c, rate, omega));
}

bool uniformly_spaced(const std::vector<double>& tau) {
  const double mean_dt = (tau.back() - tau.front()) / static_cast<double>(tau.size() - 1);
  for (std::size_t i = 1; i < tau.size(); ++i) {
    if (std::abs((tau[i] - tau[i - 1]) - mean_dt) > 1e-6 * mean_dt) return false;
  }
  return true;
}

// Inverse of J^T J with Jacobi scaling; empty optional-like flag on
// degeneracy.
bool covariance(const Mat4& jtj, Mat4& cov) {
  Vec4 d = jtj.diagonal();
  for (int i = 0; i < 4; ++i) {
    if (!(d[i] > 0.0) || !std::isfinite(d[i])) return false;
  }
  const Vec4 inv_sqrt = d.cwiseSqrt().cwiseInverse();
  const Mat4 scaled = inv_sqrt.asDiagonal() * jtj * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat4> eig(scaled);
  if (eig.info() != Eigen::Success) return false;
  const Vec4 ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff())) return false;
  const Mat4 scaled_inv =
      eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  cov = inv_sqrt.asDiagonal() * scaled_inv * inv_sqrt.asDiagonal();
  return true;
}

}  // namespace

void RabiTrace::validate() const {
  if (durations_us.size() != p_values.size()) {
    throw std::invalid_argument("trace durations and values differ in length");
  }
  if (durations_us.size() < 8) {
    throw std::invalid_argument(
        fmt::format("trace needs at least 8 points (got {})", durations_us.size()));
  }
  if (shots == 0) {
    throw std::invalid_argument("trace shots must be >= 1");
  }
  for (std::size_t i = 0; i < durations_us.size(); ++i) {
    if (i > 0 && !(durations_us[i] > durations_us[i - 1])) {
      throw std::invalid_argument("trace durations not strictly increasing");
    }
    if (!std::isfinite(p_values[i])) {
      throw std::invalid_argument("trace contains a non-finite value");
    }
  }
}

void RabiFrequencyCurve::validate() const {
  const auto n = amplitudes_mv.size();
  if (omegas.size() != n || stderrs.size() != n) {
    throw std::invalid_argument("curve columns differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(amplitudes_mv[i] > amplitudes_mv[i - 1])) {
      throw std::invalid_argument("curve amplitudes not strictly increasing");
    }
    if (!(omegas[i] >= 0.0) || !(stderrs[i] >= 0.0)) {
      throw std::invalid_argument("curve omegas and stderrs must be >= 0");
    }
  }
}

double binomial_sigma(double p, std::uint64_t shots) {
  const double lo = std::max(p, 0.01);
  const double hi = std::max(1.0 - p, 0.01);
  return std::sqrt(lo * hi / static_cast<double>(shots));
}

double initial_frequency_guess(const RabiTrace& trace) {
  trace.validate();
  const auto& tau = trace.durations_us;
  if (!uniformly_spaced(tau)) {
    throw std::invalid_argument("frequency guess requires uniformly spaced durations");
  }
  const std::size_t n = tau.size();
  const double mean =
      std::accumulate(trace.p_values.begin(), trace.p_values.end(), 0.0) /
      static_cast<double>(n);
  const double dt = (tau.back() - tau.front()) / static_cast<double>(n - 1);

  std::vector<double> magnitude(n / 2 + 1, 0.0);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = -kTwoPi * static_cast<double>(k * j % n) / static_cast<double>(n);
      acc += (trace.p_values[j] - mean) * std::polar(1.0, phase);
    }
    magnitude[k] = std::abs(acc);
  }
  const auto peak = std::max_element(magnitude.begin() + 1, magnitude.end());
  std::vector<double> bins(magnitude.begin() + 1, magnitude.end());
  std::nth_element(bins.begin(), bins.begin() + static_cast<std::ptrdiff_t>(bins.size() / 2),
                   bins.end());
  const double noise_floor = bins[bins.size() / 2];

  if (*peak <= 1e-9 * std::sqrt(static_cast<double>(n)) || *peak <= 4.0 * noise_floor) {
    return 0.0;
  }
  const auto k_peak = static_cast<double>(peak - magnitude.begin());
  return kTwoPi * k_peak / (static_cast<double>(n) * dt);
}

double fit_residual_norm(const RabiTrace& trace, double offset, double contrast,
                         double decay_time, double omega) {
  const Problem pb = make_problem(trace);
  const double rate = std::isinf(decay_time) ? 0.0 : 1.0 / decay_time;
  return std::sqrt(chi2(pb, Vec4(offset, contrast, rate, omega)));
}

FitResult fit_rabi_frequency(const RabiTrace& trace, const FitOptions& options) {
  trace.validate();
  const Problem pb = make_problem(trace);
  const auto& tau = trace.durations_us;
  const std::size_t n = tau.size();
  const double span = tau.back() - tau.front();
  const auto [pmin, pmax] = std::minmax_element(trace.p_values.begin(), trace.p_values.end());
  const double mean =
      std::accumulate(trace.p_values.begin(), trace.p_values.end(), 0.0) /
      static_cast<double>(n);

  // Seed: spectral guess, then a profiled scan within +-1.5 DFT bins (or a
  // coarse full-band scan when the durations are not uniform). The scan
  // includes the guess itself so the start is never worse than it.
  const double bin = kTwoPi / (static_cast<double>(n) * span / static_cast<double>(n - 1));
  double lo, hi, guess;
  std::size_t steps;
  if (uniformly_spaced(tau)) {
    guess = initial_frequency_guess(trace);
    lo = std::max(0.0, guess - 1.5 * bin);
    hi = guess + 1.5 * bin;
    steps = 60;
  } else {
    double min_dt = kInf;
    for (std::size_t i = 1; i < n; ++i) min_dt = std::min(min_dt, tau[i] - tau[i - 1]);
    guess = 0.0;
    lo = 0.0;
    hi = std::numbers::pi / min_dt;
    steps = static_cast<std::size_t>(std::ceil((hi - lo) / (0.25 * bin)));
  }
  const double rate0 = span > 0.0 ? 1.0 / span : 0.0;

  Vec4 x(mean, 0.5 * (*pmax - *pmin), rate0, guess);
  double best = chi2(pb, x);
  for (std::size_t s = 0; s <= steps + 1; ++s) {
    const double w = s <= steps ? lo + (hi - lo) * static_cast<double>(s) / static_cast<double>(steps)
                                : guess;
    double o, c;
    const double cost = profiled_chi2(pb, rate0, w, &o, &c);
    if (cost < best) {
      best = cost;
      x = Vec4(o, c, rate0, w);
    }
  }

  FitResult result;
  double cost = best;
  double lambda = 1e-3;
  bool done = false;
  Mat4 jtj;
  Vec4 jtr;
  int it = 0;
  for (; it < options.max_iterations && !done; ++it) {
    linearize(pb, x, jtj, jtr);
    const double grad = jtr.cwiseAbs().maxCoeff();
    if (cost <= 1e-28 || grad <= 1e-15 * std::max(1.0, std::sqrt(cost))) {
      done = true;
      break;
    }
    Vec4 damp = jtj.diagonal();
    const double dmax = std::max(damp.maxCoeff(), 1e-300);
    for (int i = 0; i < 4; ++i) damp[i] = std::max(damp[i], 1e-12 * dmax);

    bool accepted = false;
    while (!accepted) {
      Mat4 a = jtj;
      a.diagonal() += lambda * damp;
      const Vec4 step = a.ldlt().solve(-jtr);
      const Vec4 trial = x + step;
      const double trial_cost = step.allFinite() ? chi2(pb, trial) : kInf;
      if (trial_cost <= cost) {
        const double reduction = cost - trial_cost;
        bool small_step = true;
        for (int i = 0; i < 4; ++i) {
          if (std::abs(step[i]) > 1e-10 * (std::abs(x[i]) + 1e-10)) small_step = false;
        }
        x = trial;
        if ((reduction <= 1e-14 * cost && small_step) || reduction == 0.0) done = true;
        cost = trial_cost;
        lambda = std::max(lambda * 0.2, 1e-12);
        accepted = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e16) {
          // No step along any damped direction lowers the objective: the
          // current point is a minimum to working precision.
          done = true;
          break;
        }
      }
    }
  }
  result.iterations = it;

  linearize(pb, x, jtj, jtr);
  Mat4 cov;
  const bool well_posed = covariance(jtj, cov);
  result.omega = std::abs(x[kOmega]);
  result.omega_stderr = well_posed ? std::sqrt(std::max(cov(kOmega, kOmega), 0.0)) : kInf;
  result.decay_time = x[kRate] > 0.0 ? 1.0 / x[kRate] : kInf;
  result.contrast = x[kContrast];
  result.offset = x[kOffset];
  result.residual_norm = std::sqrt(cost);
  result.converged = done && well_posed && std::isfinite(result.residual_norm);
  return result;
}

RabiTrace trace_of(const RabiMap& map, std::size_t amp_index) {
  return RabiTrace{map.grid.durations_us, map.row(amp_index), map.grid.shots,
                   map.grid.amplitudes_mv[amp_index]};
}

CurveExtraction extract_curve(const RabiMap& map, const FitOptions& options) {
  map.validate();
  CurveExtraction out;
  out.curve.qubit_label = map.qubit_label;
  for (std::size_t i = 0; i < map.rows(); ++i) {
    const RabiTrace trace = trace_of(map, i);
    const FitResult fit = fit_rabi_frequency(trace, options);
    std::string reason;
    if (!fit.converged) {
      reason = "not_converged";
    } else if (!(fit.omega > 0.0) || !(fit.omega_stderr <= kMaxRelativeStderr * fit.omega)) {
      reason = "low_quality";
    }
    if (reason.empty()) {
      out.curve.amplitudes_mv.push_back(trace.amplitude_mv);
      out.curve.omegas.push_back(fit.omega);
      out.curve.stderrs.push_back(fit.omega_stderr);
    } else {
      out.excluded.push_back({trace.amplitude_mv, fit, std::move(reason)});
    }
  }
  if (out.curve.size() == 0) {
    throw NumericalError(fmt::format(
        "all {} Rabi fits of map '{}' were excluded", map.rows(), map.qubit_label));
  }
  return out;
}

}  // namespace rabical
