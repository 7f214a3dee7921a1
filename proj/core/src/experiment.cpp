#include "rabical/experiment.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace rabical {
namespace {

void require_increasing(const std::vector<double>& xs, const char* what) {
  if (xs.empty()) {
    throw std::invalid_argument(fmt::format("{} axis is empty", what));
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || xs[i] < 0.0) {
      throw std::invalid_argument(
          fmt::format("{} axis value {} is negative or non-finite", what, xs[i]));
    }
    if (i > 0 && !(xs[i] > xs[i - 1])) {
      throw std::invalid_argument(
          fmt::format("{} axis is not strictly increasing at index {}", what, i));
    }
  }
}

enum class Sampling { kShots, kExact };

RabiMap simulate(const ChannelModel& channel, const SweepGrid& grid,
                 const CorrectionTable* correction, Sampling sampling) {
  channel.validate();
  grid.validate();
  if (correction != nullptr) {
    for (const double a : grid.amplitudes_mv) {
      if (!correction->covers(a)) {
        throw std::invalid_argument(fmt::format(
            "correction table domain [{}, {}] mV does not cover {} mV",
            correction->min_amplitude(), correction->max_amplitude(), a));
      }
    }
  }

  RabiMap map;
  map.grid = grid;
  map.qubit_label = channel.qubit.label;
  map.corrected = correction != nullptr;
  map.p_estimates.resize(grid.amplitudes_mv.size() * grid.durations_us.size());

  std::size_t k = 0;
  for (const double a_c : grid.amplitudes_mv) {
    const double applied = correction ? apply_correction(*correction, a_c) : a_c;
    const double omega = channel.rabi_frequency(applied);
    for (const double tau : grid.durations_us) {
      const Probability p = decayed_excited_probability(omega, tau, channel.qubit);
      map.p_estimates[k++] =
          sampling == Sampling::kExact
              ? p.value()
              : sample_shots(p, grid.shots, grid_point_seed(grid.seed, a_c, tau))
                    .value();
    }
  }
  return map;
}

}  // namespace

void SweepGrid::validate() const {
  require_increasing(amplitudes_mv, "amplitude");
  require_increasing(durations_us, "duration");
  if (shots == 0) {
    throw std::invalid_argument("shots must be >= 1");
  }
}

std::vector<double> arithmetic_axis(double start, double stop, double step) {
  if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop) ||
      !std::isfinite(step)) {
    throw std::invalid_argument("axis needs finite start/stop and step > 0");
  }
  if (stop < start) {
    throw std::invalid_argument("axis stop is below start");
  }
  std::vector<double> axis;
  const double tol = step * 1e-9;
  for (std::size_t k = 0;; ++k) {
    const double v = start + static_cast<double>(k) * step;
    if (v > stop + tol) break;
    axis.push_back(v);
  }
  return axis;
}

void ChannelModel::validate() const {
  qubit.validate();
  if (!(attenuation > 0.0) || !std::isfinite(attenuation)) {
    throw std::invalid_argument("channel attenuation must be finite and > 0");
  }
}

double ChannelModel::rabi_frequency(double applied_mv) const {
  return qubit.rabi_rate_per_mv * attenuation * apply_distortion(profile, applied_mv);
}

std::vector<double> RabiMap::row(std::size_t amp_index) const {
  const auto first = p_estimates.begin() + static_cast<std::ptrdiff_t>(amp_index * cols());
  return {first, first + static_cast<std::ptrdiff_t>(cols())};
}

void RabiMap::validate() const {
  grid.validate();
  if (p_estimates.size() != rows() * cols()) {
    throw std::invalid_argument(fmt::format(
        "rabi map has {} entries, expected {} x {}", p_estimates.size(), rows(),
        cols()));
  }
  for (const double p : p_estimates) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument(fmt::format("rabi map entry {} outside [0, 1]", p));
    }
  }
}

std::uint64_t grid_point_seed(std::uint64_t grid_seed, double amplitude_mv,
                              double duration_us) {
  return derive_seed(grid_seed, {seed_key(amplitude_mv), seed_key(duration_us)});
}

RabiMap run_rabi_map(const ChannelModel& channel, const SweepGrid& grid) {
  return simulate(channel, grid, nullptr, Sampling::kShots);
}

RabiMap run_rabi_map(const ChannelModel& channel, const SweepGrid& grid,
                     const CorrectionTable& correction) {
  return simulate(channel, grid, &correction, Sampling::kShots);
}

RabiMap noiseless_rabi_map(const ChannelModel& channel, const SweepGrid& grid) {
  return simulate(channel, grid, nullptr, Sampling::kExact);
}

RabiMap noiseless_rabi_map(const ChannelModel& channel, const SweepGrid& grid,
                           const CorrectionTable& correction) {
  return simulate(channel, grid, &correction, Sampling::kExact);
}

RabiMap run_amplitude_sweep(const ChannelModel& channel,
                            std::vector<double> amplitudes_mv,
                            double fixed_duration_us, std::uint64_t shots,
                            std::uint64_t seed) {
  if (!(fixed_duration_us > 0.0)) {
    throw std::invalid_argument("amplitude sweep duration must be > 0");
  }
  SweepGrid grid{std::move(amplitudes_mv), {fixed_duration_us}, shots, seed};
  return run_rabi_map(channel, grid);
}

}  // namespace rabical
