#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rabical/correction_table.hpp"
#include "rabical/distortion.hpp"
#include "rabical/simcore.hpp"

namespace rabical {

struct SweepGrid {
  std::vector<double> amplitudes_mv;
  std::vector<double> durations_us;
  std::uint64_t shots = 1000;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument for empty or non-increasing axes, negative
  // coordinates, or shots == 0.
  void validate() const;
};

// start, start + step, ... up to stop (inclusive within step * 1e-9).
// Values are computed as start + k * step, not by accumulation.
std::vector<double> arithmetic_axis(double start, double stop, double step);

struct ChannelModel {
  SimulatedQubit qubit;
  DistortionProfile profile;
  // Line attenuation applied after the generator distortion.
  double attenuation = 1.0;

  void validate() const;

  // Rabi angular frequency induced by commanding `applied_mv` on this line.
  double rabi_frequency(double applied_mv) const;
};

// Excited-state estimates on an amplitude x duration grid, row-major by
// amplitude.
struct RabiMap {
  SweepGrid grid;
  std::vector<double> p_estimates;
  std::string qubit_label;
  bool corrected = false;

  std::size_t rows() const { return grid.amplitudes_mv.size(); }
  std::size_t cols() const { return grid.durations_us.size(); }
  double at(std::size_t amp_index, std::size_t dur_index) const {
    return p_estimates[amp_index * cols() + dur_index];
  }
  std::vector<double> row(std::size_t amp_index) const;

  void validate() const;
};

// Per-point seed; keyed by coordinate values so that any sub-grid reproduces
// the same samples.
std::uint64_t grid_point_seed(std::uint64_t grid_seed, double amplitude_mv,
                              double duration_us);

// Shot-sampled Rabi map. With a correction table, each commanded A_c is first
// mapped through apply_correction; the table must cover every amplitude.
RabiMap run_rabi_map(const ChannelModel& channel, const SweepGrid& grid);
RabiMap run_rabi_map(const ChannelModel& channel, const SweepGrid& grid,
                     const CorrectionTable& correction);

// Same grid evaluated without shot noise (exact probabilities). grid.shots is
// retained so downstream fits weight points as if sampled.
RabiMap noiseless_rabi_map(const ChannelModel& channel, const SweepGrid& grid);
RabiMap noiseless_rabi_map(const ChannelModel& channel, const SweepGrid& grid,
                           const CorrectionTable& correction);

// Single-duration amplitude sweep.
RabiMap run_amplitude_sweep(const ChannelModel& channel,
                            std::vector<double> amplitudes_mv,
                            double fixed_duration_us, std::uint64_t shots,
                            std::uint64_t seed);

}  // namespace rabical
