#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rabical/calibration.hpp"
#include "rabical/distortion.hpp"
#include "rabical/simcore.hpp"

namespace rabical {

struct ChannelConfig {
  // Short identifier used in artifact file names and plot columns ("q1").
  std::string id;
  SimulatedQubit qubit;
  double attenuation = 1.0;
  std::vector<double> amplitudes_mv;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  std::uint64_t shots = 1000;
  double epsilon = 0.01;
  // Explicit model-fit region; when absent the fractions below apply to each
  // channel's curve span.
  std::optional<AmplitudeInterval> fit_region_mv;
  double fit_low_fraction = kDefaultFitLowFraction;
  double fit_high_fraction = kDefaultFitHighFraction;
  DistortionProfile profile = DistortionProfile::identity();
  std::vector<double> durations_us;
  double sweep_duration_us = 0.4;
  std::vector<double> sweep_amplitudes_mv;
  double scope_noise_floor_mv = 2.0;
  std::vector<ChannelConfig> channels;
  std::filesystem::path output_dir = "rabical_out";

  void validate() const;
};

// Defaults mirroring the reference experiment: paper_like profile, qubit1
// on 0-500 mV in 2 mV steps, qubit2 on 25-498 mV in 1.8 mV steps, durations
// 0-2 us in 10 ns steps, 1000 shots.
PipelineConfig default_config(std::uint64_t seed);

// Parses a structured config. Unspecified fields take default_config()
// values, except "seed" which is mandatory. A run manifest (an object with a
// "config" member) is accepted in place of a config. Throws ConfigError.
PipelineConfig parse_config(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

// Fully expanded form; parse_config(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const PipelineConfig& config);

std::string config_hash(const PipelineConfig& config);

}  // namespace rabical
