#include "rabical/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "rabical/columnar.hpp"
#include "rabical/error.hpp"
#include "rabical/experiment.hpp"

namespace rabical {
namespace {

using nlohmann::json;

std::vector<double> parse_axis(const json& j, const char* what) {
  if (j.is_array()) {
    return j.get<std::vector<double>>();
  }
  if (j.is_object()) {
    return arithmetic_axis(j.at("start").get<double>(), j.at("stop").get<double>(),
                           j.at("step").get<double>());
  }
  throw ConfigError(fmt::format("{} must be a list or {{start, stop, step}}", what));
}

SimulatedQubit parse_qubit(const json& j) {
  if (j.is_string()) {
    return qubit_preset(j.get<std::string>());
  }
  SimulatedQubit q;
  q.label = j.at("label").get<std::string>();
  q.transition_freq_ghz = j.at("transition_freq_ghz").get<double>();
  q.t1_us = j.contains("t1_us") && j.at("t1_us").is_string() &&
                    j.at("t1_us").get<std::string>() == "inf"
                ? std::numeric_limits<double>::infinity()
                : j.at("t1_us").get<double>();
  q.rabi_rate_per_mv = j.at("rabi_rate_per_mv").get<double>();
  q.validate();
  return q;
}

json qubit_to_json(const SimulatedQubit& q) {
  json t1 = std::isinf(q.t1_us) ? json("inf") : json(q.t1_us);
  return json{{"label", q.label},
              {"transition_freq_ghz", q.transition_freq_ghz},
              {"t1_us", t1},
              {"rabi_rate_per_mv", q.rabi_rate_per_mv}};
}

}  // namespace

void PipelineConfig::validate() const {
  if (shots == 0) throw ConfigError("shots must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in (0, 1)");
  if (!(fit_low_fraction >= 0.0 && fit_high_fraction <= 1.0 &&
        fit_low_fraction < fit_high_fraction)) {
    throw ConfigError("fit region fractions must satisfy 0 <= low < high <= 1");
  }
  if (fit_region_mv && !(fit_region_mv->low_mv < fit_region_mv->high_mv)) {
    throw ConfigError("fit_region_mv must satisfy low < high");
  }
  if (channels.empty()) throw ConfigError("at least one channel is required");
  if (durations_us.size() < 8) throw ConfigError("durations need at least 8 points");
  if (!(sweep_duration_us > 0.0)) throw ConfigError("sweep duration must be > 0");
  if (!(scope_noise_floor_mv >= 0.0)) throw ConfigError("scope noise floor must be >= 0");
  if (output_dir.empty()) throw ConfigError("output_dir must be set");
  double max_dt = 0.0;
  for (std::size_t i = 1; i < durations_us.size(); ++i) {
    max_dt = std::max(max_dt, durations_us[i] - durations_us[i - 1]);
  }
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const auto& ch = channels[i];
    if (ch.id.empty() || ch.id.find_first_of("/\\, ") != std::string::npos) {
      throw ConfigError(fmt::format("channel id '{}' is empty or not file-safe", ch.id));
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (channels[k].id == ch.id) {
        throw ConfigError(fmt::format("duplicate channel id '{}'", ch.id));
      }
    }
    try {
      ChannelModel{ch.qubit, profile, ch.attenuation}.validate();
      SweepGrid{ch.amplitudes_mv, durations_us, shots, seed}.validate();
      SweepGrid{sweep_amplitudes_mv, {sweep_duration_us}, shots, seed}.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("channel '{}': {}", ch.id, e.what()));
    }
    if (ch.amplitudes_mv.back() > profile.max_amplitude_mv()) {
      throw ConfigError(fmt::format("channel '{}' sweeps beyond the generator range",
                                    ch.id));
    }
    // Oscillations faster than the duration sampling alias onto lower
    // frequencies and would silently corrupt the curve.
    const ChannelModel model{ch.qubit, profile, ch.attenuation};
    double omega_max = 0.0;
    for (const double a : ch.amplitudes_mv) omega_max = std::max(omega_max, model.rabi_frequency(a));
    if (omega_max * max_dt >= std::numbers::pi) {
      throw ConfigError(fmt::format(
          "channel '{}': peak Rabi frequency {:.4g} rad/us is above the Nyquist limit "
          "{:.4g} rad/us of the duration grid",
          ch.id, omega_max, std::numbers::pi / max_dt));
    }
  }
  if (!sweep_amplitudes_mv.empty() &&
      sweep_amplitudes_mv.back() > profile.max_amplitude_mv()) {
    throw ConfigError("amplitude sweep exceeds the generator range");
  }
}

PipelineConfig default_config(std::uint64_t seed) {
  PipelineConfig c;
  c.seed = seed;
  c.profile = preset_profile("paper_like");
  c.durations_us = arithmetic_axis(0.0, 2.0, 0.01);
  c.sweep_amplitudes_mv = arithmetic_axis(0.0, 200.0, 1.0);
  c.channels = {
      {"q1", qubit_preset("qubit1"), 1.0, arithmetic_axis(0.0, 500.0, 2.0)},
      {"q2", qubit_preset("qubit2"), 0.8, arithmetic_axis(25.0, 498.0, 1.8)},
  };
  return c;
}

PipelineConfig parse_config(const json& root) {
  try {
    const json& j = root.is_object() && root.contains("config") ? root.at("config") : root;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("seed")) throw ConfigError("config requires an explicit 'seed'");

    PipelineConfig c = default_config(j.at("seed").get<std::uint64_t>());
    if (j.contains("shots")) c.shots = j.at("shots").get<std::uint64_t>();
    if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
    if (j.contains("fit_region_mv")) {
      const auto r = j.at("fit_region_mv").get<std::vector<double>>();
      if (r.size() != 2) throw ConfigError("fit_region_mv needs [low, high]");
      c.fit_region_mv = AmplitudeInterval{r[0], r[1]};
    }
    if (j.contains("fit_region_fraction")) {
      const auto r = j.at("fit_region_fraction").get<std::vector<double>>();
      if (r.size() != 2) throw ConfigError("fit_region_fraction needs [low, high]");
      c.fit_low_fraction = r[0];
      c.fit_high_fraction = r[1];
    }
    if (j.contains("profile")) {
      const json& p = j.at("profile");
      c.profile = p.is_string() ? preset_profile(p.get<std::string>())
                                : p.get<DistortionProfile>();
    }
    if (j.contains("durations_us")) c.durations_us = parse_axis(j.at("durations_us"), "durations_us");
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      if (s.contains("duration_us")) c.sweep_duration_us = s.at("duration_us").get<double>();
      if (s.contains("amplitudes_mv")) {
        c.sweep_amplitudes_mv = parse_axis(s.at("amplitudes_mv"), "sweep.amplitudes_mv");
      }
    }
    if (j.contains("scope_noise_floor_mv")) {
      c.scope_noise_floor_mv = j.at("scope_noise_floor_mv").get<double>();
    }
    if (j.contains("channels")) {
      c.channels.clear();
      for (const json& ch : j.at("channels")) {
        ChannelConfig cc;
        cc.qubit = parse_qubit(ch.at("qubit"));
        cc.id = ch.value("id", fmt::format("q{}", c.channels.size() + 1));
        cc.attenuation = ch.value("attenuation", 1.0);
        cc.amplitudes_mv = parse_axis(ch.at("amplitudes_mv"), "channel amplitudes_mv");
        c.channels.push_back(std::move(cc));
      }
    }
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    c.validate();
    return c;
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("malformed config: {}", e.what()));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  }
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot read config {}", path.string()));
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(j);
}

json config_to_json(const PipelineConfig& c) {
  json channels = json::array();
  for (const auto& ch : c.channels) {
    channels.push_back(json{{"id", ch.id},
                            {"qubit", qubit_to_json(ch.qubit)},
                            {"attenuation", ch.attenuation},
                            {"amplitudes_mv", ch.amplitudes_mv}});
  }
  json j{{"seed", c.seed},
         {"shots", c.shots},
         {"epsilon", c.epsilon},
         {"fit_region_fraction", {c.fit_low_fraction, c.fit_high_fraction}},
         {"profile", c.profile},
         {"durations_us", c.durations_us},
         {"sweep", {{"duration_us", c.sweep_duration_us},
                    {"amplitudes_mv", c.sweep_amplitudes_mv}}},
         {"scope_noise_floor_mv", c.scope_noise_floor_mv},
         {"channels", channels},
         {"output_dir", c.output_dir.string()}};
  if (c.fit_region_mv) {
    j["fit_region_mv"] = {c.fit_region_mv->low_mv, c.fit_region_mv->high_mv};
  }
  return j;
}

std::string config_hash(const PipelineConfig& config) {
  json j = config_to_json(config);
  // The output location does not affect any data artifact.
  j.erase("output_dir");
  return fnv1a_hex(j.dump());
}

}  // namespace rabical
