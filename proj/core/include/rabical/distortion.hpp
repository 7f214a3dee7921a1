#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace rabical {

// Localized Gaussian gain deviation: depth * exp(-(a - center)^2 / (2 width^2)).
struct GainFeature {
  double center_mv = 0.0;
  double width_mv = 1.0;
  double depth = 0.0;

  bool operator==(const GainFeature&) const = default;
};

// Amplitude-dependent scale factor of the signal generator:
//   gain(a) = baseline_gain * (1 + sum_k feature_k(a)),  a in [0, max_amplitude_mv].
// The profile depends on amplitude only; it carries no frequency dependence.
class DistortionProfile {
 public:
  DistortionProfile() = default;
  // Throws std::invalid_argument if gain(a) <= 0 anywhere on the domain or a
  // parameter is non-finite.
  DistortionProfile(double baseline_gain, std::vector<GainFeature> features,
                    double max_amplitude_mv);

  static DistortionProfile identity(double max_amplitude_mv = 500.0);

  double baseline_gain() const { return baseline_gain_; }
  const std::vector<GainFeature>& features() const { return features_; }
  double max_amplitude_mv() const { return max_amplitude_mv_; }

  double gain(double a_mv) const;

  // Upper bound on |d/da (a * gain(a))| over the domain.
  double lipschitz_bound() const;

  bool operator==(const DistortionProfile&) const = default;

 private:
  double baseline_gain_ = 1.0;
  std::vector<GainFeature> features_;
  double max_amplitude_mv_ = 500.0;
};

// a_c * gain(a_c). Throws std::out_of_range outside [0, max_amplitude_mv].
double apply_distortion(const DistortionProfile& profile, double a_c_mv);

// "identity" or "paper_like". Unknown names throw std::invalid_argument whose
// message lists the valid names.
DistortionProfile preset_profile(std::string_view name);
std::vector<std::string> preset_profile_names();

// Room-temperature amplitude sensor: effective amplitude plus zero-mean
// Gaussian noise of standard deviation noise_floor_mv, deterministic per seed.
double scope_measure(double effective_amplitude_mv, double noise_floor_mv,
                     std::uint64_t seed);

void to_json(nlohmann::json& j, const GainFeature& f);
void from_json(const nlohmann::json& j, GainFeature& f);
void to_json(nlohmann::json& j, const DistortionProfile& p);
void from_json(const nlohmann::json& j, DistortionProfile& p);

}  // namespace rabical
