#include "rabical/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rabical/simcore.hpp"

namespace rabical {

DistortionProfile::DistortionProfile(double baseline_gain,
                                     std::vector<GainFeature> features,
                                     double max_amplitude_mv)
    : baseline_gain_(baseline_gain),
      features_(std::move(features)),
      max_amplitude_mv_(max_amplitude_mv) {
  if (!(baseline_gain_ > 0.0) || !std::isfinite(baseline_gain_)) {
    throw std::invalid_argument("baseline_gain must be finite and > 0");
  }
  if (!(max_amplitude_mv_ > 0.0) || !std::isfinite(max_amplitude_mv_)) {
    throw std::invalid_argument("max_amplitude_mv must be finite and > 0");
  }
  double worst_dip = 0.0;
  for (const auto& f : features_) {
    if (!std::isfinite(f.center_mv) || !std::isfinite(f.depth) ||
        !(f.width_mv > 0.0) || !std::isfinite(f.width_mv)) {
      throw std::invalid_argument(fmt::format(
          "invalid gain feature (center={}, width={}, depth={})", f.center_mv,
          f.width_mv, f.depth));
    }
    worst_dip += std::min(f.depth, 0.0);
  }
  if (1.0 + worst_dip <= 0.0) {
    // Dips can overlap destructively; scan the domain.
    const double step = 0.01;
    for (double a = 0.0; a <= max_amplitude_mv_; a += step) {
      if (!(gain(a) > 0.0)) {
        throw std::invalid_argument(
            fmt::format("distortion gain is non-positive at {} mV", a));
      }
    }
    for (const auto& f : features_) {
      if (f.center_mv >= 0.0 && f.center_mv <= max_amplitude_mv_ &&
          !(gain(f.center_mv) > 0.0)) {
        throw std::invalid_argument(fmt::format(
            "distortion gain is non-positive at {} mV", f.center_mv));
      }
    }
  }
}

DistortionProfile DistortionProfile::identity(double max_amplitude_mv) {
  return DistortionProfile(1.0, {}, max_amplitude_mv);
}

double DistortionProfile::gain(double a_mv) const {
  double bump = 0.0;
  for (const auto& f : features_) {
    const double u = (a_mv - f.center_mv) / f.width_mv;
    bump += f.depth * std::exp(-0.5 * u * u);
  }
  return baseline_gain_ * (1.0 + bump);
}

double DistortionProfile::lipschitz_bound() const {
  // d/da [a g(a)] = g(a) + a g'(a), and |u exp(-u^2/2)| <= exp(-1/2).
  const double inv_sqrt_e = std::exp(-0.5);
  double sum = 1.0;
  for (const auto& f : features_) {
    sum += std::abs(f.depth) * (1.0 + max_amplitude_mv_ * inv_sqrt_e / f.width_mv);
  }
  return baseline_gain_ * sum;
}

double apply_distortion(const DistortionProfile& profile, double a_c_mv) {
  if (!(a_c_mv >= 0.0 && a_c_mv <= profile.max_amplitude_mv())) {
    throw std::out_of_range(fmt::format(
        "amplitude {} mV outside distortion domain [0, {}]", a_c_mv,
        profile.max_amplitude_mv()));
  }
  if (profile.features().empty() && profile.baseline_gain() == 1.0) {
    return a_c_mv;
  }
  return a_c_mv * profile.gain(a_c_mv);
}

DistortionProfile preset_profile(std::string_view name) {
  if (name == "identity") {
    return DistortionProfile::identity(500.0);
  }
  if (name == "paper_like") {
    // Dominant dip at 130 mV; 250 mV secondary; the 65 mV dip stays well
    // inside a 2 mV scope noise floor even after averaging 100 samples.
    return DistortionProfile(1.0,
                             {
                                 {65.0, 6.0, -0.002},
                                 {130.0, 15.0, -0.13},
                                 {250.0, 20.0, -0.04},
                             },
                             500.0);
  }
  std::string valid;
  for (const auto& n : preset_profile_names()) {
    valid += valid.empty() ? n : ", " + n;
  }
  throw std::invalid_argument(
      fmt::format("unknown distortion preset '{}' (valid: {})", name, valid));
}

std::vector<std::string> preset_profile_names() {
  return {"identity", "paper_like"};
}

double scope_measure(double effective_amplitude_mv, double noise_floor_mv,
                     std::uint64_t seed) {
  if (!(effective_amplitude_mv >= 0.0)) {
    throw std::invalid_argument("effective amplitude must be >= 0");
  }
  if (!(noise_floor_mv >= 0.0)) {
    throw std::invalid_argument("noise floor must be >= 0");
  }
  if (noise_floor_mv == 0.0) {
    return effective_amplitude_mv;
  }
  std::mt19937_64 engine(derive_seed(seed, {0x73636f7065ULL}));
  boost::random::normal_distribution<double> noise(0.0, noise_floor_mv);
  return effective_amplitude_mv + noise(engine);
}

void to_json(nlohmann::json& j, const GainFeature& f) {
  j = nlohmann::json{
      {"center_mv", f.center_mv}, {"width_mv", f.width_mv}, {"depth", f.depth}};
}

void from_json(const nlohmann::json& j, GainFeature& f) {
  j.at("center_mv").get_to(f.center_mv);
  j.at("width_mv").get_to(f.width_mv);
  j.at("depth").get_to(f.depth);
}

void to_json(nlohmann::json& j, const DistortionProfile& p) {
  j = nlohmann::json{{"baseline_gain", p.baseline_gain()},
                     {"max_amplitude_mv", p.max_amplitude_mv()},
                     {"features", p.features()}};
}

void from_json(const nlohmann::json& j, DistortionProfile& p) {
  p = DistortionProfile(j.value("baseline_gain", 1.0),
                        j.value("features", std::vector<GainFeature>{}),
                        j.value("max_amplitude_mv", 500.0));
}

}  // namespace rabical
