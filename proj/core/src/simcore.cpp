#include "rabical/simcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <boost/random/binomial_distribution.hpp>
#include <fmt/format.h>

namespace rabical {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_non_negative(double v, const char* what) {
  if (!(v >= 0.0)) {
    throw std::invalid_argument(fmt::format("{} must be >= 0 (got {})", what, v));
  }
}

}  // namespace

void SimulatedQubit::validate() const {
  if (!(transition_freq_ghz > 0.0)) {
    throw std::invalid_argument("qubit transition_freq_ghz must be > 0");
  }
  if (!(t1_us > 0.0)) {
    throw std::invalid_argument("qubit t1_us must be > 0");
  }
  if (!(rabi_rate_per_mv > 0.0) || !std::isfinite(rabi_rate_per_mv)) {
    throw std::invalid_argument("qubit rabi_rate_per_mv must be finite and > 0");
  }
}

void PulseSpec::validate() const {
  require_non_negative(amplitude_mv, "pulse amplitude_mv");
  require_non_negative(duration_us, "pulse duration_us");
}

Probability::Probability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::out_of_range(fmt::format("probability {} outside [0, 1]", value));
  }
}

double decay_time_us(const SimulatedQubit& qubit) {
  return kDecayTimeFactor * qubit.t1_us;
}

Probability ideal_excited_probability(double omega_rabi, double tau_us) {
  require_non_negative(omega_rabi, "omega_rabi");
  require_non_negative(tau_us, "tau");
  const double s = std::sin(0.5 * omega_rabi * tau_us);
  return Probability(std::clamp(s * s, 0.0, 1.0));
}

Probability decayed_excited_probability(double omega_rabi, double tau_us,
                                        const SimulatedQubit& qubit) {
  require_non_negative(omega_rabi, "omega_rabi");
  require_non_negative(tau_us, "tau");
  const double envelope = std::exp(-tau_us / decay_time_us(qubit));
  if (envelope == 1.0) {
    // Same closed form as the ideal case; avoids 1 - cos cancellation.
    return ideal_excited_probability(omega_rabi, tau_us);
  }
  const double p = 0.5 * (1.0 - envelope * std::cos(omega_rabi * tau_us));
  return Probability(std::clamp(p, 0.0, 1.0));
}

Probability sample_shots(Probability p_true, std::uint64_t n_shots,
                         std::uint64_t seed) {
  if (n_shots == 0) {
    throw std::invalid_argument("n_shots must be >= 1");
  }
  if (p_true.value() == 0.0 || p_true.value() == 1.0) {
    return p_true;
  }
  if (n_shots > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw std::invalid_argument("n_shots too large");
  }
  std::mt19937_64 engine(splitmix64(seed));
  boost::random::binomial_distribution<std::int64_t, double> draw(
      static_cast<std::int64_t>(n_shots), p_true.value());
  const auto k = draw(engine);
  return Probability(static_cast<double>(k) / static_cast<double>(n_shots));
}

std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(base);
  for (const auto k : keys) {
    h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  }
  return h;
}

std::uint64_t seed_key(double value) {
  // +0.0 and -0.0 name the same grid coordinate.
  if (value == 0.0) value = 0.0;
  return std::bit_cast<std::uint64_t>(value);
}

SimulatedQubit qubit_preset(std::string_view name) {
  // Drive coupling is not a device-table quantity; 0.42 rad/us per mV keeps
  // the 500 mV top of the sweep below the Nyquist limit of a 10 ns grid.
  if (name == "qubit1") {
    return SimulatedQubit{"qubit1", 4.09947, 59.5, 0.42};
  }
  if (name == "qubit2") {
    return SimulatedQubit{"qubit2", 4.80655, 17.4, 0.42};
  }
  std::string valid;
  for (const auto& n : qubit_preset_names()) {
    valid += valid.empty() ? n : ", " + n;
  }
  throw std::invalid_argument(
      fmt::format("unknown qubit preset '{}' (valid: {})", name, valid));
}

std::vector<std::string> qubit_preset_names() { return {"qubit1", "qubit2"}; }

}  // namespace rabical
