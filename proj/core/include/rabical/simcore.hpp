#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace rabical {

// Two-level system under resonant drive. Units: GHz for frequencies, us for
// times, rad/us per mV of effective (post-distortion) amplitude for the
// coupling.
struct SimulatedQubit {
  std::string label;
  double transition_freq_ghz = 0.0;
  double t1_us = 0.0;
  double rabi_rate_per_mv = 0.0;

  // Throws std::invalid_argument unless all three physical fields are > 0.
  // t1_us may be +infinity (no relaxation).
  void validate() const;
};

struct PulseSpec {
  double amplitude_mv = 0.0;
  double duration_us = 0.0;
  double carrier_ghz = 0.0;

  void validate() const;
};

// Excited-state population estimate; always within [0, 1].
class Probability {
 public:
  Probability() = default;
  // Throws std::out_of_range for values outside [0, 1] or NaN.
  explicit Probability(double value);

  double value() const { return value_; }
  operator double() const { return value_; }

 private:
  double value_ = 0.0;
};

// Coherent-term decay constant relative to T1: tau_d = kDecayTimeFactor * T1.
inline constexpr double kDecayTimeFactor = 2.0;

// Readout resonator of the reference device. Carried as metadata only.
inline constexpr double kReadoutModeGhz = 7.07340;

double decay_time_us(const SimulatedQubit& qubit);

// sin^2(omega * tau / 2).
Probability ideal_excited_probability(double omega_rabi, double tau_us);

// 0.5 * (1 - exp(-tau / tau_d) * cos(omega * tau)).
Probability decayed_excited_probability(double omega_rabi, double tau_us,
                                        const SimulatedQubit& qubit);

// k / n_shots with k ~ Binomial(n_shots, p). Pure in (p, n_shots, seed).
Probability sample_shots(Probability p_true, std::uint64_t n_shots,
                         std::uint64_t seed);

// Counter-based seed derivation: mixes `base` with each key through
// SplitMix64 so that streams for distinct keys are decorrelated.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> keys);

// Bit pattern of a double, for keying seeds by coordinate values.
std::uint64_t seed_key(double value);

// "qubit1" and "qubit2" reproduce the reference device table.
SimulatedQubit qubit_preset(std::string_view name);
std::vector<std::string> qubit_preset_names();

}  // namespace rabical
