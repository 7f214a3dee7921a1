#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rabical {

// Voltage-correction lookup table. For each intended amplitude A_c the table
// stores the amplitude A_o that must be commanded so the induced Rabi
// frequency matches the linear model, VC = A_o / A_c, and the interval of
// commanded amplitudes that keeps the Rabi-frequency error within epsilon.
struct CorrectionTable {
  std::vector<double> amplitudes_mv;
  std::vector<double> vc_factors;
  std::vector<double> applied_mv;
  std::vector<double> band_low_mv;
  std::vector<double> band_high_mv;
  // Propagated one-sigma uncertainty of each VC factor.
  std::vector<double> vc_stderr;
  double epsilon = 0.01;
  std::string source_qubit;

  // Provenance recorded in the serialized header block.
  double model_slope = 0.0;
  double fit_low_mv = 0.0;
  double fit_high_mv = 0.0;
  std::uint64_t source_checksum = 0;

  std::size_t size() const { return amplitudes_mv.size(); }
  double min_amplitude() const { return amplitudes_mv.front(); }
  double max_amplitude() const { return amplitudes_mv.back(); }

  // Throws std::invalid_argument when lengths, ordering, VC consistency or
  // band containment are violated.
  void validate() const;

  bool covers(double a_c_mv) const;
};

// VC factor linearly interpolated in A_c. Throws std::out_of_range outside
// the table domain.
double correction_factor(const CorrectionTable& table, double a_c_mv);

// A_c * correction_factor(A_c); exact A_o at table knots.
double apply_correction(const CorrectionTable& table, double a_c_mv);

}  // namespace rabical
