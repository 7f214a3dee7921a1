#pragma once

#include <filesystem>
#include <vector>

#include "rabical/calibration.hpp"
#include "rabical/columnar.hpp"
#include "rabical/experiment.hpp"
#include "rabical/fitting.hpp"

namespace rabical {

// Rabi map: one row per (amplitude, duration).
//   amplitude_mv,duration_us,p_estimate,shots
ColumnTable map_to_table(const RabiMap& map);
RabiMap map_from_table(const ColumnTable& table);

// Rabi frequency curve: amplitude_mv,omega,stderr,converged
ColumnTable curve_to_table(const RabiFrequencyCurve& curve);
RabiFrequencyCurve curve_from_table(const ColumnTable& table);

// Excluded fits: amplitude_mv,omega,stderr,converged,reason
ColumnTable excluded_to_table(const std::vector<ExcludedFit>& excluded,
                              const std::string& qubit_label);

// Correction table: amplitude,vc,applied,band_low,band_high,vc_stderr plus a
// header block with epsilon, model slope, fit region, source checksum.
ColumnTable correction_to_table(const CorrectionTable& table);
CorrectionTable correction_from_table(const ColumnTable& table);

// amplitude_mv,omega,percent_error,percent_stderr
ColumnTable percent_report_to_table(const std::vector<PercentErrorPoint>& report,
                                    const std::string& qubit_label, bool corrected);

}  // namespace rabical
