#include "rabical/artifacts.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace rabical {
namespace {

std::uint64_t parse_u64(const std::string& s) {
  std::size_t pos = 0;
  const auto v = std::stoull(s, &pos, 0);
  if (pos != s.size()) {
    throw std::invalid_argument(fmt::format("not an unsigned integer: '{}'", s));
  }
  return v;
}

}  // namespace

ColumnTable map_to_table(const RabiMap& map) {
  ColumnTable t({"amplitude_mv", "duration_us", "p_estimate", "shots"});
  t.set_meta("kind", "rabi_map");
  t.set_meta("qubit", map.qubit_label);
  t.set_meta("corrected", map.corrected ? "1" : "0");
  t.set_meta("seed", std::to_string(map.grid.seed));
  const std::string shots = std::to_string(map.grid.shots);
  for (std::size_t i = 0; i < map.rows(); ++i) {
    for (std::size_t j = 0; j < map.cols(); ++j) {
      t.add_row({format_number(map.grid.amplitudes_mv[i]),
                 format_number(map.grid.durations_us[j]), format_number(map.at(i, j)),
                 shots});
    }
  }
  return t;
}

RabiMap map_from_table(const ColumnTable& t) {
  RabiMap map;
  map.qubit_label = t.has_meta("qubit") ? t.meta("qubit") : "";
  map.corrected = t.has_meta("corrected") && t.meta("corrected") == "1";
  map.grid.seed = t.has_meta("seed") ? parse_u64(t.meta("seed")) : 0;
  if (t.rows() == 0) {
    throw std::invalid_argument("rabi map file has no rows");
  }
  const auto amps = t.numeric_column("amplitude_mv");
  const auto durs = t.numeric_column("duration_us");
  const auto ps = t.numeric_column("p_estimate");
  map.grid.shots = parse_u64(t.cell(0, "shots"));
  // Durations of the first amplitude block define the duration axis.
  std::size_t cols = 0;
  while (cols < amps.size() && amps[cols] == amps[0]) ++cols;
  if (t.rows() % cols != 0) {
    throw std::invalid_argument("rabi map rows do not form a full grid");
  }
  map.grid.durations_us.assign(durs.begin(), durs.begin() + static_cast<std::ptrdiff_t>(cols));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (durs[r] != map.grid.durations_us[r % cols] || amps[r] != amps[r - r % cols]) {
      throw std::invalid_argument(fmt::format("rabi map row {} breaks grid order", r));
    }
    if (r % cols == 0) map.grid.amplitudes_mv.push_back(amps[r]);
  }
  map.p_estimates = ps;
  map.validate();
  return map;
}

ColumnTable curve_to_table(const RabiFrequencyCurve& curve) {
  ColumnTable t({"amplitude_mv", "omega", "stderr", "converged"});
  t.set_meta("kind", "rabi_frequency_curve");
  t.set_meta("qubit", curve.qubit_label);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    t.add_row({format_number(curve.amplitudes_mv[i]), format_number(curve.omegas[i]),
               format_number(curve.stderrs[i]), "1"});
  }
  return t;
}

RabiFrequencyCurve curve_from_table(const ColumnTable& t) {
  RabiFrequencyCurve curve;
  curve.qubit_label = t.has_meta("qubit") ? t.meta("qubit") : "";
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (t.cell(r, "converged") != "1") continue;
    curve.amplitudes_mv.push_back(t.number(r, "amplitude_mv"));
    curve.omegas.push_back(t.number(r, "omega"));
    curve.stderrs.push_back(t.number(r, "stderr"));
  }
  curve.validate();
  return curve;
}

ColumnTable excluded_to_table(const std::vector<ExcludedFit>& excluded,
                              const std::string& qubit_label) {
  ColumnTable t({"amplitude_mv", "omega", "stderr", "converged", "reason"});
  t.set_meta("kind", "excluded_fits");
  t.set_meta("qubit", qubit_label);
  for (const auto& e : excluded) {
    t.add_row({format_number(e.amplitude_mv), format_number(e.fit.omega),
               format_number(e.fit.omega_stderr), e.fit.converged ? "1" : "0", e.reason});
  }
  return t;
}

ColumnTable correction_to_table(const CorrectionTable& table) {
  ColumnTable t({"amplitude", "vc", "applied", "band_low", "band_high", "vc_stderr"});
  t.set_meta("kind", "correction_table");
  t.set_meta("source_qubit", table.source_qubit);
  t.set_meta("epsilon", format_number(table.epsilon));
  t.set_meta("model_slope", format_number(table.model_slope));
  t.set_meta("fit_region_mv", fmt::format("{}:{}", format_number(table.fit_low_mv),
                                          format_number(table.fit_high_mv)));
  t.set_meta("source_curve_checksum", fmt::format("{:016x}", table.source_checksum));
  for (std::size_t i = 0; i < table.size(); ++i) {
    t.add_numeric_row({table.amplitudes_mv[i], table.vc_factors[i], table.applied_mv[i],
                       table.band_low_mv[i], table.band_high_mv[i],
                       table.vc_stderr.empty() ? 0.0 : table.vc_stderr[i]});
  }
  return t;
}

CorrectionTable correction_from_table(const ColumnTable& t) {
  CorrectionTable table;
  table.source_qubit = t.has_meta("source_qubit") ? t.meta("source_qubit") : "";
  table.epsilon = parse_number(t.meta("epsilon"));
  table.model_slope = parse_number(t.meta("model_slope"));
  const std::string& region = t.meta("fit_region_mv");
  const auto colon = region.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("malformed fit_region_mv header");
  }
  table.fit_low_mv = parse_number(region.substr(0, colon));
  table.fit_high_mv = parse_number(region.substr(colon + 1));
  table.source_checksum = std::stoull(t.meta("source_curve_checksum"), nullptr, 16);
  table.amplitudes_mv = t.numeric_column("amplitude");
  table.vc_factors = t.numeric_column("vc");
  table.applied_mv = t.numeric_column("applied");
  table.band_low_mv = t.numeric_column("band_low");
  table.band_high_mv = t.numeric_column("band_high");
  table.vc_stderr = t.numeric_column("vc_stderr");
  table.validate();
  return table;
}

ColumnTable percent_report_to_table(const std::vector<PercentErrorPoint>& report,
                                    const std::string& qubit_label, bool corrected) {
  ColumnTable t({"amplitude_mv", "omega", "percent_error", "percent_stderr"});
  t.set_meta("kind", "percent_error_report");
  t.set_meta("qubit", qubit_label);
  t.set_meta("corrected", corrected ? "1" : "0");
  for (const auto& p : report) {
    t.add_numeric_row({p.amplitude_mv, p.omega, p.percent_error, p.percent_stderr});
  }
  return t;
}

}  // namespace rabical
