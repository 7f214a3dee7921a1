#include "rabical/correction_table.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace rabical {

void CorrectionTable::validate() const {
  const auto n = amplitudes_mv.size();
  if (n == 0) {
    throw std::invalid_argument("correction table is empty");
  }
  if (vc_factors.size() != n || applied_mv.size() != n ||
      band_low_mv.size() != n || band_high_mv.size() != n ||
      (!vc_stderr.empty() && vc_stderr.size() != n)) {
    throw std::invalid_argument("correction table columns differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(amplitudes_mv[i] > amplitudes_mv[i - 1])) {
      throw std::invalid_argument("correction table amplitudes not increasing");
    }
    if (!(amplitudes_mv[i] > 0.0) || !(vc_factors[i] > 0.0)) {
      throw std::invalid_argument(fmt::format(
          "correction table row {} has non-positive amplitude or VC", i));
    }
    if (vc_factors[i] * amplitudes_mv[i] != applied_mv[i]) {
      throw std::invalid_argument(
          fmt::format("correction table row {}: vc * amplitude != applied", i));
    }
    if (!(band_low_mv[i] <= applied_mv[i] && applied_mv[i] <= band_high_mv[i])) {
      throw std::invalid_argument(fmt::format(
          "correction table row {}: applied amplitude outside its band", i));
    }
  }
}

bool CorrectionTable::covers(double a_c_mv) const {
  return !amplitudes_mv.empty() && a_c_mv >= amplitudes_mv.front() &&
         a_c_mv <= amplitudes_mv.back();
}

double correction_factor(const CorrectionTable& table, double a_c_mv) {
  if (!table.covers(a_c_mv)) {
    throw std::out_of_range(fmt::format(
        "amplitude {} mV outside correction table domain", a_c_mv));
  }
  const auto& xs = table.amplitudes_mv;
  auto hi = std::lower_bound(xs.begin(), xs.end(), a_c_mv);
  const auto i = static_cast<std::size_t>(hi - xs.begin());
  if (*hi == a_c_mv) {
    return table.vc_factors[i];
  }
  const double t = (a_c_mv - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return table.vc_factors[i - 1] + t * (table.vc_factors[i] - table.vc_factors[i - 1]);
}

double apply_correction(const CorrectionTable& table, double a_c_mv) {
  if (!table.covers(a_c_mv)) {
    throw std::out_of_range(fmt::format(
        "amplitude {} mV outside correction table domain", a_c_mv));
  }
  const auto& xs = table.amplitudes_mv;
  auto it = std::lower_bound(xs.begin(), xs.end(), a_c_mv);
  if (*it == a_c_mv) {
    return table.applied_mv[static_cast<std::size_t>(it - xs.begin())];
  }
  return a_c_mv * correction_factor(table, a_c_mv);
}

}  // namespace rabical
