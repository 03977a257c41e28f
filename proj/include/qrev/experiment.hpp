#pragma once

#include <string>
#include <vector>

#include "qrev/common.hpp"

namespace qrev {

// Published squeezed/anti-squeezed variance pair in dB, mapped to the
// squeezed-thermal parameters via V- = 10^{-s_db/10}, V+ = 10^{+a_db/10},
// nu = sqrt(V- V+), r = ln(V+/V-)/4.
struct ExperimentPoint {
  std::string label;
  double s_db = 0.0;  // squeezed-variance magnitude, dB (> 0)
  double a_db = 0.0;  // anti-squeezed variance, dB (> 0)

  double v_minus() const { return std::pow(10.0, -s_db / 10.0); }
  double v_plus() const { return std::pow(10.0, a_db / 10.0); }
  double nu() const { return std::sqrt(v_minus() * v_plus()); }
  double r() const { return 0.25 * std::log(v_plus() / v_minus()); }
  double x() const { return std::cosh(2.0 * r()) / nu(); }
};

// Validates s_db, a_db > 0 and physicality nu >= 1 (a_db >= s_db).
ExperimentPoint experiment_point(const std::string& label, double s_db, double a_db);

// Built-in overlay table of directly reported 1550 nm squeezing pairs.
const std::vector<ExperimentPoint>& experiment_overlay();
const char* experiment_overlay_version();

}  // namespace qrev
