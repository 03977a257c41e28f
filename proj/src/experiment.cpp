#include "qrev/experiment.hpp"

namespace qrev {

ExperimentPoint experiment_point(const std::string& label, double s_db, double a_db) {
  if (s_db <= 0.0 || a_db <= 0.0)
    throw std::invalid_argument("experiment_point: dB magnitudes must be positive");
  if (a_db < s_db)
    throw std::invalid_argument(
        "experiment_point: a_db < s_db maps to nu < 1, which is unphysical");
  return ExperimentPoint{label, s_db, a_db};
}

const std::vector<ExperimentPoint>& experiment_overlay() {
  static const std::vector<ExperimentPoint> table = {
      experiment_point("Mehmet2011", 12.3, 19.3),
      experiment_point("Mehmet2011", 11.4, 16.8),
      experiment_point("Meylahn2022", 13.5, 22.3),
      experiment_point("Meylahn2022", 13.2, 23.4),
      experiment_point("Meylahn2022", 11.5, 17.5),
  };
  return table;
}

const char* experiment_overlay_version() { return "overlay-v1"; }

}  // namespace qrev
