#pragma once

#include <map>
#include <string>
#include <vector>

namespace qrev {

// Pinned pass/fail thresholds of the verification suite. Values are in units
// of gamma where dimensionful. Overridable by name (see threshold_keys) so a
// deliberately impossible tolerance can be injected as a negative control.
struct VerifyThresholds {
  double bayes_margin = 1e-10;       // analytic vs numeric CP margin, * gamma
  double oracle_abs = 1e-4;          // closed form vs oracle, absolute * gamma
  double oracle_rel = 1e-3;          // closed form vs oracle, relative
  double oracle_align = 1e-5;        // oracle argmin covariance alignment
  double kkt_gap = 1e-10;            // duality gap, * gamma
  double kkt_slack = 1e-8;           // ||M Y|| / (||M|| ||Y||)
  double kkt_dualfeas = 1e-10;       // dual trace-constraint residuals
  double thermal_ratio = 0.02;       // |Z nu / (4 gamma) - 1| at large nu
  double petz_match = 1e-10;         // gap vs closed form, * gamma
  double petz_zero = 1e-12;          // gap at r = 0, * gamma
  double branch_ratio = 1e-6;        // relative, branch asymmetry ratio
  double boundary_zero = 1e-12;      // Z on the zero-cost curve, * gamma
  double mm_cost = 1e-9;             // protocol cost vs additive law, relative
  double mm_cp = 1e-8;               // lab CP min-eig floor, * gamma
  double mm_match = 1e-7;            // lab matching residual
  double mm_jump = 10.0;             // frame continuity, * grid step
  double mm_gauge = 1e-8;            // gauge invariance of the total, relative
  double kin_ratio = 0.75;           // residual ratio after halving the step
  double endpoint_c0 = 0.01;         // |fitted c0 - 2|
  double action_bound = 5.0;         // integrated action remainder
  double fluc_slope = 0.1;           // |slope - 1| of the fluctuation integral
};

// Known override keys, e.g. "kkt.gap". Unknown keys raise std::invalid_argument.
void apply_threshold_override(VerifyThresholds& thresholds, const std::string& key, double value);
std::vector<std::string> threshold_keys();

struct VerifyOptions {
  double gamma = 1.0;
  std::string subset = "all";  // all | one-mode | oracle | multimode | asymptotics
  VerifyThresholds thresholds;
  bool quick = false;  // reduced grid sizes for fast unit-test runs
};

struct CheckResult {
  std::string name;
  std::string subset;
  bool pass = false;
  double margin = 0.0;  // distance to the failing threshold; >= 0 iff pass
  std::string details;
};

// Runs the selected invariant checks. Deterministic: fixed seeds, fixed
// iteration order.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

// Deterministic machine-readable report.
std::string verification_report_json(const VerifyOptions& options,
                                     const std::vector<CheckResult>& results);

}  // namespace qrev
