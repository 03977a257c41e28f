#pragma once

#include "qrev/gaussian.hpp"

namespace qrev {

// Exact one-mode reverse-cost kernel
//   f_nu(x) = 4 gamma |x - 1| / (nu - sgn(x - 1)),
// the unrestricted optimum of the covariance-matching reverse problem.
// Diverges for x > 1 at nu = 1 (pure nonclassical endpoint).
double reverse_cost_min(double x, double nu, double gamma);

// Fixed-diffusion Bayes reverse: K = -gamma I + 2 gamma Gamma0^{-1}, D = 2 gamma I.
GaussianGenerator bayes_generator(const SqueezedThermalParams& params, double gamma);

// Analytic CP margin 4 gamma (1 - cosh(2r)/nu) of the Bayes reverse. Always
// an exact eigenvalue of the CP matrix (whose spectrum is {4 gamma x,
// 4 gamma (1-x)}), the minimal one for x >= 1/2, and the minimum eigenvalue
// changes sign exactly where the margin does: on cosh(2r) = nu.
double bayes_cp_margin(const SqueezedThermalParams& params, double gamma);

struct ReverseOptimum {
  double z_min = 0.0;
  int branch = 0;           // sgn(x - 1)
  Matrix2d d_opt;           // (z_min / 2) Gamma0, covariance aligned
  Matrix2d k_opt;           // diagonal drift completing exact matching
  Matrix2cd dual_witness;   // rank-one PSD certificate of optimality
};

// Closed-form unrestricted optimum with branch structure, optimal generator
// and the rank-one dual witness. Throws divergence_error at nu = 1, r != 0.
ReverseOptimum z_min_exact(const SqueezedThermalParams& params, double gamma);

// Raw optimality diagnostics; every failed check is reported as a value,
// never a panic, so sweeps can tabulate violations.
struct KktCertificate {
  double primal_margin = 0.0;     // min eig of M(D_opt)
  double dual_min_eig = 0.0;      // min eig of the witness
  double trace_residual[3] = {};  // affine dual constraint residuals
  double dual_value = 0.0;        // certified lower bound
  double duality_gap = 0.0;       // |z_min - dual_value|
  double slackness = 0.0;         // ||M Y||_F / max(||M|| ||Y||, eps)
  double align_offdiag = 0.0;     // |D_opt_{qp}|
  double align_ratio = 0.0;       // |a/v_q - b/v_p|
};

KktCertificate kkt_certificate(const ReverseOptimum& opt, const SqueezedThermalParams& params,
                               double gamma);

// Exact optimum of one intrinsic scalar block: minimize Z = 2c/nu subject to
// c >= |s - c| / nu, where s is the scalar reverse source. s < 0 requires
// nu > 1 (divergence otherwise).
struct ScalarBlockOptimum {
  double c = 0.0;  // isotropic block diffusion rate
  double z = 0.0;  // block cost
};
ScalarBlockOptimum scalar_block_optimum(double s, double nu);

// Local Gaussian Petz reverse of the pure-loss channel: closed-form diffusion
// entries and their covariance-weighted cost. z is contracted numerically
// from the entries; z_alt_closed_form is an alternative closed-form
// contraction of the same entries, kept for audit. The two disagree (e.g. at
// r = 0), and only the entrywise value is consistent with the exact gap law,
// so z is authoritative.
struct PetzReverse {
  double z = 0.0;
  Matrix2d d;
  double z_alt_closed_form = 0.0;
};
PetzReverse petz_cost(const SqueezedThermalParams& params, double gamma);

// Closed-form gap Z_petz - Z_min: 4 gamma (cosh(2r) - 1)/(nu - 1) for x <= 1,
// 4 gamma (cosh(2r) + 1)/(nu + 1) for x > 1. Zero only at r = 0.
double petz_gap_formula(const SqueezedThermalParams& params, double gamma);

// Best isotropic protocol D = c I. Infeasible (as a value, not an error) for
// x > 1: matching forces the symplectic drift term to outgrow isotropic repair.
struct IsotropicOptimum {
  bool feasible = false;
  double c = 0.0;
  double z = 0.0;
};
IsotropicOptimum isotropic_optimum(const SqueezedThermalParams& params, double gamma);

// Covariance-sector benchmark for an isotropic target nu I = (2 nbar + 1) I:
// optimal absolute diffusion rate and the round-trip displacement-variance
// amplification factor (2 nbar + 1)/(nbar + 1).
struct GkpBenchmark {
  double d_opt_rate = 0.0;
  double amplification = 1.0;
};
GkpBenchmark gkp_benchmark(double nbar, double gamma);

struct ProtocolComparison {
  double z_exact = 0.0;
  bool bayes_feasible = false;
  double z_bayes = 0.0;
  bool iso_feasible = false;
  double z_iso = 0.0;
  double z_petz = 0.0;
  double petz_gap = 0.0;
};

// Side-by-side costs of the exact optimum, Bayes, isotropic and Petz
// protocols at a common target. Requires nu > 1.
ProtocolComparison compare_protocols(const SqueezedThermalParams& params, double gamma);

}  // namespace qrev
