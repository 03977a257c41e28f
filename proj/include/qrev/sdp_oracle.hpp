#pragma once

#include <string>

#include "qrev/common.hpp"

namespace qrev {

struct SqueezedThermalParams;

// One-mode reverse SDP
//   minimize a/v_q + b/v_p  subject to  M(a,b,c) = A0 + a A1 + b A2 + c A3 >= 0
// in the diffusion variables D = [[a, c], [c, b]]. This module verifies the
// closed forms numerically and deliberately shares no algorithmic code with
// them: feasibility, eigenvalues and constraint assembly are all local.
struct SdpInstance {
  double v_q = 1.0;  // quadrature variances of the target, vacuum units
  double v_p = 1.0;
  double gamma = 1.0;

  static SdpInstance from_variances(double v_q, double v_p, double gamma);
  static SdpInstance from_params(const SqueezedThermalParams& params, double gamma);

  double x() const { return 0.5 * (1.0 / v_q + 1.0 / v_p); }
  double nu() const { return std::sqrt(v_q * v_p); }
  double tau(double a, double b) const {
    return 2.0 * gamma * (1.0 - x()) - 0.5 * (a / v_q + b / v_p);
  }

  Matrix2cd a0() const;
  Matrix2cd a1() const;
  Matrix2cd a2() const;
  Matrix2cd a3() const;
  Matrix2cd constraint_matrix(double a, double b, double c) const;

  // min eig of M(a,b,c), closed form for the 2x2 Hermitian pencil
  double feasibility_margin(double a, double b, double c) const;
};

enum class OracleMethod { grid, bisection };

struct OracleResult {
  double z_opt = 0.0;
  double a = 0.0, b = 0.0, c = 0.0;
  OracleMethod method = OracleMethod::grid;
  double feasibility_margin = 0.0;
  bool feasible_at_resolution = true;
  std::string notes;
};

// Exhaustive covariance-scaled grid over (a, b) with c = 0, followed by
// window-shrinking refinement rounds around the incumbent. The bracket grows
// geometrically (x4, capped at x1024) if the initial grid holds no feasible
// point. Grid rows are evaluated via an internal parallel map with a
// deterministic reduction.
OracleResult solve_primal_grid(const SdpInstance& inst, int grid_resolution,
                               int refinement_rounds);

// Level-set bisection on Z: a trial value is feasible iff the maximum of ab
// along the segment {a/v_q + b/v_p = Z, a, b >= 0}, located by dense
// sampling, reaches tau(Z)^2.
OracleResult solve_primal_bisection(const SdpInstance& inst, double tol);

struct DualReport {
  bool feasible = false;
  double psd_margin = 0.0;
  double trace_residual[3] = {};
  double value = 0.0;  // -Tr(A0 Y); a certified lower bound when feasible
};

// Checks Y >= 0 and the three affine trace constraints; violations are
// reported with per-constraint residuals, not raised.
DualReport verify_dual(const SdpInstance& inst, const Matrix2cd& y);

}  // namespace qrev
