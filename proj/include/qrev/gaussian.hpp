#pragma once

#include <cmath>

#include "qrev/common.hpp"

namespace qrev {

// One-mode squeezed-thermal state parameters: nu >= 1 is the thermal
// symplectic eigenvalue (nu = 1 pure), r the squeezing parameter.
struct SqueezedThermalParams {
  double nu = 1.0;
  double r = 0.0;

  // Anti-squeezing ratio cosh(2r)/nu; the reverse problem depends on the
  // state only through (x, nu).
  double x() const { return std::cosh(2.0 * r) / nu; }
};

// diag(nu e^{2r}, nu e^{-2r}) in vacuum units.
Matrix2d squeezed_thermal(const SqueezedThermalParams& params);

// Pure-loss trajectory e^{-2 gamma t} Gamma0 + (1 - e^{-2 gamma t}) I.
MatrixXd pure_loss_path(const Eigen::Ref<const MatrixXd>& gamma0, double gamma, double t);

// Drift/diffusion pair of a Gaussian Markov semigroup, benchmarked against
// loss rate gamma. CP feasibility is deliberately not an invariant: infeasible
// candidates must be representable so violations can be reported.
struct GaussianGenerator {
  MatrixXd K;
  MatrixXd D;
  double gamma = 1.0;
};

// Forward pure loss: K = -gamma I, D = 2 gamma I (uniform rate across modes).
GaussianGenerator forward_pure_loss(int n_modes, double gamma);

// Generator-level complete-positivity matrix M = D + i(K sigma + sigma K^T);
// Hermitian by construction. The generator is CP iff M >= 0.
MatrixXcd cp_matrix(const GaussianGenerator& gen);

double cp_min_eig(const GaussianGenerator& gen);

// Covariance-weighted diffusion cost Tr(Gamma^{-1} D): the reverse-noise
// budget, equal to the displacement-QFI injection rate and four times the
// displacement-Bures rate for faithful Gaussian states.
double cost_Z(const Eigen::Ref<const MatrixXd>& d, const Eigen::Ref<const MatrixXd>& gamma_cov);

// Frobenius norm of K Gamma + Gamma K^T + D - 2 gamma (Gamma - I); zero means
// the generator reverses the pure-loss flow at Gamma exactly.
double matching_residual(const GaussianGenerator& gen, const Eigen::Ref<const MatrixXd>& gamma_cov);

}  // namespace qrev
