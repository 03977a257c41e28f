#include "qrev/gaussian.hpp"

#include "qrev/symplectic.hpp"

namespace qrev {

Matrix2d squeezed_thermal(const SqueezedThermalParams& params) {
  if (params.nu < 1.0)
    throw std::invalid_argument("squeezed_thermal: nu < 1 is unphysical");
  Matrix2d gamma = Matrix2d::Zero();
  gamma(0, 0) = params.nu * std::exp(2.0 * params.r);
  gamma(1, 1) = params.nu * std::exp(-2.0 * params.r);
  return gamma;
}

MatrixXd pure_loss_path(const Eigen::Ref<const MatrixXd>& gamma0, double gamma, double t) {
  if (t < 0.0) throw std::invalid_argument("pure_loss_path: negative time");
  if (gamma <= 0.0) throw std::invalid_argument("pure_loss_path: loss rate must be positive");
  const double eta = std::exp(-2.0 * gamma * t);
  return eta * gamma0 + (1.0 - eta) * MatrixXd::Identity(gamma0.rows(), gamma0.cols());
}

GaussianGenerator forward_pure_loss(int n_modes, double gamma) {
  GaussianGenerator gen;
  gen.K = -gamma * MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  gen.D = 2.0 * gamma * MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  gen.gamma = gamma;
  return gen;
}

MatrixXcd cp_matrix(const GaussianGenerator& gen) {
  if (gen.K.rows() != gen.D.rows() || gen.K.cols() != gen.D.cols() ||
      gen.K.rows() != gen.K.cols() || gen.K.rows() % 2 != 0)
    throw std::invalid_argument("cp_matrix: inconsistent generator shapes");
  const int n = static_cast<int>(gen.K.rows()) / 2;
  const MatrixXd sigma = symplectic_form(n);
  const MatrixXd skew = gen.K * sigma + sigma * gen.K.transpose();  // antisymmetric
  const std::complex<double> im(0.0, 1.0);
  return gen.D.cast<std::complex<double>>() + im * skew.cast<std::complex<double>>();
}

double cp_min_eig(const GaussianGenerator& gen) { return min_eig_hermitian(cp_matrix(gen)); }

double cost_Z(const Eigen::Ref<const MatrixXd>& d, const Eigen::Ref<const MatrixXd>& gamma_cov) {
  Eigen::LLT<MatrixXd> llt(gamma_cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument(
        "cost_Z: covariance is singular or not positive definite "
        "(vacuum-normalized states, including pure ones, must be PD)");
  return llt.solve(d).trace();
}

double matching_residual(const GaussianGenerator& gen,
                         const Eigen::Ref<const MatrixXd>& gamma_cov) {
  const MatrixXd lhs = gen.K * gamma_cov + gamma_cov * gen.K.transpose() + gen.D;
  const MatrixXd rhs =
      2.0 * gen.gamma * (gamma_cov - MatrixXd::Identity(gamma_cov.rows(), gamma_cov.cols()));
  return (lhs - rhs).norm();
}

}  // namespace qrev
