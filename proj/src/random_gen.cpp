#include "qrev/random_gen.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "qrev/symplectic.hpp"

namespace qrev {

MatrixXd random_symplectic(int n_modes, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int dim = 2 * n_modes;
  MatrixXd s(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = scale * gauss(rng);
  const MatrixXd hamiltonian = symplectic_form(n_modes) * s;
  return hamiltonian.exp();
}

MatrixXd random_spd(int dim, std::mt19937_64& rng, double log10_cond_max) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  VectorXd eigs(dim);
  const double span = log10_cond_max * unif(rng);
  for (int i = 0; i < dim; ++i) eigs[i] = std::pow(10.0, span * (unif(rng) - 0.5));
  MatrixXd m = q * eigs.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

MatrixXd random_physical_covariance(int n_modes, std::mt19937_64& rng, double nu_min,
                                    double nu_max, double scale) {
  std::uniform_real_distribution<double> unif(nu_min, nu_max);
  VectorXd nu(n_modes);
  for (int k = 0; k < n_modes; ++k) nu[k] = unif(rng);
  const MatrixXd t = random_symplectic(n_modes, rng, scale);
  MatrixXd gamma = t * williamson_diagonal(nu) * t.transpose();
  return 0.5 * (gamma + gamma.transpose());
}

}  // namespace qrev
