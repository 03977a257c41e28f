#include "qrev/symplectic.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace qrev {

MatrixXd symplectic_form(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("symplectic_form: n_modes must be >= 1");
  MatrixXd sigma = MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    sigma(2 * k, 2 * k + 1) = 1.0;
    sigma(2 * k + 1, 2 * k) = -1.0;
  }
  return sigma;
}

MatrixXd sqrt_spd(const Eigen::Ref<const MatrixXd>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("sqrt_spd: matrix must be square");
  if (symmetry_defect(m) > tol::herm)
    throw std::invalid_argument("sqrt_spd: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("sqrt_spd: eigensolver failed");
  if (es.eigenvalues().minCoeff() <= tol::posdef)
    throw std::invalid_argument("sqrt_spd: matrix is singular or not positive definite");
  MatrixXd r = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
               es.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

double min_eig_hermitian(const Eigen::Ref<const MatrixXcd>& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("min_eig_hermitian: matrix must be square");
  if (hermiticity_defect(m) > tol::herm)
    throw std::invalid_argument("min_eig_hermitian: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("min_eig_hermitian: eigensolver failed");
  return es.eigenvalues().minCoeff();
}

namespace {

// Pair-preserving re-orthogonalization: rebuild each (x_k, y_k) from x_k with
// y_k = -A x_k / nu_k, orthogonalizing x_k against all previous pairs first.
void reorthogonalize_pairs(const MatrixXd& a, const VectorXd& nu, MatrixXcd& w) {
  const int n = static_cast<int>(nu.size());
  const std::complex<double> im(0.0, 1.0);
  std::vector<VectorXd> xs, ys;
  for (int k = 0; k < n; ++k) {
    VectorXd x = std::sqrt(2.0) * w.col(k).real();
    for (int j = 0; j < k; ++j) x -= xs[j].dot(x) * xs[j] + ys[j].dot(x) * ys[j];
    x.normalize();
    VectorXd y = -(a * x) / nu[k];
    for (int j = 0; j < k; ++j) y -= xs[j].dot(y) * xs[j] + ys[j].dot(y) * ys[j];
    y.normalize();
    xs.push_back(x);
    ys.push_back(y);
    w.col(k) = (x.cast<std::complex<double>>() - im * y.cast<std::complex<double>>()) /
               std::sqrt(2.0);
  }
}

}  // namespace

SymplecticEigenBasis symplectic_eigenbasis(const Eigen::Ref<const MatrixXd>& sqrt_gamma) {
  const int dim = static_cast<int>(sqrt_gamma.rows());
  if (dim % 2 != 0 || dim == 0)
    throw std::invalid_argument("symplectic_eigenbasis: dimension must be even");
  const int n = dim / 2;
  const MatrixXd sigma = symplectic_form(n);
  const MatrixXd a = sqrt_gamma * sigma * sqrt_gamma;
  const std::complex<double> im(0.0, 1.0);
  const MatrixXcd h = im * a.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("symplectic_eigenbasis: eigensolver failed");

  SymplecticEigenBasis basis;
  basis.nu = es.eigenvalues().tail(n);  // positive branch, ascending
  basis.w = es.eigenvectors().rightCols(n);

  // Bilinear orthogonality w_j^T w_k = 0 (no conjugation) holds analytically on
  // the positive branch; the Darboux assembly depends on it.
  double residue = 0.0;
  MatrixXcd b = basis.w.transpose() * basis.w;
  residue = b.cwiseAbs().maxCoeff();
  if (residue > 1e-10) reorthogonalize_pairs(a, basis.nu, basis.w);
  return basis;
}

MatrixXd darboux_matrix(const MatrixXcd& w) {
  const int dim = static_cast<int>(w.rows());
  const int n = static_cast<int>(w.cols());
  MatrixXd o(dim, 2 * n);
  for (int k = 0; k < n; ++k) {
    o.col(2 * k) = std::sqrt(2.0) * w.col(k).real();
    o.col(2 * k + 1) = -std::sqrt(2.0) * w.col(k).imag();
  }
  return o;
}

WilliamsonDecomposition williamson(const Eigen::Ref<const MatrixXd>& gamma) {
  if (gamma.rows() != gamma.cols() || gamma.rows() % 2 != 0 || gamma.rows() == 0)
    throw std::invalid_argument("williamson: covariance must be square with even dimension");
  if (symmetry_defect(gamma) > tol::herm)
    throw std::invalid_argument("williamson: covariance is not symmetric");
  const MatrixXd r = sqrt_spd(gamma);  // rejects non-positive-definite input
  SymplecticEigenBasis basis = symplectic_eigenbasis(r);
  const int n = static_cast<int>(basis.nu.size());
  if (basis.nu.minCoeff() < tol::posdef)
    throw std::runtime_error("williamson: degenerate symplectic spectrum");

  // Canonical ordering: nu descending, stable in the solver's block order.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int i, int j) { return basis.nu[i] > basis.nu[j]; });

  WilliamsonDecomposition dec;
  dec.nu.resize(n);
  MatrixXcd w_sorted(2 * n, n);
  for (int k = 0; k < n; ++k) {
    dec.nu[k] = basis.nu[idx[k]];
    w_sorted.col(k) = basis.w.col(idx[k]);
  }
  const MatrixXd o = darboux_matrix(w_sorted);
  VectorXd inv_sqrt_lambda(2 * n);
  for (int k = 0; k < n; ++k)
    inv_sqrt_lambda[2 * k] = inv_sqrt_lambda[2 * k + 1] = 1.0 / std::sqrt(dec.nu[k]);
  dec.S = r * o * inv_sqrt_lambda.asDiagonal();
  return dec;
}

PhysicalityCheck is_physical_state(const Eigen::Ref<const MatrixXd>& gamma) {
  if (gamma.rows() != gamma.cols() || gamma.rows() % 2 != 0 || gamma.rows() == 0)
    throw std::invalid_argument("is_physical_state: covariance must be square with even dimension");
  if (symmetry_defect(gamma) > tol::herm)
    throw std::invalid_argument("is_physical_state: covariance is not symmetric");
  const int n = static_cast<int>(gamma.rows()) / 2;
  const std::complex<double> im(0.0, 1.0);
  const MatrixXcd h =
      gamma.cast<std::complex<double>>() + im * symplectic_form(n).cast<std::complex<double>>();
  PhysicalityCheck check;
  check.margin = min_eig_hermitian(h);
  check.physical = check.margin >= -tol::psd;
  return check;
}

MatrixXd williamson_diagonal(const Eigen::Ref<const VectorXd>& nu) {
  const int n = static_cast<int>(nu.size());
  MatrixXd lambda = MatrixXd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) lambda(2 * k, 2 * k) = lambda(2 * k + 1, 2 * k + 1) = nu[k];
  return lambda;
}

}  // namespace qrev
