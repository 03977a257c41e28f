#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qrev/gaussian.hpp"
#include "qrev/random_gen.hpp"
#include "qrev/symplectic.hpp"
#include "test_util.hpp"

using namespace qrev;
using test::rel_diff;

TEST_CASE("squeezed_thermal constructor") {
  CHECK(test::max_abs(squeezed_thermal({1.0, 0.0}) - MatrixXd::Identity(2, 2)) == 0.0);

  const Matrix2d thermal = squeezed_thermal({3.0, 0.0});
  CHECK(thermal(0, 0) == 3.0);
  CHECK(thermal(1, 1) == 3.0);

  const Matrix2d sq = squeezed_thermal({3.0, 1.0});
  CHECK(rel_diff(sq(0, 0), 3.0 * std::exp(2.0)) < 1e-15);
  CHECK(rel_diff(sq(1, 1), 3.0 * std::exp(-2.0)) < 1e-15);
  CHECK(sq(0, 1) == 0.0);

  CHECK_THROWS_AS(squeezed_thermal({0.99, 0.0}), std::invalid_argument);
}

TEST_CASE("pure_loss_path fixed points and value") {
  const Matrix2d gamma0 = squeezed_thermal({3.0, 1.0});
  CHECK(test::max_abs(pure_loss_path(gamma0, 1.0, 0.0) - gamma0) == 0.0);
  CHECK(test::max_abs(pure_loss_path(gamma0, 1.0, 500.0) - MatrixXd::Identity(2, 2)) < 1e-12);

  const MatrixXd mid = pure_loss_path(gamma0, 1.0, 0.5);
  const double eta = std::exp(-1.0);
  CHECK(rel_diff(mid(0, 0), eta * gamma0(0, 0) + 1.0 - eta) < 1e-15);
  CHECK(rel_diff(mid(1, 1), eta * gamma0(1, 1) + 1.0 - eta) < 1e-15);

  CHECK_THROWS_AS(pure_loss_path(gamma0, 1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(pure_loss_path(gamma0, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("pure_loss_path semigroup property") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd gamma0 = random_physical_covariance(2, rng, 1.0, 4.0, 0.5);
    const double gamma = 0.3 + 0.01 * (trial + 1);
    const double s = 0.2, t = 0.7;
    const MatrixXd two_step = pure_loss_path(pure_loss_path(gamma0, gamma, s), gamma, t);
    const MatrixXd one_step = pure_loss_path(gamma0, gamma, s + t);
    CHECK(test::max_abs(two_step - one_step) < 1e-12 * std::max(1.0, test::max_abs(one_step)));
  }
}

TEST_CASE("cp_matrix of the forward generator is CP-marginal") {
  for (double gamma : {0.5, 1.0, 2.5}) {
    const GaussianGenerator fwd = forward_pure_loss(1, gamma);
    const MatrixXcd m = cp_matrix(fwd);
    CHECK((m - m.adjoint()).norm() == 0.0);

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
    CHECK(std::abs(es.eigenvalues()[0]) < 1e-14 * gamma);
    CHECK(rel_diff(es.eigenvalues()[1], 4.0 * gamma) < 1e-14);
    CHECK(std::abs(cp_min_eig(fwd)) < tol::psd * gamma);
  }

  GaussianGenerator zero;
  zero.K = MatrixXd::Zero(2, 2);
  zero.D = MatrixXd::Zero(2, 2);
  CHECK(cp_matrix(zero).norm() == 0.0);
}

TEST_CASE("cost_Z values and errors") {
  const Matrix2d eye = Matrix2d::Identity();
  CHECK(cost_Z(Matrix2d::Zero(), eye) == 0.0);
  for (double gamma : {0.5, 1.0, 3.0})
    CHECK(rel_diff(cost_Z(2.0 * gamma * eye, eye), 4.0 * gamma) < 1e-15);

  // D = (Z/2) Gamma costs exactly Z for any one-mode covariance.
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd gamma_cov = random_physical_covariance(1, rng, 1.0, 6.0, 0.8);
    const double z = 0.1 + 0.3 * trial;
    CHECK(rel_diff(cost_Z(0.5 * z * gamma_cov, gamma_cov), z) < 1e-13);
  }

  CHECK_THROWS_AS(cost_Z(eye, Matrix2d::Zero()), std::invalid_argument);
}

TEST_CASE("cost_Z congruence invariance and linearity") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const MatrixXd gamma_cov = random_physical_covariance(n, rng, 1.1, 4.0, 0.4);
    MatrixXd d = random_spd(2 * n, rng, 2.0);
    const MatrixXd t = random_symplectic(n, rng, 0.4);

    const double direct = cost_Z(d, gamma_cov);
    const double conjugated = cost_Z(t * d * t.transpose(), t * gamma_cov * t.transpose());
    CHECK(rel_diff(direct, conjugated) < 1e-9);

    const MatrixXd d2 = random_spd(2 * n, rng, 2.0);
    CHECK(rel_diff(cost_Z(d + d2, gamma_cov), cost_Z(d, gamma_cov) + cost_Z(d2, gamma_cov)) <
          1e-12);
  }
}

TEST_CASE("matching_residual of the forward generator at vacuum") {
  const GaussianGenerator fwd = forward_pure_loss(1, 1.3);
  CHECK(matching_residual(fwd, MatrixXd::Identity(2, 2)) < 1e-15);
}

TEST_CASE("anti-squeezing ratio equals half the inverse-covariance trace") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> nu_dist(1.0, 10.0);
  std::uniform_real_distribution<double> r_dist(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    const SqueezedThermalParams params{nu_dist(rng), r_dist(rng)};
    const Matrix2d gamma0 = squeezed_thermal(params);
    const double half_trace = 0.5 * (1.0 / gamma0(0, 0) + 1.0 / gamma0(1, 1));
    CHECK(rel_diff(half_trace, params.x()) < 1e-12);
  }
}
