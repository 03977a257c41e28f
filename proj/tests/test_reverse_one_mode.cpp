#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qrev/reverse_one_mode.hpp"
#include "qrev/symplectic.hpp"
#include "test_util.hpp"

using namespace qrev;
using test::rel_diff;

TEST_CASE("bayes generator: drift and diffusion") {
  // at the vacuum the reverse generator is the forward one: vacuum is a
  // fixed point of both flows
  const GaussianGenerator vac = bayes_generator({1.0, 0.0}, 1.0);
  CHECK(test::max_abs(vac.K + MatrixXd::Identity(2, 2)) < 1e-15);
  CHECK(test::max_abs(vac.D - 2.0 * MatrixXd::Identity(2, 2)) < 1e-15);

  const GaussianGenerator thermal = bayes_generator({3.0, 0.0}, 1.0);
  CHECK(rel_diff(thermal.K(0, 0), 1.0 - 2.0 / 3.0) < 1e-14);
  CHECK(rel_diff(thermal.K(1, 1), 1.0 - 2.0 / 3.0) < 1e-14);
}

TEST_CASE("bayes generator matches the reverse flow at its target") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> nu_dist(1.0, 8.0);
  std::uniform_real_distribution<double> r_dist(0.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const SqueezedThermalParams params{nu_dist(rng), r_dist(rng)};
    const double gamma = 0.5 + 0.1 * trial;
    CHECK(matching_residual(bayes_generator(params, gamma), squeezed_thermal(params)) <
          1e-12 * gamma);
  }
}

TEST_CASE("bayes CP margin: threshold structure") {
  const double gamma = 1.0;
  CHECK(std::abs(bayes_cp_margin({std::cosh(2.0 * 0.7), 0.7}, gamma)) < 1e-14);
  CHECK(std::abs(bayes_cp_margin({1.0, 0.0}, gamma)) < 1e-14);
  // on the threshold the CP matrix itself is marginal
  CHECK(std::abs(cp_min_eig(bayes_generator({std::cosh(2.0 * 0.7), 0.7}, gamma))) < 1e-13);

  const double margin_above = bayes_cp_margin({3.0, 1.5}, gamma);
  CHECK(margin_above < 0.0);
  CHECK(rel_diff(margin_above, 4.0 * (1.0 - std::cosh(3.0) / 3.0)) < 1e-14);

  CHECK(bayes_cp_margin({3.0, 0.0}, gamma) > 0.0);
}

TEST_CASE("bayes CP margin sits in the spectrum {4gx, 4g(1-x)}") {
  const double gamma = 1.7;
  double worst_member = 0.0, worst_min = 0.0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const SqueezedThermalParams params{1.0 + 11.0 * j / 19.0, 2.0 * i / 19.0};
      const double margin = bayes_cp_margin(params, gamma);
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(cp_matrix(bayes_generator(params, gamma)),
                                                  Eigen::EigenvaluesOnly);
      worst_member = std::max(worst_member, std::min(std::abs(margin - es.eigenvalues()[0]),
                                                     std::abs(margin - es.eigenvalues()[1])));
      // the margin is the minimum eigenvalue wherever x >= 1/2, which covers
      // a band around the whole threshold curve x = 1
      if (params.x() >= 0.5)
        worst_min = std::max(worst_min, std::abs(margin - es.eigenvalues()[0]));
      // and its sign always agrees with the minimum eigenvalue's sign
      if (std::abs(margin) > 1e-12)
        CHECK(std::signbit(margin) == std::signbit(es.eigenvalues()[0]));
    }
  CHECK(worst_member < 1e-10 * gamma);
  CHECK(worst_min < 1e-10 * gamma);
}

TEST_CASE("exact optimum: thermal and boundary values") {
  const double gamma = 1.0;

  SUBCASE("thermal r = 0, nu = 3") {
    const ReverseOptimum opt = z_min_exact({3.0, 0.0}, gamma);
    CHECK(rel_diff(opt.z_min, 2.0 / 3.0) < 1e-14);
    CHECK(rel_diff(opt.z_min, 4.0 * (3.0 - 1.0) / (3.0 * 4.0)) < 1e-14);
    CHECK(opt.branch == -1);
  }

  SUBCASE("zero-cost point cosh(2r) = nu") {
    const ReverseOptimum opt = z_min_exact({std::cosh(2.0), 1.0}, gamma);
    CHECK(opt.z_min == 0.0);
    CHECK(opt.branch == 0);
    CHECK(opt.d_opt.norm() == 0.0);
  }

  SUBCASE("frozen value at nu = 3, r = 1") {
    const ReverseOptimum opt = z_min_exact({3.0, 1.0}, gamma);
    // 2 cosh(2)/3 - 2, cross-checked against both numerical oracles
    CHECK(rel_diff(opt.z_min, 0.5081304607224209) < 1e-15);
    CHECK(opt.branch == 1);
  }

  SUBCASE("pure nonclassical endpoint diverges") {
    CHECK_THROWS_AS(z_min_exact({1.0, 0.5}, gamma), divergence_error);
    CHECK_THROWS_AS(z_min_exact({0.9, 0.0}, gamma), std::invalid_argument);
  }
}

TEST_CASE("optimal generator: covariance alignment and exact matching") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> nu_dist(1.02, 10.0);
  std::uniform_real_distribution<double> r_dist(0.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const SqueezedThermalParams params{nu_dist(rng), r_dist(rng)};
    const double gamma = 0.25 + 0.05 * trial;
    const ReverseOptimum opt = z_min_exact(params, gamma);
    const Matrix2d gamma0 = squeezed_thermal(params);

    CHECK(test::max_abs(opt.d_opt - 0.5 * opt.z_min * gamma0) < 1e-12 * (1.0 + opt.z_min));

    GaussianGenerator gen;
    gen.K = opt.k_opt;
    gen.D = opt.d_opt;
    gen.gamma = gamma;
    CHECK(matching_residual(gen, gamma0) < 1e-10 * gamma * (1.0 + opt.z_min / gamma));

    // witness is PSD with rank one
    CHECK(min_eig_hermitian(opt.dual_witness) > -tol::psd);
    CHECK(std::abs(opt.dual_witness.determinant()) < 1e-12);
  }
}

TEST_CASE("KKT certificate at representative points") {
  const double gamma = 1.0;
  for (const SqueezedThermalParams params :
       {SqueezedThermalParams{3.0, 1.0}, SqueezedThermalParams{3.0, 0.0},
        SqueezedThermalParams{std::cosh(2.0), 1.0}, SqueezedThermalParams{1.5, 1.8}}) {
    const ReverseOptimum opt = z_min_exact(params, gamma);
    const KktCertificate cert = kkt_certificate(opt, params, gamma);
    CHECK(cert.duality_gap <= 1e-10 * gamma);
    CHECK(cert.slackness <= 1e-8);
    CHECK(cert.primal_margin >= -1e-8 * (1.0 + opt.z_min));
    CHECK(cert.dual_min_eig >= -tol::psd);
    for (double res : cert.trace_residual) CHECK(res <= 1e-10);
    CHECK(cert.align_offdiag == 0.0);
    CHECK(cert.align_ratio <= 1e-14);
  }
}

TEST_CASE("zero-cost boundary is exactly the curve cosh(2r) = nu") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> r_dist(0.05, 2.0);
  for (int trial = 0; trial < 60; ++trial) {
    const double r = r_dist(rng);
    const double nu = std::cosh(2.0 * r);
    CHECK(z_min_exact({nu, r}, 1.0).z_min <= 1e-12);
    CHECK(z_min_exact({nu + 1e-3, r}, 1.0).z_min > 0.0);
    CHECK(z_min_exact({std::max(1.0, nu - 1e-3), r}, 1.0).z_min > 0.0);
  }
}

TEST_CASE("branch asymmetry ratio") {
  const double delta = 1e-3;
  for (double nu : {1.5, 3.0, 10.0}) {
    const double z_hi = z_min_exact({nu, 0.5 * std::acosh(nu * (1.0 + delta))}, 1.0).z_min;
    const double z_lo = z_min_exact({nu, 0.5 * std::acosh(nu * (1.0 - delta))}, 1.0).z_min;
    CHECK(rel_diff(z_hi / z_lo, (nu + 1.0) / (nu - 1.0)) < 1e-9);
  }
}

TEST_CASE("scalar block optimum") {
  const ScalarBlockOptimum zero = scalar_block_optimum(0.0, 2.0);
  CHECK(zero.c == 0.0);
  CHECK(zero.z == 0.0);

  // s > 0 branch at nu = 3, x = 1/3 reproduces the thermal optimum
  const double gamma = 1.0;
  const double s = 2.0 * gamma * 3.0 * (1.0 - 1.0 / 3.0);
  CHECK(rel_diff(s, 4.0 * gamma) < 1e-15);
  const ScalarBlockOptimum block = scalar_block_optimum(s, 3.0);
  CHECK(rel_diff(block.c, gamma) < 1e-14);
  CHECK(rel_diff(block.z, 2.0 * gamma / 3.0) < 1e-14);

  CHECK_THROWS_AS(scalar_block_optimum(-0.3, 1.0), divergence_error);
  CHECK_THROWS_AS(scalar_block_optimum(0.3, 0.8), std::invalid_argument);
}

TEST_CASE("scalar block reproduces the closed form via s = 2 gamma nu (1 - x)") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> nu_dist(1.05, 9.0);
  std::uniform_real_distribution<double> r_dist(0.0, 1.8);
  for (int trial = 0; trial < 50; ++trial) {
    const SqueezedThermalParams params{nu_dist(rng), r_dist(rng)};
    const double gamma = 1.0;
    const double s = 2.0 * gamma * params.nu * (1.0 - params.x());
    CHECK(rel_diff(scalar_block_optimum(s, params.nu).z, z_min_exact(params, gamma).z_min) <
          1e-12);
  }
}

TEST_CASE("petz reverse: entries, cost, gap") {
  const double gamma = 1.0;

  SUBCASE("unsqueezed thermal nu = 3") {
    const PetzReverse petz = petz_cost({3.0, 0.0}, gamma);
    CHECK(test::max_abs(petz.d - gamma * Matrix2d::Identity()) < 1e-14);
    CHECK(rel_diff(petz.z, 2.0 / 3.0) < 1e-14);
    // the alternative contraction disagrees here; entrywise value is the one
    // consistent with the exact gap law
    CHECK(rel_diff(petz.z_alt_closed_form, -4.0 / 3.0) < 1e-13);
    CHECK(std::abs(petz.z - z_min_exact({3.0, 0.0}, gamma).z_min) < 1e-14);
  }

  SUBCASE("gap formula on both branches") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> nu_dist(1.05, 10.0);
    std::uniform_real_distribution<double> r_dist(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
      const SqueezedThermalParams params{nu_dist(rng), r_dist(rng)};
      const double gap = petz_cost(params, gamma).z - z_min_exact(params, gamma).z_min;
      CHECK(std::abs(gap - petz_gap_formula(params, gamma)) < 1e-10 * gamma);
      CHECK(gap >= -1e-12);
    }
  }

  SUBCASE("frozen gap at nu = 3, r = 1") {
    const double gap = petz_cost({3.0, 1.0}, gamma).z - z_min_exact({3.0, 1.0}, gamma).z_min;
    CHECK(rel_diff(gap, std::cosh(2.0) + 1.0) < 1e-13);
  }

  CHECK_THROWS_AS(petz_cost({1.0, 0.5}, gamma), divergence_error);
}

TEST_CASE("isotropic optimum") {
  const double gamma = 1.0;

  const IsotropicOptimum boundary = isotropic_optimum({std::cosh(2.0), 1.0}, gamma);
  CHECK(boundary.feasible);
  CHECK(std::abs(boundary.c) < 1e-14);
  CHECK(std::abs(boundary.z) < 1e-14);

  const IsotropicOptimum thermal = isotropic_optimum({3.0, 0.0}, gamma);
  CHECK(thermal.feasible);
  CHECK(rel_diff(thermal.z, 2.0 / 3.0) < 1e-14);

  CHECK_FALSE(isotropic_optimum({3.0, 1.0}, gamma).feasible);
}

TEST_CASE("isotropic repair: minimal c is CP-marginal below threshold") {
  // Independent feasibility check of the reported (c, z): M = c I + i (Tr K) sigma
  // with Tr K = 2 gamma (1 - x) - z/2 must be marginally PSD.
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> nu_dist(1.2, 8.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double nu = nu_dist(rng);
    const double r = 0.45 * std::acosh(nu);  // keeps x < 1
    const SqueezedThermalParams params{nu, r};
    const IsotropicOptimum iso = isotropic_optimum(params, 1.0);
    REQUIRE(iso.feasible);
    const double tau = 2.0 * (1.0 - params.x()) - 0.5 * iso.z;
    CHECK(std::abs(iso.c - std::abs(tau)) < 1e-12);
  }
}

TEST_CASE("isotropic-target benchmark") {
  const GkpBenchmark trivial = gkp_benchmark(0.0, 1.0);
  CHECK(trivial.d_opt_rate == 0.0);
  CHECK(trivial.amplification == 1.0);

  const GkpBenchmark one = gkp_benchmark(1.0, 1.0);
  CHECK(rel_diff(one.d_opt_rate, 1.0) < 1e-15);
  CHECK(rel_diff(one.amplification, 1.5) < 1e-15);

  // cross-check against the exact optimum at nu = 3 (nbar = 1): D_opt = gamma I
  const ReverseOptimum opt = z_min_exact({3.0, 0.0}, 1.0);
  CHECK(rel_diff(opt.d_opt(0, 0), one.d_opt_rate) < 1e-14);

  const GkpBenchmark large = gkp_benchmark(1e9, 1.0);
  CHECK(rel_diff(large.d_opt_rate, 2.0) < 1e-8);
  CHECK(rel_diff(large.amplification, 2.0) < 1e-8);

  CHECK_THROWS_AS(gkp_benchmark(-0.1, 1.0), std::invalid_argument);
}

TEST_CASE("protocol comparison: feasibility regimes and dominance") {
  const double gamma = 1.0;

  const ProtocolComparison below = compare_protocols({3.0, 0.2}, gamma);
  CHECK(below.bayes_feasible);
  CHECK(below.iso_feasible);
  CHECK(below.z_exact <= below.z_bayes + 1e-12);
  CHECK(below.z_exact <= below.z_iso + 1e-12);
  CHECK(below.z_exact <= below.z_petz + 1e-12);

  const ProtocolComparison above = compare_protocols({3.0, 1.5}, gamma);
  CHECK_FALSE(above.bayes_feasible);
  CHECK_FALSE(above.iso_feasible);
  CHECK(above.z_exact > 0.0);
  CHECK(above.petz_gap > 0.0);

  const double r_thr = 0.5 * std::acosh(3.0);
  CHECK(compare_protocols({3.0, r_thr}, gamma).z_exact < 1e-12);

  CHECK_THROWS_AS(compare_protocols({1.0, 0.0}, gamma), std::invalid_argument);
}
