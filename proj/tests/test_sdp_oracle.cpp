#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qrev/reverse_one_mode.hpp"
#include "qrev/sdp_oracle.hpp"
#include "test_util.hpp"

using namespace qrev;
using test::rel_diff;

TEST_CASE("instance assembly matches the reduced 2x2 pencil") {
  const SdpInstance inst = SdpInstance::from_params({3.0, 1.0}, 1.0);
  CHECK(rel_diff(inst.v_q * inst.v_p, 9.0) < 1e-13);
  CHECK(rel_diff(inst.x(), std::cosh(2.0) / 3.0) < 1e-14);

  for (const Matrix2cd& a : {inst.a1(), inst.a2(), inst.a3()})
    CHECK((a - a.adjoint()).norm() == 0.0);
  CHECK((inst.a0() - inst.a0().adjoint()).norm() == 0.0);
  CHECK(inst.a0()(0, 0) == std::complex<double>(0.0, 0.0));

  const double a = 0.7, b = 0.4, c = 0.2;
  const Matrix2cd m = inst.constraint_matrix(a, b, c);
  const double tau = 2.0 * (1.0 - inst.x()) - 0.5 * (a / inst.v_q + b / inst.v_p);
  CHECK(rel_diff(m(0, 0).real(), a) < 1e-14);
  CHECK(rel_diff(m(1, 1).real(), b) < 1e-14);
  CHECK(rel_diff(m(0, 1).real(), c) < 1e-14);
  CHECK(rel_diff(m(0, 1).imag(), tau) < 1e-13);
}

TEST_CASE("feasibility margin agrees with a full eigensolve") {
  const SdpInstance inst = SdpInstance::from_params({2.0, 0.8}, 1.3);
  for (double a : {0.0, 0.5, 2.0})
    for (double b : {0.0, 0.3, 1.7}) {
      const double closed = inst.feasibility_margin(a, b, 0.0);
      const double eig = min_eig_hermitian(inst.constraint_matrix(a, b, 0.0));
      CHECK(std::abs(closed - eig) < 1e-12);
    }
}

TEST_CASE("grid oracle reproduces the closed form") {
  const double gamma = 1.0;
  const std::vector<SqueezedThermalParams> cases = {
      {3.0, 0.0}, {3.0, 1.0}, {std::cosh(1.4), 0.7}, {8.0, 0.5}, {1.05, 2.0}};
  for (const auto& params : cases) {
    const SdpInstance inst = SdpInstance::from_params(params, gamma);
    const double z_exact = z_min_exact(params, gamma).z_min;
    const OracleResult res = solve_primal_grid(inst, 96, 48);
    REQUIRE(res.feasible_at_resolution);
    CHECK(std::abs(res.z_opt - z_exact) <= std::max(1e-4 * gamma, 1e-3 * z_exact));
    CHECK(res.feasibility_margin >= -tol::oracle);
    CHECK(rel_diff(res.z_opt, res.a / inst.v_q + res.b / inst.v_p) < 1e-12);
  }

  // frozen targets
  const OracleResult thermal =
      solve_primal_grid(SdpInstance::from_params({3.0, 0.0}, gamma), 96, 48);
  CHECK(std::abs(thermal.z_opt - 2.0 / 3.0) < 1e-4);
  const OracleResult squeezed =
      solve_primal_grid(SdpInstance::from_params({3.0, 1.0}, gamma), 96, 48);
  CHECK(std::abs(squeezed.z_opt - 0.5081304607224209) < 1e-4);
}

TEST_CASE("bisection oracle reproduces the closed form") {
  const double gamma = 1.0;
  for (const SqueezedThermalParams params :
       {SqueezedThermalParams{3.0, 0.0}, SqueezedThermalParams{3.0, 1.0},
        SqueezedThermalParams{std::cosh(2.0), 1.0}, SqueezedThermalParams{1.05, 2.0}}) {
    const SdpInstance inst = SdpInstance::from_params(params, gamma);
    const double z_exact = z_min_exact(params, gamma).z_min;
    const OracleResult res = solve_primal_bisection(inst, 1e-7);
    CHECK(std::abs(res.z_opt - z_exact) <= std::max(1e-4 * gamma, 1e-3 * z_exact));
  }
}

TEST_CASE("the two oracle methods agree with each other") {
  const double gamma = 1.0;
  for (double r : {0.0, 0.6, 1.4})
    for (double nu : {1.2, 3.0, 9.0}) {
      const SdpInstance inst = SdpInstance::from_params({nu, r}, gamma);
      const double zg = solve_primal_grid(inst, 96, 40).z_opt;
      const double zb = solve_primal_bisection(inst, 1e-7).z_opt;
      CHECK(std::abs(zg - zb) <= 2.0 * std::max(1e-4, 1e-3 * std::max(zg, zb)));
    }
}

TEST_CASE("refinement drives the argmin onto the covariance ray") {
  const SdpInstance inst = SdpInstance::from_params({3.0, 1.0}, 1.0);
  const OracleResult coarse = solve_primal_grid(inst, 96, 6);
  const OracleResult fine = solve_primal_grid(inst, 96, 48);
  const double mis_coarse = std::abs(coarse.a / inst.v_q - coarse.b / inst.v_p);
  const double mis_fine = std::abs(fine.a / inst.v_q - fine.b / inst.v_p);
  CHECK(mis_fine <= mis_coarse + 1e-12);
  CHECK(mis_fine <= 1e-5);
  CHECK(fine.c == 0.0);
}

TEST_CASE("oracle input validation") {
  const SdpInstance inst = SdpInstance::from_params({3.0, 0.0}, 1.0);
  CHECK_THROWS_AS(solve_primal_grid(inst, 32, 4), std::invalid_argument);
  CHECK_THROWS_AS(solve_primal_bisection(inst, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SdpInstance::from_variances(-1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("zero-cost point: D = 0 is feasible and both oracles find it") {
  const SdpInstance inst = SdpInstance::from_params({std::cosh(2.0), 1.0}, 1.0);
  CHECK(solve_primal_grid(inst, 96, 10).z_opt <= 1e-4);
  CHECK(solve_primal_bisection(inst, 1e-7).z_opt <= 1e-4);
}

TEST_CASE("pure nonclassical instance is reported, not solved") {
  // nu = 1 with squeezing: the SDP has no feasible point at any cost
  const SdpInstance inst = SdpInstance::from_params({1.0, 1.0}, 1.0);
  const OracleResult grid = solve_primal_grid(inst, 96, 10);
  CHECK_FALSE(grid.feasible_at_resolution);
  CHECK(grid.notes.find("cap") != std::string::npos);
  CHECK_THROWS_AS(solve_primal_bisection(inst, 1e-6), std::runtime_error);
}

TEST_CASE("dual verifier on the closed-form witnesses") {
  const double gamma = 1.0;

  SUBCASE("upper-branch witness at nu = 3, r = 1") {
    const SqueezedThermalParams params{3.0, 1.0};
    const SdpInstance inst = SdpInstance::from_params(params, gamma);
    const ReverseOptimum opt = z_min_exact(params, gamma);
    const DualReport report = verify_dual(inst, opt.dual_witness);
    CHECK(report.feasible);
    const double x = params.x();
    CHECK(rel_diff(report.value, 4.0 * gamma * (x - 1.0) / (3.0 - 1.0)) < 1e-12);
    CHECK(rel_diff(report.value, opt.z_min) < 1e-12);
  }

  SUBCASE("lower-branch witness at nu = 3, r = 0") {
    const SqueezedThermalParams params{3.0, 0.0};
    const SdpInstance inst = SdpInstance::from_params(params, gamma);
    const DualReport report = verify_dual(inst, z_min_exact(params, gamma).dual_witness);
    CHECK(report.feasible);
    CHECK(rel_diff(report.value, 2.0 / 3.0) < 1e-12);
  }

  SUBCASE("zero matrix is PSD but violates the trace constraints") {
    const SdpInstance inst = SdpInstance::from_params({3.0, 0.0}, gamma);
    const DualReport report = verify_dual(inst, Matrix2cd::Zero());
    CHECK_FALSE(report.feasible);
    CHECK(report.psd_margin == 0.0);
    CHECK(report.value == 0.0);
    CHECK(report.trace_residual[0] > 0.0);
    CHECK(report.trace_residual[1] > 0.0);
  }

  SUBCASE("non-Hermitian input rejected") {
    const SdpInstance inst = SdpInstance::from_params({3.0, 0.0}, gamma);
    Matrix2cd bad;
    bad << 1.0, std::complex<double>(0.0, 1.0), std::complex<double>(0.0, 1.0), 1.0;
    CHECK_THROWS_AS(verify_dual(inst, bad), std::invalid_argument);
  }
}

TEST_CASE("weak duality holds numerically") {
  const double gamma = 1.0;
  for (double r : {0.2, 0.9, 1.7})
    for (double nu : {1.3, 4.0, 11.0}) {
      const SqueezedThermalParams params{nu, r};
      const SdpInstance inst = SdpInstance::from_params(params, gamma);
      const DualReport dual = verify_dual(inst, z_min_exact(params, gamma).dual_witness);
      REQUIRE(dual.feasible);
      const double z_grid = solve_primal_grid(inst, 96, 40).z_opt;
      CHECK(dual.value <= z_grid + 1e-4 * gamma);
    }
}
