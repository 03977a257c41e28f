#include "qrev/verify.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include <json.hpp>

#include "qrev/asymptotics.hpp"
#include "qrev/experiment.hpp"
#include "qrev/gaussian.hpp"
#include "qrev/moving_frame.hpp"
#include "qrev/random_gen.hpp"
#include "qrev/reverse_one_mode.hpp"
#include "qrev/sdp_oracle.hpp"
#include "qrev/symplectic.hpp"

namespace qrev {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

struct Ctx {
  const VerifyOptions& opt;
  std::vector<CheckResult> results;

  double gamma() const { return opt.gamma; }
  const VerifyThresholds& th() const { return opt.thresholds; }

  void add(const std::string& name, const std::string& subset, bool pass, double margin,
           const std::string& details) {
    results.push_back({name, subset, pass, margin, details});
  }
};

// ---------------------------------------------------------------- one-mode

void check_bayes_threshold(Ctx& c) {
  const double g = c.gamma();
  const int n_r = c.opt.quick ? 30 : 100;
  const int n_nu = c.opt.quick ? 30 : 100;
  const auto rs = linspace(0.0, 2.0, n_r);
  const auto nus = linspace(1.0, 12.0, n_nu);
  const double cell = nus[1] - nus[0];

  // The CP spectrum of the fixed-diffusion reverse is {4g x, 4g(1-x)} (the
  // trace of M is pinned to 4g by D = 2g I). The analytic margin 4g(1-x) is
  // therefore always an eigenvalue, the minimal one wherever x >= 1/2 -- in
  // particular in a band around the whole threshold curve -- and the minimum
  // eigenvalue changes sign exactly where the margin does.
  double worst_member = 0.0, worst_min = 0.0;
  int sign_violations = 0;
  for (double r : rs) {
    const double nu_star = std::cosh(2.0 * r);
    for (double nu : nus) {
      const SqueezedThermalParams params{nu, r};
      const double analytic = bayes_cp_margin(params, g);
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(cp_matrix(bayes_generator(params, g)),
                                                  Eigen::EigenvaluesOnly);
      const double lo = es.eigenvalues()[0];
      const double hi = es.eigenvalues()[1];
      worst_member = std::max(worst_member,
                              std::min(std::abs(analytic - lo), std::abs(analytic - hi)));
      if (params.x() >= 0.5) worst_min = std::max(worst_min, std::abs(analytic - lo));
      if (nu <= nu_star - cell && lo >= 0.0) ++sign_violations;
      if (nu >= nu_star + cell && lo <= 0.0) ++sign_violations;
    }
  }
  const double thr = c.th().bayes_margin * g;
  const bool pass = worst_member <= thr && worst_min <= thr && sign_violations == 0;
  c.add("bayes-threshold-grid", "one-mode", pass,
        sign_violations > 0 ? -static_cast<double>(sign_violations)
                            : thr - std::max(worst_member, worst_min),
        "margin vs spectrum: membership defect " + fmt(worst_member) +
            ", min-eig defect (x >= 1/2) " + fmt(worst_min) +
            ", sign flips off the curve: " + std::to_string(sign_violations));
}

void check_zero_cost_boundary(Ctx& c) {
  const double g = c.gamma();
  const int n = c.opt.quick ? 50 : 200;
  std::mt19937_64 rng(20260116);
  std::uniform_real_distribution<double> unif(0.02, 2.0);
  double worst_on = 0.0;
  double min_off = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double r = unif(rng);
    const double nu = std::cosh(2.0 * r);
    worst_on = std::max(worst_on, z_min_exact({nu, r}, g).z_min);
    for (double delta : {-1e-3, 1e-3}) {
      const double nu_off = std::max(1.0, nu + delta);
      min_off = std::min(min_off, z_min_exact({nu_off, r}, g).z_min);
    }
  }
  const double thr = c.th().boundary_zero * g;
  const bool pass = worst_on <= thr && min_off > 0.0;
  c.add("zero-cost-boundary", "one-mode", pass, thr - worst_on,
        "max Z on curve = " + fmt(worst_on) + ", min Z off curve = " + fmt(min_off));
}

void check_thermal_limit(Ctx& c) {
  const double g = c.gamma();
  double worst_ratio = 0.0;
  for (double nu : {100.0, 200.0, 500.0, 1000.0, 5000.0}) {
    const double z = z_min_exact({nu, 0.0}, g).z_min;
    worst_ratio = std::max(worst_ratio, std::abs(z * nu / (4.0 * g) - 1.0));
  }
  // The closed form itself, checked where the asymptotic ratio is still loose.
  double worst_exact = 0.0;
  for (double nu : {50.0, 100.0, 1000.0}) {
    const double z = z_min_exact({nu, 0.0}, g).z_min;
    const double formula = 4.0 * g * (nu - 1.0) / (nu * (nu + 1.0));
    worst_exact = std::max(worst_exact, std::abs(z - formula));
  }
  const bool pass = worst_ratio <= c.th().thermal_ratio && worst_exact <= 1e-13 * g;
  c.add("thermal-limit", "one-mode", pass, c.th().thermal_ratio - worst_ratio,
        "max |Z nu/(4 gamma) - 1| = " + fmt(worst_ratio) + " (nu >= 100), max formula defect = " +
            fmt(worst_exact));
}

void check_branch_asymmetry(Ctx& c) {
  const double g = c.gamma();
  const double delta = 1e-3;
  double worst = 0.0;
  for (double nu : {1.5, 3.0, 10.0}) {
    const double r_hi = 0.5 * std::acosh(nu * (1.0 + delta));
    const double r_lo = 0.5 * std::acosh(nu * (1.0 - delta));
    const double z_hi = z_min_exact({nu, r_hi}, g).z_min;
    const double z_lo = z_min_exact({nu, r_lo}, g).z_min;
    const double expected = (nu + 1.0) / (nu - 1.0);
    worst = std::max(worst, std::abs(z_hi / z_lo / expected - 1.0));
  }
  const bool pass = worst <= c.th().branch_ratio;
  c.add("branch-asymmetry", "one-mode", pass, c.th().branch_ratio - worst,
        "max relative ratio defect = " + fmt(worst) + " at delta = 1e-3");
}

void check_kkt(Ctx& c) {
  const double g = c.gamma();
  const int n = c.opt.quick ? 100 : 500;
  std::mt19937_64 rng(911823);
  std::uniform_real_distribution<double> r_dist(0.0, 2.0);
  std::uniform_real_distribution<double> nu_dist(1.05, 12.0);

  double worst_gap = 0.0, worst_slack = 0.0, worst_dual = 0.0, worst_align = 0.0;
  double worst_primal = 0.0, worst_dual_psd = 0.0;
  for (int i = 0; i < n; ++i) {
    const SqueezedThermalParams params{nu_dist(rng), r_dist(rng)};
    const ReverseOptimum opt = z_min_exact(params, g);
    const KktCertificate cert = kkt_certificate(opt, params, g);
    worst_gap = std::max(worst_gap, cert.duality_gap);
    worst_slack = std::max(worst_slack, cert.slackness);
    for (double res : cert.trace_residual) worst_dual = std::max(worst_dual, res);
    worst_align = std::max(worst_align, std::max(cert.align_offdiag, cert.align_ratio));
    worst_primal = std::max(worst_primal, -cert.primal_margin / std::max(1.0, opt.z_min));
    worst_dual_psd = std::max(worst_dual_psd, -cert.dual_min_eig);
  }
  const bool pass = worst_gap <= c.th().kkt_gap * g && worst_slack <= c.th().kkt_slack &&
                    worst_dual <= c.th().kkt_dualfeas && worst_align <= 1e-12 &&
                    worst_primal <= 1e-8 * g && worst_dual_psd <= tol::psd;
  c.add("kkt-certificates", "one-mode", pass, c.th().kkt_gap * g - worst_gap,
        "max gap = " + fmt(worst_gap) + ", max slack = " + fmt(worst_slack) +
            ", max dual residual = " + fmt(worst_dual) + ", max alignment = " + fmt(worst_align) +
            " over " + std::to_string(n) + " points");
}

void check_petz_gap(Ctx& c) {
  const double g = c.gamma();
  const int n = c.opt.quick ? 50 : 200;
  std::mt19937_64 rng(550911);
  std::uniform_real_distribution<double> r_dist(0.0, 2.0);
  std::uniform_real_distribution<double> nu_dist(1.05, 12.0);

  double worst_match = 0.0, worst_alt = 0.0;
  for (int i = 0; i < n; ++i) {
    const SqueezedThermalParams params{nu_dist(rng), r_dist(rng)};
    const PetzReverse petz = petz_cost(params, g);
    const double gap = petz.z - z_min_exact(params, g).z_min;
    worst_match = std::max(worst_match, std::abs(gap - petz_gap_formula(params, g)));
    worst_alt = std::max(worst_alt, std::abs(petz.z_alt_closed_form - petz.z));
  }
  double worst_zero = 0.0;
  for (int i = 0; i < 20; ++i) {
    const SqueezedThermalParams params{nu_dist(rng), 0.0};
    worst_zero = std::max(
        worst_zero, std::abs(petz_cost(params, g).z - z_min_exact(params, g).z_min));
  }
  const bool pass = worst_match <= c.th().petz_match * g && worst_zero <= c.th().petz_zero * g;
  c.add("petz-gap", "one-mode", pass, c.th().petz_match * g - worst_match,
        "max |gap - formula| = " + fmt(worst_match) + ", max gap at r=0: " + fmt(worst_zero) +
            "; alternative contraction deviates by up to " + fmt(worst_alt) +
            " (entrywise value authoritative)");
}

void check_protocol_dominance(Ctx& c) {
  const double g = c.gamma();
  const int n = c.opt.quick ? 50 : 200;
  std::mt19937_64 rng(777001);
  std::uniform_real_distribution<double> r_dist(0.0, 2.0);
  std::uniform_real_distribution<double> nu_dist(1.05, 12.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const SqueezedThermalParams params{nu_dist(rng), r_dist(rng)};
    const ProtocolComparison cmp = compare_protocols(params, g);
    if (cmp.bayes_feasible) worst = std::max(worst, cmp.z_exact - cmp.z_bayes);
    if (cmp.iso_feasible) worst = std::max(worst, cmp.z_exact - cmp.z_iso);
    worst = std::max(worst, cmp.z_exact - cmp.z_petz);
  }
  const bool pass = worst <= 1e-10 * g;
  c.add("protocol-dominance", "one-mode", pass, 1e-10 * g - worst,
        "max (z_exact - z_protocol) over feasible protocols = " + fmt(worst));
}

void check_experiment_overlay(Ctx& c) {
  double min_excess = std::numeric_limits<double>::infinity();
  std::string example;
  for (const ExperimentPoint& point : experiment_overlay()) {
    min_excess = std::min(min_excess, point.x() - 1.0);
    if (example.empty())
      example = point.label + " (" + fmt(point.s_db) + "/" + fmt(point.a_db) +
                " dB): r = " + fmt(point.r()) + ", nu = " + fmt(point.nu()) +
                ", cosh(2r)/nu = " + fmt(point.x());
  }
  const bool pass = experiment_overlay().size() == 5 && min_excess > 0.0;
  c.add("experiment-overlay", "one-mode", pass, min_excess,
        "all 5 points in the nu < cosh(2r) sector, min(cosh(2r)/nu - 1) = " + fmt(min_excess) +
            "; " + example);
}

// ------------------------------------------------------------------ oracle

void check_oracle(Ctx& c) {
  const double g = c.gamma();
  const int n_r = c.opt.quick ? 8 : 40;
  const int n_nu = c.opt.quick ? 8 : 40;
  const int rounds = c.opt.quick ? 30 : 48;
  const auto rs = linspace(0.0, 2.0, n_r);
  const auto nus = linspace(1.05, 12.0, n_nu);

  double worst_grid = 0.0, worst_bis = 0.0, worst_cross = 0.0;
  double worst_align = 0.0, worst_feas = 0.0;
  double worst_dual_excess = -std::numeric_limits<double>::infinity();
  bool dual_all_feasible = true;
  for (double r : rs) {
    for (double nu : nus) {
      const SqueezedThermalParams params{nu, r};
      const SdpInstance inst = SdpInstance::from_params(params, g);
      const double z_exact = z_min_exact(params, g).z_min;
      const double tolerance = std::max(c.th().oracle_abs * g, c.th().oracle_rel * z_exact);

      const OracleResult grid = solve_primal_grid(inst, 96, rounds);
      const OracleResult bis = solve_primal_bisection(inst, 1e-6 * g);
      worst_grid = std::max(worst_grid, std::abs(grid.z_opt - z_exact) / tolerance);
      worst_bis = std::max(worst_bis, std::abs(bis.z_opt - z_exact) / tolerance);
      worst_cross = std::max(worst_cross, std::abs(grid.z_opt - bis.z_opt) / (2.0 * tolerance));
      worst_feas = std::max(worst_feas, -grid.feasibility_margin);

      if (std::abs(params.x() - 1.0) > 0.05) {
        worst_align = std::max(worst_align, std::abs(grid.a / inst.v_q - grid.b / inst.v_p));
        worst_align = std::max(worst_align, std::abs(grid.c));
      }

      const DualReport dual = verify_dual(inst, z_min_exact(params, g).dual_witness);
      dual_all_feasible = dual_all_feasible && dual.feasible;
      worst_dual_excess = std::max(worst_dual_excess, dual.value - grid.z_opt);
    }
  }
  const bool agree_pass = worst_grid <= 1.0 && worst_bis <= 1.0 && worst_cross <= 1.0 &&
                          worst_feas <= tol::oracle;
  c.add("oracle-agreement", "oracle", agree_pass, 1.0 - std::max(worst_grid, worst_bis),
        "worst |z_oracle - z_exact| / tol: grid " + fmt(worst_grid) + ", bisection " +
            fmt(worst_bis) + ", cross " + fmt(worst_cross) + " on " + std::to_string(n_r) + "x" +
            std::to_string(n_nu) + " grid");

  const bool align_pass = worst_align <= c.th().oracle_align;
  c.add("oracle-alignment", "oracle", align_pass, c.th().oracle_align - worst_align,
        "max |a/v_q - b/v_p| and |c| of the grid argmin = " + fmt(worst_align) +
            " at interior points");

  const bool dual_pass = dual_all_feasible && worst_dual_excess <= c.th().oracle_abs * g;
  c.add("dual-witness-bounds", "oracle", dual_pass,
        c.th().oracle_abs * g - worst_dual_excess,
        std::string("closed-form witnesses ") +
            (dual_all_feasible ? "all dual feasible" : "NOT all dual feasible") +
            ", max (dual value - z_grid) = " + fmt(worst_dual_excess));
}

// --------------------------------------------------------------- multimode

MatrixXd random_product_state(std::mt19937_64& rng, int n_modes, double nu_lo, double nu_hi,
                              double r_hi) {
  std::uniform_real_distribution<double> nu_dist(nu_lo, nu_hi);
  std::uniform_real_distribution<double> r_dist(0.0, r_hi);
  MatrixXd gamma = MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k)
    gamma.block<2, 2>(2 * k, 2 * k) = squeezed_thermal({nu_dist(rng), r_dist(rng)});
  return gamma;
}

std::vector<double> probe_time_grid(double t_lo, double t_hi, double base_step,
                                    const std::vector<double>& probes, double delta) {
  std::vector<double> times;
  for (double t = t_lo; t <= t_hi + 1e-12; t += base_step) times.push_back(t);
  for (double p : probes)
    for (int k = -3; k <= 3; ++k) times.push_back(p + k * delta);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-13; }),
              times.end());
  return times;
}

int index_of_time(const std::vector<double>& times, double t) {
  const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-13);
  return static_cast<int>(it - times.begin());
}

void check_multimode_attainment(Ctx& c) {
  const double g = c.gamma();
  const int n_states = c.opt.quick ? 4 : 20;
  const int n_probes = c.opt.quick ? 4 : 12;
  std::mt19937_64 rng(0xA11CE5);

  double worst_cost = 0.0, worst_cp = 0.0, worst_match = 0.0;
  for (int s = 0; s < n_states; ++s) {
    const int n_modes = 2 + s % 3;
    MatrixXd gamma0 = random_product_state(rng, n_modes, 1.2, 3.5, 1.0);
    const MatrixXd t_gauge = random_symplectic(n_modes, rng, 0.35);
    gamma0 = t_gauge * gamma0 * t_gauge.transpose();
    gamma0 = 0.5 * (gamma0 + gamma0.transpose()).eval();

    const std::vector<double> probes = linspace(0.06, 1.9, n_probes);
    const std::vector<double> times =
        probe_time_grid(0.05 / g, 2.0 / g, (c.opt.quick ? 8e-3 : 2e-3) / g,
                        [&] {
                          std::vector<double> scaled = probes;
                          for (double& p : scaled) p /= g;
                          return scaled;
                        }(),
                        1e-4 / g);
    const MovingFrame frame = build_moving_frame(gamma0, g, times);

    for (double p : probes) {
      const int idx = index_of_time(times, p / g);
      const MultimodeOptimum opt = multimode_optimum(frame, idx);
      const double direct = cost_Z(opt.D, frame.covariance_at(idx));
      worst_cost = std::max(worst_cost, std::abs(direct - opt.total) / std::max(1e-30, opt.total));
      worst_cp = std::max(worst_cp, -opt.cp_margin);
      worst_match = std::max(worst_match, opt.matching_residual);
    }
  }
  const bool pass = worst_cost <= c.th().mm_cost && worst_cp <= c.th().mm_cp * g &&
                    worst_match <= c.th().mm_match;
  c.add("multimode-attainment", "multimode", pass, c.th().mm_match - worst_match,
        "worst relative cost defect = " + fmt(worst_cost) + ", worst CP deficit = " +
            fmt(worst_cp) + ", worst matching residual = " + fmt(worst_match) + " over " +
            std::to_string(n_states) + " random states");
}

MatrixXd embed_unitary_gauge(const Eigen::Matrix2cd& u) {
  MatrixXd t(4, 4);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      t(2 * j, 2 * k) = u(j, k).real();
      t(2 * j, 2 * k + 1) = u(j, k).imag();
      t(2 * j + 1, 2 * k) = -u(j, k).imag();
      t(2 * j + 1, 2 * k + 1) = u(j, k).real();
    }
  return t;
}

// Two modes whose symplectic eigenvalues cross at t ~ 0.33/gamma, mixed by a
// symplectic-orthogonal beamsplitter. Orthogonality keeps the pure-loss path
// a rigid conjugation of the product path, so the crossing stays exact; a
// squeezing mix would lift it into an avoided crossing.
MatrixXd crossing_fixture() {
  MatrixXd gamma = MatrixXd::Zero(4, 4);
  gamma.block<2, 2>(0, 0) = squeezed_thermal({4.0, 0.3});
  gamma.block<2, 2>(2, 2) = squeezed_thermal({2.0, 1.2});
  Eigen::Matrix2cd u;
  const std::complex<double> im(0.0, 1.0);
  u << std::cos(0.5), std::sin(0.5) * std::exp(im * 0.7),
      -std::sin(0.5) * std::exp(-im * 0.7), std::cos(0.5);
  const MatrixXd t = embed_unitary_gauge(u);
  gamma = t * gamma * t.transpose();
  return 0.5 * (gamma + gamma.transpose()).eval();
}

void check_crossing_continuity(Ctx& c) {
  const double g = c.gamma();
  const MatrixXd gamma0 = crossing_fixture();

  // Locate the spectrum crossing of the tracked labels.
  const double step = 1e-3 / g;
  std::vector<double> times;
  for (double t = 0.2 / g; t <= 0.5 / g + 1e-12; t += step) times.push_back(t);
  const MovingFrame coarse = build_moving_frame(gamma0, g, times);
  double t_c = -1.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double d0 = coarse.nu[i][0] - coarse.nu[i][1];
    const double d1 = coarse.nu[i + 1][0] - coarse.nu[i + 1][1];
    if (d0 == 0.0 || (d0 > 0.0) != (d1 > 0.0)) {
      t_c = 0.5 * (times[i] + times[i + 1]);
      break;
    }
  }
  if (t_c < 0.0) {
    c.add("crossing-continuity", "multimode", false, -1.0,
          "fixture produced no spectrum crossing in [0.2, 0.5]/gamma");
    return;
  }

  const double fine_step = 5e-4 / g;
  std::vector<double> fine;
  for (double t = t_c - 0.03 / g; t <= t_c + 0.03 / g + 1e-12; t += fine_step)
    fine.push_back(t);
  const MovingFrame window = build_moving_frame(gamma0, g, fine);
  double max_jump = 0.0;
  for (std::size_t i = 0; i + 1 < fine.size(); ++i)
    max_jump = std::max(max_jump, (window.S[i + 1] - window.S[i]).norm());

  const double h = 1e-8 / g;
  const MovingFrame micro = build_moving_frame(gamma0, g, {t_c - h, t_c + h});
  const double left = total_cost(micro, 0);
  const double right = total_cost(micro, 1);
  const double cost_jump = std::abs(right - left);

  const bool pass = max_jump <= c.th().mm_jump * fine_step &&
                    cost_jump <= 1e-6 * std::max(1.0, std::abs(left));
  c.add("crossing-continuity", "multimode", pass, c.th().mm_jump * fine_step - max_jump,
        "crossing at t = " + fmt(t_c) + ", max frame jump " + fmt(max_jump) + " (allowed " +
            fmt(c.th().mm_jump * fine_step) + "), cost jump across crossing = " + fmt(cost_jump));
}

void check_kinematic_scaling(Ctx& c) {
  const double g = c.gamma();
  // Squeezing-mixed fixture: nonzero off-diagonal metric, so the identity
  // carries a genuine discretization signal (the rigid beamsplitter mix has
  // identically vanishing off-diagonal blocks).
  std::mt19937_64 rng(20240817);
  MatrixXd gamma0 = MatrixXd::Zero(4, 4);
  gamma0.block<2, 2>(0, 0) = squeezed_thermal({4.0, 0.3});
  gamma0.block<2, 2>(2, 2) = squeezed_thermal({2.0, 1.2});
  const MatrixXd mix = random_symplectic(2, rng, 0.4);
  gamma0 = mix * gamma0 * mix.transpose();
  gamma0 = 0.5 * (gamma0 + gamma0.transpose()).eval();

  auto residual_at = [&](double dt) {
    std::vector<double> times;
    for (double t = 0.1 / g; t <= 0.6 / g + 1e-12; t += dt / g) times.push_back(t);
    const MovingFrame frame = build_moving_frame(gamma0, g, times);
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < times.size(); ++i)
      worst = std::max(worst, kinematic_residual(frame, static_cast<int>(i)));
    return worst;
  };

  const double r1 = residual_at(0.04);
  const double r2 = residual_at(0.02);
  const bool pass = r2 <= c.th().kin_ratio * r1 && r1 > 1e-10;
  c.add("kinematic-scaling", "multimode", pass, c.th().kin_ratio - r2 / std::max(r1, 1e-300),
        "max off-diagonal residual: " + fmt(r1) + " at dt = 0.04/gamma, " + fmt(r2) +
            " at dt = 0.02/gamma (ratio " + fmt(r2 / std::max(r1, 1e-300)) + ")");
}

void check_gauge_invariance(Ctx& c) {
  const double g = c.gamma();
  MatrixXd base = MatrixXd::Zero(4, 4);
  base.block<2, 2>(0, 0) = squeezed_thermal({2.5, 0.4});
  base.block<2, 2>(2, 2) = squeezed_thermal({2.5, 0.9});

  std::mt19937_64 rng(31337);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Matrix2cd m;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) m(j, k) = std::complex<double>(gauss(rng), gauss(rng));
  const Eigen::HouseholderQR<Eigen::Matrix2cd> qr(m);
  const Eigen::Matrix2cd unitary = qr.householderQ();
  const MatrixXd gauge = embed_unitary_gauge(unitary);
  MatrixXd gauged = gauge * base * gauge.transpose();
  gauged = 0.5 * (gauged + gauged.transpose()).eval();

  std::vector<double> times = {0.1 / g, 0.3 / g, 0.7 / g};
  const MovingFrame f_base = build_moving_frame(base, g, times);
  const MovingFrame f_gauged = build_moving_frame(gauged, g, times);

  double worst_total = 0.0, worst_schur = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double z_base = total_cost(f_base, i);
    const double z_gauged = total_cost(f_gauged, i);
    worst_total = std::max(worst_total,
                           std::abs(z_base - z_gauged) / std::max(1.0, std::abs(z_base)));

    // Majorization direction: the eigenvalue route never undercuts the naive
    // diagonal scalars of an arbitrary admissible frame.
    const MatrixXd cov = f_gauged.covariance_at(i);
    const WilliamsonDecomposition dec = williamson(cov);
    const MatrixXd g_metric = (dec.S.transpose() * dec.S).inverse();
    double naive_sum = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double x_naive =
          0.5 * (g_metric(2 * k, 2 * k) + g_metric(2 * k + 1, 2 * k + 1)) / dec.nu[k];
      naive_sum += reverse_cost_min(x_naive, dec.nu[k], g);
    }
    worst_schur = std::max(worst_schur, naive_sum - z_gauged);
  }
  const bool pass = worst_total <= c.th().mm_gauge && worst_schur <= 1e-10 * g;
  c.add("gauge-invariance", "multimode", pass, c.th().mm_gauge - worst_total,
        "max relative total-cost change under a degenerate-cluster gauge = " + fmt(worst_total) +
            ", max naive-diagonal excess over the eigenvalue route = " + fmt(worst_schur));
}

// -------------------------------------------------------------- asymptotics

void check_endpoint_coefficient(Ctx& c) {
  const double g = c.gamma();
  double worst_c0 = 0.0, worst_point = 0.0;
  for (double r : {0.5, 1.0, 1.5}) {
    const EndpointAsymptotics curve =
        pure_endpoint_curve(r, g, log_spaced(1e-6 / g, 1e-4 / g, 81));
    worst_c0 = std::max(worst_c0, std::abs(curve.fitted_c0 - 2.0));
    const double tz = 1e-5 / g * pure_path_cost(r, g, 1e-5 / g);
    worst_point = std::max(worst_point, std::abs(tz - 2.0));
  }
  const bool pass = worst_c0 <= c.th().endpoint_c0 && worst_point <= 0.005 * 2.0;
  c.add("pure-endpoint-coefficient", "asymptotics", pass, c.th().endpoint_c0 - worst_c0,
        "max |fitted c0 - 2| = " + fmt(worst_c0) + " for r in {0.5, 1, 1.5}; max |t z - 2| at t = "
        "1e-5/gamma: " + fmt(worst_point));
}

void check_integrated_action(Ctx& c) {
  const double g = c.gamma();
  const double t_max = 1.0 / g;
  const std::vector<double> eps_list = {1e-6 / g, 1e-5 / g, 1e-4 / g, 1e-3 / g, 1e-2 / g};

  std::string detail;
  double worst_abs_r05 = 0.0, worst_var = 0.0;
  for (double r : {0.5, 1.0, 1.5}) {
    Matrix2d target = squeezed_thermal({1.0, r});
    const MovingFrame frame = build_moving_frame(
        target, g, log_spaced(0.99e-6 / g, t_max, 6 * 120 + 1), /*pure_endpoint=*/true);
    std::vector<double> remainders;
    for (double eps : eps_list)
      remainders.push_back(integrated_action(frame, eps, t_max) -
                           2.0 * std::log(t_max / eps));
    detail += "r=" + fmt(r) + ": remainders";
    for (double rem : remainders) detail += " " + fmt(rem);
    detail += "; ";
    for (double rem : remainders) {
      worst_var = std::max(worst_var, std::abs(rem - remainders.back()));
      if (r == 0.5) worst_abs_r05 = std::max(worst_abs_r05, std::abs(rem));
    }
  }
  const bool pass = worst_abs_r05 <= c.th().action_bound && worst_var <= c.th().action_bound;
  c.add("integrated-action", "asymptotics", pass, c.th().action_bound - worst_abs_r05,
        detail + "gate: |remainder| <= " + fmt(c.th().action_bound) +
            " at r=0.5 and remainder variation <= " + fmt(c.th().action_bound) + " for all r");
}

void check_fluctuation(Ctx& c) {
  const double g = c.gamma();
  const double t_max = 1.0 / g;
  double worst = 0.0;
  for (double r : {0.5, 0.75}) {
    const std::vector<double> eps_list = log_spaced(1e-6 / g, 1e-3 / g, 13);
    double su = 0.0, suu = 0.0, si = 0.0, sui = 0.0, n = 0.0;
    for (double eps : eps_list) {
      const double u = 0.5 * std::pow(std::log(t_max / eps), 2);
      const double integral = integrated_fluctuation(r, g, eps, t_max);
      su += u;
      suu += u * u;
      si += integral;
      sui += u * integral;
      n += 1.0;
    }
    const double slope = (n * sui - su * si) / (n * suu - su * su);
    worst = std::max(worst, std::abs(slope - 1.0));
  }
  const bool pass = worst <= c.th().fluc_slope;
  c.add("fluctuation-divergence", "asymptotics", pass, c.th().fluc_slope - worst,
        "max |slope - 1| of the integral vs ln(1/eps)^2/2 fit = " + fmt(worst) +
            " for r in {0.5, 0.75}");
}

using CheckFn = void (*)(Ctx&);

struct CheckEntry {
  const char* subset;
  CheckFn fn;
  const char* name;
};

constexpr CheckEntry kChecks[] = {
    {"one-mode", check_bayes_threshold, "bayes-threshold-grid"},
    {"one-mode", check_zero_cost_boundary, "zero-cost-boundary"},
    {"one-mode", check_thermal_limit, "thermal-limit"},
    {"one-mode", check_branch_asymmetry, "branch-asymmetry"},
    {"one-mode", check_kkt, "kkt-certificates"},
    {"one-mode", check_petz_gap, "petz-gap"},
    {"one-mode", check_protocol_dominance, "protocol-dominance"},
    {"one-mode", check_experiment_overlay, "experiment-overlay"},
    {"oracle", check_oracle, "oracle-agreement"},
    {"multimode", check_multimode_attainment, "multimode-attainment"},
    {"multimode", check_crossing_continuity, "crossing-continuity"},
    {"multimode", check_kinematic_scaling, "kinematic-scaling"},
    {"multimode", check_gauge_invariance, "gauge-invariance"},
    {"asymptotics", check_endpoint_coefficient, "pure-endpoint-coefficient"},
    {"asymptotics", check_integrated_action, "integrated-action"},
    {"asymptotics", check_fluctuation, "fluctuation-divergence"},
};

}  // namespace

void apply_threshold_override(VerifyThresholds& thresholds, const std::string& key,
                              double value) {
  static const std::map<std::string, double VerifyThresholds::*> table = {
      {"bayes.margin", &VerifyThresholds::bayes_margin},
      {"oracle.abs", &VerifyThresholds::oracle_abs},
      {"oracle.rel", &VerifyThresholds::oracle_rel},
      {"oracle.align", &VerifyThresholds::oracle_align},
      {"kkt.gap", &VerifyThresholds::kkt_gap},
      {"kkt.slack", &VerifyThresholds::kkt_slack},
      {"kkt.dualfeas", &VerifyThresholds::kkt_dualfeas},
      {"thermal.ratio", &VerifyThresholds::thermal_ratio},
      {"petz.match", &VerifyThresholds::petz_match},
      {"petz.zero", &VerifyThresholds::petz_zero},
      {"branch.ratio", &VerifyThresholds::branch_ratio},
      {"boundary.zero", &VerifyThresholds::boundary_zero},
      {"mm.cost", &VerifyThresholds::mm_cost},
      {"mm.cp", &VerifyThresholds::mm_cp},
      {"mm.match", &VerifyThresholds::mm_match},
      {"mm.jump", &VerifyThresholds::mm_jump},
      {"mm.gauge", &VerifyThresholds::mm_gauge},
      {"kin.ratio", &VerifyThresholds::kin_ratio},
      {"endpoint.c0", &VerifyThresholds::endpoint_c0},
      {"action.bound", &VerifyThresholds::action_bound},
      {"fluc.slope", &VerifyThresholds::fluc_slope},
  };
  const auto it = table.find(key);
  if (it == table.end())
    throw std::invalid_argument("unknown tolerance override '" + key + "'");
  thresholds.*(it->second) = value;
}

std::vector<std::string> threshold_keys() {
  return {"bayes.margin", "oracle.abs",  "oracle.rel", "oracle.align", "kkt.gap",
          "kkt.slack",    "kkt.dualfeas", "thermal.ratio", "petz.match", "petz.zero",
          "branch.ratio", "boundary.zero", "mm.cost",   "mm.cp",        "mm.match",
          "mm.jump",      "mm.gauge",    "kin.ratio",  "endpoint.c0",  "action.bound",
          "fluc.slope"};
}

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  Ctx ctx{options, {}};
  for (const CheckEntry& entry : kChecks) {
    if (options.subset != "all" && options.subset != entry.subset) continue;
    try {
      entry.fn(ctx);
    } catch (const std::exception& e) {
      ctx.add(entry.name, entry.subset, false, -1.0,
              std::string("check raised: ") + e.what());
    }
  }
  if (ctx.results.empty())
    throw std::invalid_argument("unknown verification subset '" + options.subset + "'");
  return ctx.results;
}

std::string verification_report_json(const VerifyOptions& options,
                                     const std::vector<CheckResult>& results) {
  nlohmann::ordered_json j;
  j["report"] = "qrev-verify";
  j["version"] = 1;
  j["gamma"] = options.gamma;
  j["subset"] = options.subset;
  j["quick"] = options.quick;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  bool all_pass = true;
  for (const CheckResult& r : results) {
    nlohmann::ordered_json c;
    c["name"] = r.name;
    c["subset"] = r.subset;
    c["pass"] = r.pass;
    c["margin"] = r.margin;
    c["details"] = r.details;
    checks.push_back(std::move(c));
    all_pass = all_pass && r.pass;
  }
  j["checks"] = std::move(checks);
  j["all_pass"] = all_pass;
  return j.dump(2) + "\n";
}

}  // namespace qrev
