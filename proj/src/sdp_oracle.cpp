#include "qrev/sdp_oracle.hpp"

#include <algorithm>
#include <thread>
#include <vector>

#include "qrev/gaussian.hpp"

namespace qrev {

namespace {

constexpr const char* kCZeroNote =
    "c = 0 restriction: det M = ab - c^2 - tau^2 and tau does not depend on c, "
    "so nonzero c only shrinks the feasible set; the search runs in (a, b).";

double min_eig_2x2(double p, double q, double re, double im2) {
  // Hermitian [[p, re + i*sqrt(im2-ish)], ...] handled via |w|^2 = re^2 + im2
  const double half_diff = 0.5 * (p - q);
  return 0.5 * (p + q) - std::sqrt(half_diff * half_diff + re * re + im2);
}

struct GridBest {
  double z = std::numeric_limits<double>::infinity();
  double a_hat = 0.0;  // a / v_q
  double b_hat = 0.0;  // b / v_p
  bool found = false;
};

bool better(const GridBest& lhs, const GridBest& rhs) {
  if (!rhs.found) return lhs.found;
  if (!lhs.found) return false;
  if (lhs.z != rhs.z) return lhs.z < rhs.z;
  if (lhs.a_hat != rhs.a_hat) return lhs.a_hat < rhs.a_hat;
  return lhs.b_hat < rhs.b_hat;
}

}  // namespace

SdpInstance SdpInstance::from_variances(double v_q, double v_p, double gamma) {
  if (v_q <= 0.0 || v_p <= 0.0)
    throw std::invalid_argument("SdpInstance: variances must be positive");
  SdpInstance inst;
  inst.v_q = v_q;
  inst.v_p = v_p;
  inst.gamma = gamma;
  return inst;
}

SdpInstance SdpInstance::from_params(const SqueezedThermalParams& params, double gamma) {
  return from_variances(params.nu * std::exp(2.0 * params.r),
                        params.nu * std::exp(-2.0 * params.r), gamma);
}

Matrix2cd SdpInstance::a0() const {
  const std::complex<double> im(0.0, 1.0);
  Matrix2cd m = Matrix2cd::Zero();
  m(0, 1) = 2.0 * gamma * (1.0 - x()) * im;
  m(1, 0) = -2.0 * gamma * (1.0 - x()) * im;
  return m;
}

Matrix2cd SdpInstance::a1() const {
  const std::complex<double> im(0.0, 1.0);
  Matrix2cd m;
  m << 1.0, -im / (2.0 * v_q), im / (2.0 * v_q), 0.0;
  return m;
}

Matrix2cd SdpInstance::a2() const {
  const std::complex<double> im(0.0, 1.0);
  Matrix2cd m;
  m << 0.0, -im / (2.0 * v_p), im / (2.0 * v_p), 1.0;
  return m;
}

Matrix2cd SdpInstance::a3() const {
  Matrix2cd m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix2cd SdpInstance::constraint_matrix(double a, double b, double c) const {
  return a0() + a * a1() + b * a2() + c * a3();
}

double SdpInstance::feasibility_margin(double a, double b, double c) const {
  const double t = tau(a, b);
  return min_eig_2x2(a, b, c, t * t);
}

OracleResult solve_primal_grid(const SdpInstance& inst, int grid_resolution,
                               int refinement_rounds) {
  if (grid_resolution < 64)
    throw std::invalid_argument("solve_primal_grid: resolution must be >= 64");
  if (refinement_rounds < 0)
    throw std::invalid_argument("solve_primal_grid: refinement_rounds must be >= 0");

  OracleResult result;
  result.method = OracleMethod::grid;
  result.notes = kCZeroNote;

  // The search runs in the scaled variables (a/v_q, b/v_p) so both axes carry
  // the natural cost scale; a square bracket in raw (a, b) puts the feasible
  // strip below one grid cell for strongly squeezed targets.
  auto margin_hat = [&](double a_hat, double b_hat) {
    const double t = 2.0 * inst.gamma * (1.0 - inst.x()) - 0.5 * (a_hat + b_hat);
    return min_eig_2x2(a_hat * inst.v_q, b_hat * inst.v_p, 0.0, t * t);
  };

  auto scan_window = [&](double a_lo, double a_hi, double b_lo, double b_hi) {
    const int n = grid_resolution;
    const double da = (a_hi - a_lo) / (n - 1);
    const double db = (b_hi - b_lo) / (n - 1);
    std::vector<GridBest> row_best(n);
    auto run_rows = [&](int first, int last) {
      for (int i = first; i < last; ++i) {
        const double a_hat = a_lo + i * da;
        GridBest best;
        for (int j = 0; j < n; ++j) {
          const double b_hat = b_lo + j * db;
          if (margin_hat(a_hat, b_hat) < -tol::oracle) continue;
          GridBest cand{a_hat + b_hat, a_hat, b_hat, true};
          if (better(cand, best)) best = cand;
        }
        row_best[i] = best;
      }
    };
    const int hw = std::max(1u, std::thread::hardware_concurrency());
    const int n_threads = std::min<int>(hw, n);
    std::vector<std::thread> pool;
    const int chunk = (n + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back(run_rows, t * chunk, std::min(n, (t + 1) * chunk));
    for (auto& th : pool) th.join();
    GridBest best;
    for (const auto& rb : row_best)
      if (better(rb, best)) best = rb;  // sequential merge keeps reduction deterministic
    return best;
  };

  const double bracket0 = 8.0 * inst.gamma * std::max(1.0, inst.x());
  double bracket = bracket0;
  GridBest incumbent;
  while (true) {
    incumbent = scan_window(0.0, bracket, 0.0, bracket);
    if (incumbent.found) break;
    if (bracket >= 1024.0 * bracket0) {
      result.feasible_at_resolution = false;
      result.notes += " No feasible grid point within the bracket cap.";
      return result;
    }
    bracket *= 4.0;
  }

  double half_a = 0.5 * bracket;
  double half_b = 0.5 * bracket;
  const int zoom_rounds = std::min(refinement_rounds, 20);
  for (int round = 0; round < zoom_rounds; ++round) {
    half_a *= 0.5;
    half_b *= 0.5;
    const double a_lo = std::max(0.0, incumbent.a_hat - half_a);
    const double b_lo = std::max(0.0, incumbent.b_hat - half_b);
    GridBest refined = scan_window(a_lo, a_lo + 2.0 * half_a, b_lo, b_lo + 2.0 * half_b);
    if (better(refined, incumbent)) incumbent = refined;
  }

  // Zooming pins the value but not the position: near the optimum the
  // boundary is parabola-flat, so feasible lattice points within value noise
  // scatter over a sqrt-sized lens. Finish with exact line solves of the
  // binding constraint in the rotated coordinates z = a^ + b^, d = a^ - b^:
  // for fixed d the smallest feasible z is the largest root of
  //   (nu^2 - 1)/4 z^2 + T z - (T^2 + nu^2 d^2 / 4) = 0,  T = 2 gamma (1 - x),
  // clipped at z >= |d|, and that root is convex in d. Golden-section over d
  // then locates the minimizer to roundoff flatness.
  if (refinement_rounds > zoom_rounds) {
    const double nu2 = inst.v_q * inst.v_p;
    const double t_const = 2.0 * inst.gamma * (1.0 - inst.x());
    const double qa = 0.25 * (nu2 - 1.0);
    const double disc0 = t_const * t_const + 4.0 * qa * t_const * t_const;
    const double s0 = std::sqrt(disc0);
    const bool quadratic = qa > 1e-14;
    if (!quadratic && t_const <= 0.0) {
      result.feasible_at_resolution = incumbent.found;
      result.z_opt = incumbent.z;
      result.a = incumbent.a_hat * inst.v_q;
      result.b = incumbent.b_hat * inst.v_p;
      result.feasibility_margin = inst.feasibility_margin(result.a, result.b, 0.0);
      return result;
    }
    // Binding root at fixed d, split as z0 + psi(d) with psi evaluated
    // cancellation-free; the minimization runs on the shifted objective
    // max(psi, |d| - z0) so it resolves the flat minimum to roundoff instead
    // of stalling where z0 + psi rounds to z0.
    const double z0 = quadratic ? (-t_const + s0) / (2.0 * qa) : t_const;
    auto psi = [&](double d) {
      if (quadratic) {
        const double sd = std::sqrt(disc0 + qa * nu2 * d * d);
        return 0.5 * nu2 * d * d / (sd + s0);
      }
      return 0.25 * nu2 * d * d / t_const;
    };
    auto shifted = [&](double d) { return std::max(psi(d), std::abs(d) - z0); };

    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = -bracket, hi = bracket;
    double d1 = hi - golden * (hi - lo), d2 = lo + golden * (hi - lo);
    double f1 = shifted(d1), f2 = shifted(d2);
    for (int it = 0; it < 220; ++it) {
      if (f1 <= f2) {
        hi = d2;
        d2 = d1;
        f2 = f1;
        d1 = hi - golden * (hi - lo);
        f1 = shifted(d1);
      } else {
        lo = d1;
        d1 = d2;
        f1 = f2;
        d2 = lo + golden * (hi - lo);
        f2 = shifted(d2);
      }
    }
    const double d_best = f1 <= f2 ? d1 : d2;
    const double z_best = std::max(z0 + psi(d_best), std::abs(d_best));
    GridBest line{z_best, 0.5 * (z_best + d_best), 0.5 * (z_best - d_best), true};
    // Lattice points sit up to tol::oracle outside the exact feasible set and
    // can undercut the true optimum by that slack times the constraint
    // sensitivity. Within the oracle's value-tolerance class (1e-4 gamma
    // absolute, 1e-3 relative) candidates are equivalent, so the exactly
    // feasible line solution is the one reported.
    const double slack = 0.5 * std::max(1e-4 * inst.gamma, 1e-3 * std::abs(z_best));
    if (better(line, incumbent) || line.z <= incumbent.z + slack) incumbent = line;
  }

  result.z_opt = incumbent.z;
  result.a = incumbent.a_hat * inst.v_q;
  result.b = incumbent.b_hat * inst.v_p;
  result.c = 0.0;
  result.feasibility_margin = inst.feasibility_margin(result.a, result.b, result.c);
  return result;
}

OracleResult solve_primal_bisection(const SdpInstance& inst, double tol_z) {
  if (tol_z <= 0.0) throw std::invalid_argument("solve_primal_bisection: tol must be positive");

  OracleResult result;
  result.method = OracleMethod::bisection;
  result.notes = std::string(
                     "Level-set feasibility: Z is feasible iff max ab over the segment "
                     "a/v_q + b/v_p = Z (dense sampling) reaches tau(Z)^2. ") +
                 kCZeroNote;

  const double nu2 = inst.v_q * inst.v_p;
  constexpr int kSegmentSamples = 2001;
  auto feasible = [&](double z) {
    const double t = 2.0 * inst.gamma * (1.0 - inst.x()) - 0.5 * z;
    double ab_max = 0.0;
    for (int i = 0; i < kSegmentSamples; ++i) {
      const double theta = static_cast<double>(i) / (kSegmentSamples - 1);
      ab_max = std::max(ab_max, theta * (1.0 - theta) * z * z * nu2);
    }
    // roundoff-scale slack only: a looser one would eventually accept any z
    // on infeasible (pure nonclassical) instances, where the deficit grows
    // linearly while the scale grows quadratically
    return ab_max - t * t >= -1e-12 * (ab_max + t * t) - 1e-300;
  };

  double z_lo = 0.0;
  if (feasible(z_lo)) {
    result.z_opt = 0.0;
    result.feasibility_margin = inst.feasibility_margin(0.0, 0.0, 0.0);
    return result;
  }
  double z_hi = std::max(inst.gamma, 4.0 * inst.gamma * std::abs(1.0 - inst.x()));
  const double z_cap = 1e10 * z_hi;
  while (!feasible(z_hi)) {
    z_hi *= 2.0;
    if (z_hi > z_cap)
      throw std::runtime_error(
          "solve_primal_bisection: no feasible upper bracket (instance is "
          "infeasible at every cost, e.g. a pure nonclassical target)");
  }
  while (z_hi - z_lo > tol_z) {
    const double mid = 0.5 * (z_lo + z_hi);
    (feasible(mid) ? z_hi : z_lo) = mid;
  }

  result.z_opt = z_hi;
  result.a = 0.5 * z_hi * inst.v_q;  // midpoint of the segment maximizes ab
  result.b = 0.5 * z_hi * inst.v_p;
  result.c = 0.0;
  result.feasibility_margin = inst.feasibility_margin(result.a, result.b, result.c);
  return result;
}

DualReport verify_dual(const SdpInstance& inst, const Matrix2cd& y) {
  if (hermiticity_defect(y) > tol::herm)
    throw std::invalid_argument("verify_dual: Y must be Hermitian");

  DualReport report;
  const double p = y(0, 0).real();
  const double q = y(1, 1).real();
  report.psd_margin = min_eig_2x2(p, q, y(0, 1).real(), y(0, 1).imag() * y(0, 1).imag());
  report.trace_residual[0] = std::abs((inst.a1() * y).trace().real() - 1.0 / inst.v_q);
  report.trace_residual[1] = std::abs((inst.a2() * y).trace().real() - 1.0 / inst.v_p);
  report.trace_residual[2] = std::abs((inst.a3() * y).trace().real());
  report.value = -(inst.a0() * y).trace().real();

  const double trace_tol = 1e-10;
  report.feasible = report.psd_margin >= -tol::psd &&
                    report.trace_residual[0] <= trace_tol &&
                    report.trace_residual[1] <= trace_tol && report.trace_residual[2] <= trace_tol;
  return report;
}

}  // namespace qrev
