#include "qrev/reverse_one_mode.hpp"

#include "qrev/symplectic.hpp"

namespace qrev {

namespace {

void validate(const SqueezedThermalParams& params) {
  if (params.nu < 1.0)
    throw std::invalid_argument("squeezed-thermal parameters: nu < 1 is unphysical");
}

GaussianGenerator to_generator(const Matrix2d& k, const Matrix2d& d, double gamma) {
  GaussianGenerator gen;
  gen.K = k;
  gen.D = d;
  gen.gamma = gamma;
  return gen;
}

}  // namespace

double reverse_cost_min(double x, double nu, double gamma) {
  if (nu < 1.0) throw std::invalid_argument("reverse_cost_min: nu < 1 is unphysical");
  if (x > 1.0) {
    if (nu <= 1.0)
      throw divergence_error("reverse_cost_min: pure nonclassical endpoint, cost diverges");
    return 4.0 * gamma * (x - 1.0) / (nu - 1.0);
  }
  if (x < 1.0) return 4.0 * gamma * (1.0 - x) / (nu + 1.0);
  return 0.0;
}

GaussianGenerator bayes_generator(const SqueezedThermalParams& params, double gamma) {
  validate(params);
  // Score-based reverse of the pure-loss flow: reversed drift plus the
  // diffusion-weighted score -Gamma0^{-1}, keeping the forward noise. This is
  // the drift that satisfies exact covariance matching at Gamma0; its CP
  // spectrum {4 gamma x, 4 gamma (1 - x)} is invariant under the overall
  // drift sign, so the threshold cosh(2r) <= nu is unaffected.
  const Matrix2d gamma0 = squeezed_thermal(params);
  Matrix2d k = gamma * Matrix2d::Identity();
  k(0, 0) -= 2.0 * gamma / gamma0(0, 0);
  k(1, 1) -= 2.0 * gamma / gamma0(1, 1);
  return to_generator(k, 2.0 * gamma * Matrix2d::Identity(), gamma);
}

double bayes_cp_margin(const SqueezedThermalParams& params, double gamma) {
  return 4.0 * gamma * (1.0 - params.x());
}

ReverseOptimum z_min_exact(const SqueezedThermalParams& params, double gamma) {
  validate(params);
  const double x = params.x();
  if (x > 1.0 && params.nu <= 1.0)
    throw divergence_error("z_min_exact: pure nonclassical endpoint, cost diverges");

  ReverseOptimum opt;
  opt.branch = (x > 1.0) ? 1 : (x < 1.0 ? -1 : 0);
  opt.z_min = reverse_cost_min(x, params.nu, gamma);

  const Matrix2d gamma0 = squeezed_thermal(params);
  const double v_q = gamma0(0, 0);
  const double v_p = gamma0(1, 1);
  opt.d_opt = 0.5 * opt.z_min * gamma0;

  opt.k_opt = Matrix2d::Zero();
  opt.k_opt(0, 0) = gamma * (1.0 - 1.0 / v_q) - opt.d_opt(0, 0) / (2.0 * v_q);
  opt.k_opt(1, 1) = gamma * (1.0 - 1.0 / v_p) - opt.d_opt(1, 1) / (2.0 * v_p);

  // Rank-one witness nu W_pm / (nu -+ 1) with W_pm = Gamma0^{-1} +- i sigma / nu.
  const double sign = (opt.branch > 0) ? 1.0 : -1.0;
  const double scale = params.nu / (params.nu - sign);
  const std::complex<double> im(0.0, 1.0);
  opt.dual_witness << scale / v_q, sign * im * scale / params.nu,
      -sign * im * scale / params.nu, scale / v_p;
  return opt;
}

KktCertificate kkt_certificate(const ReverseOptimum& opt, const SqueezedThermalParams& params,
                               double gamma) {
  const Matrix2d gamma0 = squeezed_thermal(params);
  const double v_q = gamma0(0, 0);
  const double v_p = gamma0(1, 1);
  const double x = params.x();
  const std::complex<double> im(0.0, 1.0);

  KktCertificate cert;
  const MatrixXcd m = cp_matrix(to_generator(opt.k_opt, opt.d_opt, gamma));
  cert.primal_margin = min_eig_hermitian(m);
  cert.dual_min_eig = min_eig_hermitian(opt.dual_witness);

  // Affine constraints of the dual problem, assembled from the target alone.
  Matrix2cd a1, a2, a3;
  a1 << 1.0, -im / (2.0 * v_q), im / (2.0 * v_q), 0.0;
  a2 << 0.0, -im / (2.0 * v_p), im / (2.0 * v_p), 1.0;
  a3 << 0.0, 1.0, 1.0, 0.0;
  Matrix2cd a0 = Matrix2cd::Zero();
  a0(0, 1) = 2.0 * gamma * (1.0 - x) * im;
  a0(1, 0) = -2.0 * gamma * (1.0 - x) * im;

  const Matrix2cd y = opt.dual_witness;
  cert.trace_residual[0] = std::abs((a1 * y).trace().real() - 1.0 / v_q);
  cert.trace_residual[1] = std::abs((a2 * y).trace().real() - 1.0 / v_p);
  cert.trace_residual[2] = std::abs((a3 * y).trace().real());
  cert.dual_value = -(a0 * y).trace().real();
  cert.duality_gap = std::abs(opt.z_min - cert.dual_value);

  const double denom = std::max(m.norm() * y.norm(), 1e-300);
  cert.slackness = (m * y).norm() / denom;

  cert.align_offdiag = std::abs(opt.d_opt(0, 1));
  cert.align_ratio = std::abs(opt.d_opt(0, 0) / v_q - opt.d_opt(1, 1) / v_p);
  return cert;
}

ScalarBlockOptimum scalar_block_optimum(double s, double nu) {
  if (nu < 1.0) throw std::invalid_argument("scalar_block_optimum: nu < 1 is unphysical");
  ScalarBlockOptimum block;
  if (s > 0.0) {
    block.c = s / (nu + 1.0);
    block.z = 2.0 * s / (nu * (nu + 1.0));
  } else if (s < 0.0) {
    if (nu <= 1.0)
      throw divergence_error("scalar_block_optimum: negative source at nu = 1 diverges");
    block.c = -s / (nu - 1.0);
    block.z = -2.0 * s / (nu * (nu - 1.0));
  }
  return block;
}

PetzReverse petz_cost(const SqueezedThermalParams& params, double gamma) {
  validate(params);
  if (params.nu <= 1.0)
    throw divergence_error("petz_cost: diffusion entries diverge at nu = 1");
  const double nu = params.nu;
  const double e2r = std::exp(2.0 * params.r);
  const double denom = nu * nu - 1.0;

  PetzReverse petz;
  petz.d = Matrix2d::Zero();
  petz.d(0, 0) = 2.0 * gamma * (nu - e2r) * (nu - e2r) / denom;
  petz.d(1, 1) = 2.0 * gamma * (nu - 1.0 / e2r) * (nu - 1.0 / e2r) / denom;
  const Matrix2d gamma0 = squeezed_thermal(params);
  petz.z = petz.d(0, 0) / gamma0(0, 0) + petz.d(1, 1) / gamma0(1, 1);
  petz.z_alt_closed_form = 4.0 * gamma / denom * (params.x() * (nu * nu + 1.0) - 2.0 * nu);
  return petz;
}

double petz_gap_formula(const SqueezedThermalParams& params, double gamma) {
  const double c2r = std::cosh(2.0 * params.r);
  if (params.x() <= 1.0) return 4.0 * gamma * (c2r - 1.0) / (params.nu - 1.0);
  return 4.0 * gamma * (c2r + 1.0) / (params.nu + 1.0);
}

IsotropicOptimum isotropic_optimum(const SqueezedThermalParams& params, double gamma) {
  validate(params);
  const double x = params.x();
  IsotropicOptimum iso;
  if (x > 1.0) return iso;  // c + tau = (1 - x)(2 gamma + c) < 0 for every c >= 0
  iso.feasible = true;
  iso.c = 2.0 * gamma * (1.0 - x) / (1.0 + x);
  iso.z = 2.0 * iso.c * x;
  return iso;
}

GkpBenchmark gkp_benchmark(double nbar, double gamma) {
  if (nbar < 0.0) throw std::invalid_argument("gkp_benchmark: nbar must be >= 0");
  GkpBenchmark bench;
  bench.d_opt_rate = 2.0 * gamma * nbar / (nbar + 1.0);
  bench.amplification = (2.0 * nbar + 1.0) / (nbar + 1.0);
  return bench;
}

ProtocolComparison compare_protocols(const SqueezedThermalParams& params, double gamma) {
  if (params.nu <= 1.0)
    throw std::invalid_argument("compare_protocols: requires a mixed target (nu > 1)");
  ProtocolComparison cmp;
  cmp.z_exact = z_min_exact(params, gamma).z_min;

  const double margin = bayes_cp_margin(params, gamma);
  cmp.bayes_feasible = margin >= -tol::psd * std::max(1.0, gamma);
  if (cmp.bayes_feasible) {
    const Matrix2d gamma0 = squeezed_thermal(params);
    cmp.z_bayes = 2.0 * gamma * (1.0 / gamma0(0, 0) + 1.0 / gamma0(1, 1));
  }

  const IsotropicOptimum iso = isotropic_optimum(params, gamma);
  cmp.iso_feasible = iso.feasible;
  cmp.z_iso = iso.z;

  cmp.z_petz = petz_cost(params, gamma).z;
  cmp.petz_gap = cmp.z_petz - cmp.z_exact;
  return cmp;
}

}  // namespace qrev
