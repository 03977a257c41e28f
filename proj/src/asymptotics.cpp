#include "qrev/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "qrev/reverse_one_mode.hpp"

namespace qrev {

PurePathPoint pure_path_point(double r, double gamma, double t) {
  if (t <= 0.0) throw std::invalid_argument("pure_path_point: t must be positive");
  const double eta = std::exp(-2.0 * gamma * t);
  const double one_minus_eta = -std::expm1(-2.0 * gamma * t);
  const double sh = std::sinh(r);
  const double cosh2r_minus_1 = 2.0 * sh * sh;

  PurePathPoint p;
  p.v_q = eta * std::exp(2.0 * r) + one_minus_eta;
  p.v_p = eta * std::exp(-2.0 * r) + one_minus_eta;
  // det - 1 and trace - 2 det in product form, free of cancellation
  const double det_minus_1 = 2.0 * eta * one_minus_eta * cosh2r_minus_1;
  const double det = 1.0 + det_minus_1;
  p.nu_minus_1 = det_minus_1 / (std::sqrt(det) + 1.0);
  p.nu = 1.0 + p.nu_minus_1;
  const double tr_minus_2det = 2.0 * eta * cosh2r_minus_1 * (1.0 - 2.0 * one_minus_eta);
  p.x_minus_1 = tr_minus_2det / (2.0 * det);
  p.x = 1.0 + p.x_minus_1;
  return p;
}

double pure_path_cost(double r, double gamma, double t) {
  const PurePathPoint p = pure_path_point(r, gamma, t);
  if (p.x_minus_1 > 0.0) {
    if (p.nu_minus_1 <= 0.0)
      throw divergence_error("pure_path_cost: pure nonclassical endpoint");
    return 4.0 * gamma * p.x_minus_1 / p.nu_minus_1;
  }
  return -4.0 * gamma * p.x_minus_1 / (p.nu + 1.0);
}

EndpointAsymptotics pure_endpoint_curve(double r, double gamma,
                                        const std::vector<double>& t_grid) {
  if (r <= 0.0)
    throw std::invalid_argument("pure_endpoint_curve: requires a squeezed target (r > 0)");
  if (t_grid.empty()) throw std::invalid_argument("pure_endpoint_curve: empty grid");

  EndpointAsymptotics out;
  out.r = r;
  out.gamma = gamma;
  for (double t : t_grid) {
    if (t <= 0.0) throw std::invalid_argument("pure_endpoint_curve: t must be positive");
    const double z = pure_path_cost(r, gamma, t);
    out.t.push_back(t);
    out.z.push_back(z);
    out.t_z.push_back(t * z);
  }

  // Least-squares fit t z = c0 + c1 t over the smallest sampled decade.
  const double t_min = *std::min_element(out.t.begin(), out.t.end());
  double sw = 0.0, st = 0.0, stt = 0.0, sy = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < out.t.size(); ++i) {
    if (out.t[i] > 10.0 * t_min) continue;
    sw += 1.0;
    st += out.t[i];
    stt += out.t[i] * out.t[i];
    sy += out.t_z[i];
    sty += out.t[i] * out.t_z[i];
  }
  const double denom = sw * stt - st * st;
  if (denom > 0.0) {
    out.fitted_c1 = (sw * sty - st * sy) / denom;
    out.fitted_c0 = (sy - out.fitted_c1 * st) / sw;
  } else {
    out.fitted_c0 = sy / sw;  // single sample point
    out.fitted_c1 = 0.0;
  }
  return out;
}

std::vector<double> log_spaced(double t_lo, double t_hi, int points) {
  if (!(t_lo > 0.0 && t_hi > t_lo) || points < 2)
    throw std::invalid_argument("log_spaced: bad range");
  std::vector<double> t(points);
  const double llo = std::log(t_lo);
  const double lhi = std::log(t_hi);
  for (int i = 0; i < points; ++i)
    t[i] = std::exp(llo + (lhi - llo) * i / (points - 1));
  t.front() = t_lo;
  t.back() = t_hi;
  return t;
}

std::vector<double> default_endpoint_grid(double gamma) {
  const int decades = 6;
  const int per_decade = 40;
  return log_spaced(1e-1 / gamma / std::pow(10.0, decades), 1e-1 / gamma,
                    decades * per_decade + 1);
}

FluctuationRate fluctuation_rate(double nu, double z) {
  if (nu <= 1.0)
    throw divergence_error("fluctuation_rate: ell(nu) diverges at nu = 1");
  FluctuationRate rate;
  rate.nu = nu;
  rate.ell = std::log((nu + 1.0) / (nu - 1.0));
  rate.s_dot = 0.5 * nu * rate.ell * z;
  return rate;
}

double integrated_fluctuation(double r, double gamma, double eps, double t_max,
                              int points_per_decade) {
  if (r <= 0.0)
    throw std::invalid_argument("integrated_fluctuation: r = 0 puts the path on nu = 1");
  if (!(eps > 0.0 && eps < t_max))
    throw std::invalid_argument("integrated_fluctuation: need 0 < eps < t_max");

  const int decades = static_cast<int>(std::ceil(std::log10(t_max / eps)));
  const int points = std::max(3, decades * points_per_decade + 1);
  const std::vector<double> grid = log_spaced(eps, t_max, points);

  auto rate_at = [&](double t) {
    const PurePathPoint p = pure_path_point(r, gamma, t);
    return fluctuation_rate(p.nu, pure_path_cost(r, gamma, t)).s_dot;
  };

  double integral = 0.0;
  double prev = rate_at(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = rate_at(grid[i]);
    integral += 0.5 * (prev + cur) * (grid[i] - grid[i - 1]);
    prev = cur;
  }
  return integral;
}

}  // namespace qrev
