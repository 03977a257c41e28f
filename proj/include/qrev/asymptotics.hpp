#pragma once

#include <vector>

#include "qrev/common.hpp"

namespace qrev {

// Scalar data of the pure-loss trajectory started from the pure squeezed
// target diag(e^{2r}, e^{-2r}). The differences nu - 1 and x - 1 are carried
// in cancellation-free form so the small-t singularity can be evaluated to
// full precision.
struct PurePathPoint {
  double v_q = 1.0, v_p = 1.0;
  double nu = 1.0, x = 1.0;
  double nu_minus_1 = 0.0, x_minus_1 = 0.0;
};

PurePathPoint pure_path_point(double r, double gamma, double t);

// Exact optimal reverse cost along the pure-endpoint path.
double pure_path_cost(double r, double gamma, double t);

struct EndpointAsymptotics {
  double r = 0.0;
  double gamma = 1.0;
  std::vector<double> t;
  std::vector<double> z;
  std::vector<double> t_z;
  double fitted_c0 = 0.0;  // leading coefficient of t z(t), universal value 2
  double fitted_c1 = 0.0;
};

// Samples t z_min(t) along the pure-endpoint path and fits t z = c0 + c1 t by
// least squares over the smallest sampled decade.
EndpointAsymptotics pure_endpoint_curve(double r, double gamma, const std::vector<double>& t_grid);

// Inclusive log-spaced grid.
std::vector<double> log_spaced(double t_lo, double t_hi, int points);

// Default sampling for the endpoint curve: 40 points per decade, 6 decades
// down from t = 1e-1 / gamma.
std::vector<double> default_endpoint_grid(double gamma);

struct FluctuationRate {
  double nu = 0.0;
  double ell = 0.0;    // ln((nu+1)/(nu-1))
  double s_dot = 0.0;  // nu * ell / 2 * z
};

// One-mode fluctuation entropy rate associated with reverse cost z.
FluctuationRate fluctuation_rate(double nu, double z);

// Integral of the minimal fluctuation rate along the pure-endpoint path over
// [eps, t_max]; diverges like ln(1/eps)^2 / 2 as eps -> 0. Times are in units
// of 1/gamma and rates in units of gamma. Requires r > 0.
double integrated_fluctuation(double r, double gamma, double eps, double t_max,
                              int points_per_decade = 160);

}  // namespace qrev
