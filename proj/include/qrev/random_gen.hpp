#pragma once

#include <random>

#include "qrev/common.hpp"

namespace qrev {

// Random symplectic matrix exp(sigma * S) with S symmetric Gaussian of the
// given scale; larger scale means stronger squeezing / mode mixing.
MatrixXd random_symplectic(int n_modes, std::mt19937_64& rng, double scale = 0.3);

// Random symmetric positive definite matrix with log10 condition number
// uniform in [0, log10_cond_max].
MatrixXd random_spd(int dim, std::mt19937_64& rng, double log10_cond_max = 6.0);

// Random physical covariance T (diag nu_k I_2) T^T with nu_k uniform in
// [nu_min, nu_max] and T a random symplectic of the given scale.
MatrixXd random_physical_covariance(int n_modes, std::mt19937_64& rng, double nu_min = 1.0,
                                    double nu_max = 5.0, double scale = 0.3);

}  // namespace qrev
