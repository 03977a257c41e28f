#pragma once

#include "qrev/common.hpp"

namespace qrev {

// Canonical symplectic form: direct sum of n_modes copies of [[0,1],[-1,0]].
// Satisfies sigma^T = -sigma and sigma^2 = -I exactly.
MatrixXd symplectic_form(int n_modes);

// Symmetric positive-definite square root, computed by a symmetric
// eigendecomposition with per-eigenvalue square roots.
MatrixXd sqrt_spd(const Eigen::Ref<const MatrixXd>& m);

// Smallest eigenvalue of a complex Hermitian matrix; the single kernel
// behind every PSD feasibility check in the library.
double min_eig_hermitian(const Eigen::Ref<const MatrixXcd>& m);

// Positive-branch eigenpairs of H = i * R sigma R with R = Gamma^{1/2}.
// Column k of w is a unit eigenvector for nu[k] (ascending); the bilinear
// identity w_j^T w_k = 0 holds on the positive branch and is re-enforced
// when roundoff leaves a residue above 1e-10.
struct SymplecticEigenBasis {
  VectorXd nu;
  MatrixXcd w;
};
SymplecticEigenBasis symplectic_eigenbasis(const Eigen::Ref<const MatrixXd>& sqrt_gamma);

// Real Darboux matrix O = [x_1 y_1 ... x_N y_N] built from w_k = (x_k - i y_k)/sqrt(2),
// with the pair convention R sigma R x_k = -nu_k y_k.
MatrixXd darboux_matrix(const MatrixXcd& w);

struct WilliamsonDecomposition {
  MatrixXd S;   // symplectic, S Lambda S^T = Gamma with Lambda = diag(nu_k I_2)
  VectorXd nu;  // symplectic spectrum, sorted descending
};

// Williamson normal form via the Hermitian eigenproblem for i Gamma^{1/2} sigma Gamma^{1/2};
// S = Gamma^{1/2} O Lambda^{-1/2}.
WilliamsonDecomposition williamson(const Eigen::Ref<const MatrixXd>& gamma);

struct PhysicalityCheck {
  bool physical;
  double margin;  // min eig of Gamma + i sigma
};

// Uncertainty-relation check Gamma + i sigma >= 0 (vacuum units).
PhysicalityCheck is_physical_state(const Eigen::Ref<const MatrixXd>& gamma);

// diag(nu_1 I_2, ..., nu_N I_2)
MatrixXd williamson_diagonal(const Eigen::Ref<const VectorXd>& nu);

}  // namespace qrev
