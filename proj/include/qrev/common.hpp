#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace qrev {

using Eigen::Matrix2cd;
using Eigen::Matrix2d;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

// Shared numerical tolerances. Everything here is small dense linear algebra
// (2N <= ~20), so double precision leaves plenty of headroom.
namespace tol {
inline constexpr double symp = 1e-9;     // relative Frobenius, S sigma S^T = sigma
inline constexpr double recon = 1e-9;    // relative Frobenius, reconstruction checks
inline constexpr double psd = 1e-10;     // absolute, eigenvalue feasibility margins
inline constexpr double herm = 1e-12;    // relative, Hermiticity / symmetry checks
inline constexpr double posdef = 1e-12;  // absolute, positive-definite eigenvalue floor
inline constexpr double cluster = 1e-6;  // relative, symplectic-spectrum cluster width
inline constexpr double oracle = 1e-8;   // absolute, SDP oracle feasibility margin
}  // namespace tol

// Thrown where the reverse cost is infinite: pure nonclassical endpoints
// (nu = 1 with nonzero squeezing) and their scalar-block analogues.
class divergence_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline double frobenius(const Eigen::Ref<const MatrixXd>& m) { return m.norm(); }

// Relative symmetry defect, used by input validation throughout.
inline double symmetry_defect(const Eigen::Ref<const MatrixXd>& m) {
  return (m - m.transpose()).norm() / std::max(1.0, m.norm());
}

inline double hermiticity_defect(const Eigen::Ref<const MatrixXcd>& m) {
  return (m - m.adjoint()).norm() / std::max(1.0, m.norm());
}

}  // namespace qrev
