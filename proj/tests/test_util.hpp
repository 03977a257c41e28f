#pragma once

#include <random>

#include "qrev/common.hpp"
#include "qrev/symplectic.hpp"

namespace qrev::test {

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

inline double max_abs(const Eigen::Ref<const MatrixXd>& m) { return m.cwiseAbs().maxCoeff(); }

inline double rel_norm_diff(const Eigen::Ref<const MatrixXd>& a,
                            const Eigen::Ref<const MatrixXd>& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline double symplectic_defect(const Eigen::Ref<const MatrixXd>& s) {
  const int n = static_cast<int>(s.rows()) / 2;
  const MatrixXd sigma = symplectic_form(n);
  return (s * sigma * s.transpose() - sigma).norm() / sigma.norm();
}

}  // namespace qrev::test
