#pragma once

#include <string>
#include <vector>

#include "qrev/gaussian.hpp"

namespace qrev {

// Continuity-tracked moving Williamson frame along a pure-loss trajectory.
// Mode labels follow continuity, not sorted order: after a spectrum crossing,
// nu[i][k] keeps the identity of mode k, so per-mode series stay smooth.
struct MovingFrame {
  double gamma = 1.0;
  int n_modes = 0;
  MatrixXd gamma0;              // initial covariance, vacuum units
  std::vector<double> times;    // strictly increasing
  std::vector<MatrixXd> S;      // symplectic frame per instant
  std::vector<VectorXd> nu;     // symplectic spectrum per instant, label order
  std::vector<MatrixXd> W;      // frame velocity S^{-1} dS/dt, finite differences
  std::vector<MatrixXd> G;      // metric (S^T S)^{-1}
  std::vector<VectorXd> x_star; // canonical anti-squeezing data per instant
  std::vector<std::string> warnings;

  MatrixXd covariance_at(int t_index) const;
};

// Tracks the positive-branch eigenbasis of i Gamma_t^{1/2} sigma Gamma_t^{1/2}
// through the given time grid: maximal-overlap permutation matching, phase
// alignment, and a canonical rotation inside near-degenerate clusters. The
// step is bisected internally whenever the overlap matrix deviates too far
// from a permutation, so crossings do not produce frame jumps.
// If pure_endpoint is set, near-pure interior spectra are expected and the
// corresponding warning is suppressed.
MovingFrame build_moving_frame(const Eigen::Ref<const MatrixXd>& gamma0, double gamma,
                               const std::vector<double>& times, bool pure_endpoint = false);

// Near-degenerate cluster of the spectrum at one instant, with the complex
// Hermitian reduction of its metric block. Inside a cluster the canonical
// anti-squeezing data are the eigenvalues of h_over_nubar, not its diagonal.
struct ClusterResolution {
  std::vector<int> members;  // mode labels, |nu_i - nu_j| <= cluster width
  MatrixXcd h_over_nubar;
  VectorXd x_star;           // aligned with members
};

std::vector<ClusterResolution> resolve_clusters(const MovingFrame& frame, int t_index);

// Per-mode canonical scalars: Tr(G_kk)/(2 nu_k) for isolated modes, cluster
// eigenvalues inside degenerate clusters.
VectorXd canonical_x_star(const MovingFrame& frame, int t_index);

// Exact scalar reverse sources s_k = 2 gamma nu_k (1 - x_k*); equal to
// -d nu_k/dt along the forward path.
VectorXd scalar_sources(const MovingFrame& frame, int t_index);

// Complex canonical reduction of the commuting part of a real matrix made of
// 2x2 mode blocks: m(B)_{jk} = (B11 + B22)/2 + i (B21 - B12)/2 per block.
MatrixXcd commuting_complex_part(const Eigen::Ref<const MatrixXd>& m);

// Max over j != k of |(nu_k - nu_j) W^C_jk - 2 gamma G^C_jk|; vanishes up to
// discretization error for the tracked frame.
double kinematic_residual(const MovingFrame& frame, int t_index);

// Sum over modes of the exact scalar-block optima at this instant.
double total_cost(const MovingFrame& frame, int t_index);

struct MultimodeOptimum {
  VectorXd mode_cost;        // f_{nu_k}(x_k*)
  double total = 0.0;
  MatrixXd K;                // lab-frame drift
  MatrixXd D;                // lab-frame diffusion
  double cp_margin = 0.0;
  double matching_residual = 0.0;
};

// Blockwise intrinsic optimizer pushed back to the lab frame; attains the
// additive cost bound with equality and satisfies exact covariance matching.
// Requires every nu_k > 1 at the instant.
MultimodeOptimum multimode_optimum(const MovingFrame& frame, int t_index);

// Trapezoidal integral of the total optimal cost over [t_lo, t_hi]; the
// interval must lie inside the frame grid.
double integrated_action(const MovingFrame& frame, double t_lo, double t_hi);

}  // namespace qrev
