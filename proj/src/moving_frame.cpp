#include "qrev/moving_frame.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "qrev/reverse_one_mode.hpp"
#include "qrev/symplectic.hpp"

namespace qrev {

namespace {

constexpr double kOverlapFloor = 0.8;  // below this the tracking step is bisected
constexpr int kMaxBisectDepth = 48;

struct TrackState {
  double t = 0.0;
  VectorXd nu;   // label order (continuity, not sorted)
  MatrixXcd w;   // eigenvector columns in label order
};

TrackState eigenstate_at(const MatrixXd& gamma0, double gamma, double t) {
  const MatrixXd g = pure_loss_path(gamma0, gamma, t);
  const SymplecticEigenBasis basis = symplectic_eigenbasis(sqrt_spd(g));
  TrackState st;
  st.t = t;
  st.nu = basis.nu;
  st.w = basis.w;
  return st;
}

// Permutation maximizing sum_j score(j, sigma(j)); exhaustive for the small
// mode counts handled here, greedy beyond that.
std::vector<int> best_assignment(const MatrixXd& score) {
  const int n = static_cast<int>(score.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (n <= 8) {
    std::vector<int> best = perm;
    double best_val = -1.0;
    std::vector<int> p = perm;
    std::sort(p.begin(), p.end());
    do {
      double val = 0.0;
      for (int j = 0; j < n; ++j) val += score(j, p[j]);
      if (val > best_val) {
        best_val = val;
        best = p;
      }
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
  }
  std::vector<bool> used(n, false);
  for (int j = 0; j < n; ++j) {
    int arg = -1;
    double best_val = -1.0;
    for (int k = 0; k < n; ++k)
      if (!used[k] && score(j, k) > best_val) {
        best_val = score(j, k);
        arg = k;
      }
    perm[j] = arg;
    used[arg] = true;
  }
  return perm;
}

// Groups of labels whose symplectic eigenvalues lie within the cluster width.
std::vector<std::vector<int>> cluster_labels(const VectorXd& nu) {
  const int n = static_cast<int>(nu.size());
  const double width = tol::cluster * nu.maxCoeff();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return nu[i] > nu[j]; });
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) {
    if (i == 0 || nu[order[i - 1]] - nu[order[i]] > width) clusters.emplace_back();
    clusters.back().push_back(order[i]);
  }
  return clusters;
}

std::complex<double> unit_phase(std::complex<double> z) {
  const double mag = std::abs(z);
  return mag > 1e-300 ? z / mag : std::complex<double>(1.0, 0.0);
}

// Rotate each near-degenerate cluster so the metric block is diagonal: the
// canonical gauge in which the anti-squeezing data live on the diagonal.
void canonical_cluster_rotation(const MatrixXd& gamma_inv, TrackState& st) {
  for (const auto& cluster : cluster_labels(st.nu)) {
    const int m = static_cast<int>(cluster.size());
    if (m < 2) continue;
    MatrixXcd h(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        h(a, b) = std::sqrt(st.nu[cluster[a]] * st.nu[cluster[b]]) *
                  (st.w.col(cluster[a]).adjoint() * gamma_inv * st.w.col(cluster[b]))(0, 0);
    h = 0.5 * (h + h.adjoint()).eval();
    double offdiag = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (a != b) offdiag = std::max(offdiag, std::abs(h(a, b)));
    if (offdiag <= 1e-9 * std::max(1.0, h.norm())) continue;  // already canonical

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
    MatrixXcd u = es.eigenvectors();
    // Keep the rotation as close to the identity as the eigenbasis allows so
    // persistent degeneracies do not churn the tracked frame.
    const std::vector<int> sigma = best_assignment(u.cwiseAbs2());
    MatrixXcd u_aligned(m, m);
    for (int a = 0; a < m; ++a)
      u_aligned.col(a) = u.col(sigma[a]) * std::conj(unit_phase(u(a, sigma[a])));
    MatrixXcd block(st.w.rows(), m);
    for (int a = 0; a < m; ++a) block.col(a) = st.w.col(cluster[a]);
    block = (block * u_aligned).eval();
    for (int a = 0; a < m; ++a) st.w.col(cluster[a]) = block.col(a);
  }
}

// Advance the tracked basis to to_t, bisecting internally when the overlap
// with the previous instant degrades.
void advance(TrackState& st, const MatrixXd& gamma0, double gamma, double to_t, int depth,
             std::vector<std::string>& warnings) {
  TrackState next = eigenstate_at(gamma0, gamma, to_t);
  const int n = static_cast<int>(st.nu.size());
  const MatrixXcd overlap = st.w.adjoint() * next.w;
  const std::vector<int> sigma = best_assignment(overlap.cwiseAbs2());
  double quality = 1.0;
  for (int j = 0; j < n; ++j) quality = std::min(quality, std::abs(overlap(j, sigma[j])));
  if (quality < kOverlapFloor) {
    if (depth < kMaxBisectDepth) {
      advance(st, gamma0, gamma, 0.5 * (st.t + to_t), depth + 1, warnings);
      advance(st, gamma0, gamma, to_t, depth + 1, warnings);
      return;
    }
    warnings.push_back("tracking overlap stayed below " + std::to_string(kOverlapFloor) +
                       " at t = " + std::to_string(to_t) + " despite bisection");
  }
  TrackState aligned;
  aligned.t = to_t;
  aligned.nu.resize(n);
  aligned.w.resize(st.w.rows(), n);
  for (int j = 0; j < n; ++j) {
    const int k = sigma[j];
    aligned.nu[j] = next.nu[k];
    aligned.w.col(j) = next.w.col(k) * std::conj(unit_phase(overlap(j, k)));
  }
  st = aligned;
}

MatrixXd assemble_frame(const MatrixXd& sqrt_gamma, const TrackState& st) {
  const int n = static_cast<int>(st.nu.size());
  const MatrixXd o = darboux_matrix(st.w);
  VectorXd inv_sqrt(2 * n);
  for (int k = 0; k < n; ++k) inv_sqrt[2 * k] = inv_sqrt[2 * k + 1] = 1.0 / std::sqrt(st.nu[k]);
  return sqrt_gamma * o * inv_sqrt.asDiagonal();
}

// Fornberg weights of the first derivative at x0 on arbitrarily spaced nodes.
std::vector<double> derivative_weights(const std::vector<double>& nodes, double x0) {
  const int n = static_cast<int>(nodes.size()) - 1;
  constexpr int m = 1;
  std::vector<std::array<double, m + 1>> c(n + 1, {0.0, 0.0});
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int j = 0; j <= n; ++j) w[j] = c[j][m];
  return w;
}

// Orthogonal projection onto the symplectic Lie algebra {W : W sigma symmetric}.
MatrixXd sp_project(const MatrixXd& w) {
  const int n = static_cast<int>(w.rows()) / 2;
  const MatrixXd sigma = symplectic_form(n);
  const MatrixXd p = w * sigma;
  return -0.5 * (p + p.transpose()) * sigma;
}

std::complex<double> block_reduce(const MatrixXd& m, int j, int k) {
  return {0.5 * (m(2 * j, 2 * k) + m(2 * j + 1, 2 * k + 1)),
          0.5 * (m(2 * j + 1, 2 * k) - m(2 * j, 2 * k + 1))};
}

}  // namespace

MatrixXd MovingFrame::covariance_at(int t_index) const {
  return pure_loss_path(gamma0, gamma, times.at(t_index));
}

MovingFrame build_moving_frame(const Eigen::Ref<const MatrixXd>& gamma0, double gamma,
                               const std::vector<double>& times, bool pure_endpoint) {
  if (times.empty()) throw std::invalid_argument("build_moving_frame: empty time grid");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (times[i + 1] <= times[i])
      throw std::invalid_argument("build_moving_frame: times must be strictly increasing");
  if (times.front() < 0.0) throw std::invalid_argument("build_moving_frame: negative time");

  MovingFrame frame;
  frame.gamma = gamma;
  frame.gamma0 = gamma0;
  frame.n_modes = static_cast<int>(gamma0.rows()) / 2;
  frame.times = times;

  TrackState st;
  try {
    st = eigenstate_at(gamma0, gamma, times.front());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("build_moving_frame: instant 0: " + std::string(e.what()));
  }
  if (times.front() == 0.0 && st.nu.minCoeff() <= 1.0)
    throw std::invalid_argument(
        "build_moving_frame: t = 0 requires strictly mixed initial state (all nu > 1)");

  // Canonical initial order: nu descending, stable.
  {
    const int n = static_cast<int>(st.nu.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return st.nu[i] > st.nu[j]; });
    VectorXd nu_sorted(n);
    MatrixXcd w_sorted(st.w.rows(), n);
    for (int k = 0; k < n; ++k) {
      nu_sorted[k] = st.nu[idx[k]];
      w_sorted.col(k) = st.w.col(idx[k]);
    }
    st.nu = nu_sorted;
    st.w = w_sorted;
  }

  bool warned_near_pure = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0) {
      try {
        advance(st, gamma0, gamma, times[i], 0, frame.warnings);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("build_moving_frame: instant " + std::to_string(i) + ": " +
                                 std::string(e.what()));
      }
    }
    const MatrixXd cov = pure_loss_path(gamma0, gamma, times[i]);
    const MatrixXd gamma_inv = cov.llt().solve(MatrixXd::Identity(cov.rows(), cov.cols()));
    canonical_cluster_rotation(gamma_inv, st);

    if (!pure_endpoint && !warned_near_pure &&
        st.nu.minCoeff() < 1.0 + tol::cluster) {
      frame.warnings.push_back("near-pure symplectic eigenvalue at t = " +
                               std::to_string(times[i]));
      warned_near_pure = true;
    }

    frame.S.push_back(assemble_frame(sqrt_spd(cov), st));
    frame.nu.push_back(st.nu);
    MatrixXd sts = frame.S.back().transpose() * frame.S.back();
    MatrixXd g = sts.inverse();
    frame.G.push_back(0.5 * (g + g.transpose()));
  }

  // Frame velocity by centered finite differences on the (possibly
  // non-uniform) grid: Fornberg weights over a window of up to three
  // neighbors per side, one-sided near the ends. The high order keeps the
  // truncation error negligible even where the frame turns quickly at narrow
  // avoided crossings.
  const int n_t = static_cast<int>(times.size());
  frame.W.resize(n_t);
  for (int i = 0; i < n_t; ++i) {
    MatrixXd ds = MatrixXd::Zero(frame.S[0].rows(), frame.S[0].cols());
    if (n_t > 1) {
      const int lo = std::max(0, std::min(i - 3, n_t - 7));
      const int hi = std::min(n_t - 1, lo + 6);
      std::vector<double> nodes(frame.times.begin() + lo, frame.times.begin() + hi + 1);
      const std::vector<double> w = derivative_weights(nodes, times[i]);
      for (std::size_t j = 0; j < w.size(); ++j) ds += w[j] * frame.S[lo + static_cast<int>(j)];
    }
    frame.W[i] = frame.S[i].partialPivLu().solve(ds);
  }

  for (int i = 0; i < n_t; ++i) frame.x_star.push_back(canonical_x_star(frame, i));
  return frame;
}

std::vector<ClusterResolution> resolve_clusters(const MovingFrame& frame, int t_index) {
  const VectorXd& nu = frame.nu.at(t_index);
  const MatrixXd& g = frame.G.at(t_index);
  std::vector<ClusterResolution> out;
  for (const auto& labels : cluster_labels(nu)) {
    ClusterResolution res;
    res.members = labels;
    const int m = static_cast<int>(labels.size());
    double nubar = 0.0;
    for (int a : labels) nubar += nu[a];
    nubar /= m;
    MatrixXcd h(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) h(a, b) = block_reduce(g, labels[a], labels[b]);
    h = (0.5 * (h + h.adjoint()) / nubar).eval();
    res.h_over_nubar = h;
    res.x_star.resize(m);
    if (m == 1) {
      res.x_star[0] = h(0, 0).real();
    } else {
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
      const std::vector<int> sigma = best_assignment(es.eigenvectors().cwiseAbs2());
      for (int a = 0; a < m; ++a) res.x_star[a] = es.eigenvalues()[sigma[a]];
    }
    out.push_back(std::move(res));
  }
  return out;
}

VectorXd canonical_x_star(const MovingFrame& frame, int t_index) {
  VectorXd x(frame.n_modes);
  for (const auto& cluster : resolve_clusters(frame, t_index))
    for (std::size_t a = 0; a < cluster.members.size(); ++a)
      x[cluster.members[a]] = cluster.x_star[static_cast<int>(a)];
  return x;
}

VectorXd scalar_sources(const MovingFrame& frame, int t_index) {
  const VectorXd& nu = frame.nu.at(t_index);
  const VectorXd& xs = frame.x_star.at(t_index);
  VectorXd s(frame.n_modes);
  for (int k = 0; k < frame.n_modes; ++k) s[k] = 2.0 * frame.gamma * nu[k] * (1.0 - xs[k]);
  return s;
}

MatrixXcd commuting_complex_part(const Eigen::Ref<const MatrixXd>& m) {
  const int n = static_cast<int>(m.rows()) / 2;
  MatrixXcd c(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) c(j, k) = block_reduce(m, j, k);
  return c;
}

double kinematic_residual(const MovingFrame& frame, int t_index) {
  const VectorXd& nu = frame.nu.at(t_index);
  const MatrixXcd wc = commuting_complex_part(frame.W.at(t_index));
  const MatrixXcd gc = commuting_complex_part(frame.G.at(t_index));
  double residual = 0.0;
  for (int j = 0; j < frame.n_modes; ++j)
    for (int k = 0; k < frame.n_modes; ++k) {
      if (j == k) continue;
      residual = std::max(residual,
                          std::abs((nu[k] - nu[j]) * wc(j, k) - 2.0 * frame.gamma * gc(j, k)));
    }
  return residual;
}

double total_cost(const MovingFrame& frame, int t_index) {
  const VectorXd& nu = frame.nu.at(t_index);
  const VectorXd s = scalar_sources(frame, t_index);
  double total = 0.0;
  for (int k = 0; k < frame.n_modes; ++k) total += scalar_block_optimum(s[k], nu[k]).z;
  return total;
}

MultimodeOptimum multimode_optimum(const MovingFrame& frame, int t_index) {
  const VectorXd& nu = frame.nu.at(t_index);
  if (nu.minCoeff() <= 1.0)
    throw divergence_error("multimode_optimum: pure-endpoint spectrum, cost diverges");
  const int n = frame.n_modes;
  const VectorXd s = scalar_sources(frame, t_index);

  MultimodeOptimum opt;
  opt.mode_cost.resize(n);
  MatrixXd k_mov = MatrixXd::Zero(2 * n, 2 * n);
  MatrixXd d_mov = MatrixXd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    const ScalarBlockOptimum block = scalar_block_optimum(s[k], nu[k]);
    opt.mode_cost[k] = block.z;
    opt.total += block.z;
    const double a = (s[k] - block.c) / (2.0 * nu[k]);
    k_mov(2 * k, 2 * k) = k_mov(2 * k + 1, 2 * k + 1) = a;
    d_mov(2 * k, 2 * k) = d_mov(2 * k + 1, 2 * k + 1) = block.c;
  }

  const MatrixXd& s_frame = frame.S.at(t_index);
  const MatrixXd w_sp = sp_project(frame.W.at(t_index));
  const MatrixXd s_inv = s_frame.partialPivLu().solve(MatrixXd::Identity(2 * n, 2 * n));
  opt.K = s_frame * (k_mov - w_sp) * s_inv;
  MatrixXd d = s_frame * d_mov * s_frame.transpose();
  opt.D = 0.5 * (d + d.transpose());

  GaussianGenerator gen;
  gen.K = opt.K;
  gen.D = opt.D;
  gen.gamma = frame.gamma;
  opt.cp_margin = cp_min_eig(gen);
  opt.matching_residual = matching_residual(gen, frame.covariance_at(t_index));
  return opt;
}

double integrated_action(const MovingFrame& frame, double t_lo, double t_hi) {
  if (!(t_lo < t_hi)) throw std::invalid_argument("integrated_action: need t_lo < t_hi");
  if (t_lo < frame.times.front() - 1e-12 || t_hi > frame.times.back() + 1e-12)
    throw std::invalid_argument("integrated_action: interval outside the frame grid");

  const int n_t = static_cast<int>(frame.times.size());
  std::vector<double> z(n_t);
  for (int i = 0; i < n_t; ++i) z[i] = total_cost(frame, i);

  auto value_at = [&](double t) {
    const auto it = std::lower_bound(frame.times.begin(), frame.times.end(), t);
    int hi = static_cast<int>(it - frame.times.begin());
    hi = std::clamp(hi, 1, n_t - 1);
    const int lo = hi - 1;
    const double u = (t - frame.times[lo]) / (frame.times[hi] - frame.times[lo]);
    return (1.0 - u) * z[lo] + u * z[hi];
  };

  double integral = 0.0;
  double prev_t = t_lo;
  double prev_z = value_at(t_lo);
  for (int i = 0; i < n_t; ++i) {
    const double t = frame.times[i];
    if (t <= t_lo || t >= t_hi) continue;
    integral += 0.5 * (prev_z + z[i]) * (t - prev_t);
    prev_t = t;
    prev_z = z[i];
  }
  integral += 0.5 * (prev_z + value_at(t_hi)) * (t_hi - prev_t);
  return integral;
}

}  // namespace qrev
