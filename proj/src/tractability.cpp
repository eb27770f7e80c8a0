#include "dae/tractability.hpp"

#include <sstream>

#include "dae/arrays.hpp"
#include "dae/frameworks.hpp"

namespace dae {

namespace {

constexpr double kConstProjectorTol = 1e-12;

// Widely orthogonal nullspace projector: im Q = N, ker Q = X + (N + X)^perp
// with X the sum of the previously absorbed nullspaces.
Eigen::MatrixXd admissible_projector(const Subspace& n, const Subspace& x,
                                     const TolerancePolicy& tol) {
  const int dim = n.ambient_dim;
  if (n.dim() == 0) return Eigen::MatrixXd::Zero(dim, dim);
  if (x.dim() == 0) return n.basis * n.basis.transpose();
  const Subspace nx = subspace_sum(n, x, tol);
  const Subspace rest = orthogonal_complement(nx, tol);
  const Subspace ker_q = subspace_sum(x, rest, tol);
  return projector_onto_along(n, ker_q).matrix;
}

// Central difference of a pointwise-unique matrix path, snapped to zero when
// the path is constant across the whole window.
Eigen::MatrixXd path_derivative(const std::vector<Eigen::MatrixXd>& path, int p, int lo, int hi,
                                double h) {
  double spread = 0.0;
  for (int j = lo; j <= hi; ++j) spread = std::max(spread, (path[j] - path[lo]).norm());
  if (spread < kConstProjectorTol * (1.0 + path[lo].norm()))
    return Eigen::MatrixXd::Zero(path[p].rows(), path[p].cols());
  return (path[p + 1] - path[p - 1]) / (2.0 * h);
}

}  // namespace

ChainResult admissible_chain_at(const DaeProblem& problem, double t, double fd_step,
                                int max_level) {
  const int m = problem.m();
  const auto& tol = problem.tol;
  if (max_level < 0) max_level = m;
  const double h = fd_step > 0.0 ? fd_step : problem.fd_step;
  const int half = max_level + 2;
  const FrozenPiece piece(problem, t);

  ChainResult out;
  const int n_pts = 2 * half + 1;
  int lo = 0, hi = n_pts - 1;
  const int center = half;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);

  // G_0 = E and B_0 = F - E D' with D the orthoprojector along ker E.
  std::vector<Eigen::MatrixXd> proj(n_pts), g(n_pts), b(n_pts);
  for (int p = lo; p <= hi; ++p) {
    const double tp = t + (p - center) * h;
    g[p] = piece.E(tp);
    b[p] = piece.F(tp);
    proj[p] = pseudo_inverse(g[p], tol) * g[p];
  }
  for (int p = lo + 1; p <= hi - 1; ++p) {
    b[p] = b[p] - g[p] * path_derivative(proj, p, lo, hi, h);
  }
  ++lo;
  --hi;

  std::vector<Eigen::MatrixXd> pi_prev(n_pts), p_prev(n_pts);
  std::vector<Subspace> n_sum(n_pts);
  for (int p = lo; p <= hi; ++p) {
    pi_prev[p] = proj[p];  // becomes Pi_{i-1} after each advance; Pi_{-1} ~ D
    n_sum[p] = Subspace::zero(m);
  }

  for (int level = 0;; ++level) {
    if (level > max_level) throw MaxLevelExceeded(max_level);
    const auto rd = rank_of(g[center], tol);
    if (rd.ambiguous) {
      std::ostringstream os;
      os << "rank of G_" << level << " ambiguous (gap ratio " << rd.gap_ratio << ") at t=" << t;
      out.warnings.push_back(os.str());
    }

    if (rd.rank == m) {
      ChainLevel lvl;
      lvl.level = level;
      lvl.G = g[center];
      lvl.B = b[center];
      lvl.Q = Eigen::MatrixXd::Zero(m, m);
      lvl.P = id;
      lvl.Pi = pi_prev[center];
      lvl.r_t = m;
      lvl.u_t = 0;
      out.levels.push_back(std::move(lvl));
      out.mu_t = level;
      out.completed = true;
      return out;
    }

    // u-check at the center first: a nonzero intersection means the pair is
    // outside the regular case at this point.
    std::vector<Subspace> kernels(n_pts);
    kernels[center] = kernel_space(g[center], tol);
    int u = 0;
    if (level >= 1) {
      u = intersection_dim(n_sum[center], kernels[center], tol).dim;
      if (u > 0) throw NonzeroIntersection(level, u);
    }

    // Nullspace projector at every active point; a rank change inside the
    // stencil marks a critical point where the smooth chain breaks down.
    std::vector<Eigen::MatrixXd> q_vals(n_pts), pi_vals(n_pts);
    bool stencil_broken = false;
    for (int p = lo; p <= hi && !stencil_broken; ++p) {
      if (p != center) kernels[p] = kernel_space(g[p], tol);
      if (kernels[p].dim() != m - rd.rank) {
        stencil_broken = true;
        break;
      }
      q_vals[p] = admissible_projector(kernels[p], n_sum[p], tol);
      pi_vals[p] = pi_prev[p] * (id - q_vals[p]);
    }
    if (stencil_broken) {
      ChainLevel lvl;
      lvl.level = level;
      lvl.G = g[center];
      lvl.B = b[center];
      lvl.Q = kernels[center].basis * kernels[center].basis.transpose();
      lvl.P = id - lvl.Q;
      lvl.Pi = pi_prev[center];
      lvl.r_t = rd.rank;
      lvl.u_t = u;
      out.levels.push_back(std::move(lvl));
      std::ostringstream os;
      os << "rank of G_" << level << " changes inside the finite-difference stencil at t=" << t
         << "; chain stopped";
      out.failure = os.str();
      out.mu_t = level;
      return out;
    }

    // B_level: the level-0 value is already in place; afterwards
    // B_i = B_{i-1} P_{i-1} - G_i D^- (D Pi_i D^-)' D Pi_{i-1}.
    std::vector<Eigen::MatrixXd> dpid(n_pts);
    for (int p = lo; p <= hi; ++p) dpid[p] = proj[p] * pi_vals[p] * proj[p];
    std::vector<Eigen::MatrixXd> b_here(n_pts);
    for (int p = lo + 1; p <= hi - 1; ++p) {
      if (level == 0) {
        b_here[p] = b[p];
      } else {
        const Eigen::MatrixXd dpi_dot = path_derivative(dpid, p, lo, hi, h);
        b_here[p] = b[p] * p_prev[p] - g[p] * proj[p] * dpi_dot * proj[p] * pi_prev[p];
      }
    }
    ++lo;
    --hi;

    ChainLevel lvl;
    lvl.level = level;
    lvl.G = g[center];
    lvl.B = b_here[center];
    lvl.Q = q_vals[center];
    lvl.P = id - q_vals[center];
    lvl.Pi = pi_vals[center];
    lvl.r_t = rd.rank;
    lvl.u_t = u;
    out.levels.push_back(std::move(lvl));

    // Advance to G_{i+1} = G_i + B_i Q_i.
    for (int p = lo; p <= hi; ++p) {
      g[p] = g[p] + b_here[p] * q_vals[p];
      b[p] = b_here[p];
      p_prev[p] = id - q_vals[p];
      pi_prev[p] = pi_vals[p];
      n_sum[p] = subspace_sum(n_sum[p], kernels[p], tol);
    }
  }
}

CharacteristicProfile tractability_profile(const ChainResult& chain, int m) {
  if (!chain.completed) throw Error("tractability chain did not complete: " + chain.failure);
  if (chain.mu_t == 0) return CharacteristicProfile::from_thetas(m, m, {});
  std::vector<int> thetas;
  for (int i = 1; i <= chain.mu_t; ++i) thetas.push_back(m - chain.levels[i].r_t);
  return CharacteristicProfile::from_thetas(m, chain.levels[0].r_t, std::move(thetas));
}

CanonicalSubspaces canonical_subspaces_at(const DaeProblem& problem, double t,
                                          const ChainResult& chain) {
  const int m = problem.m();
  const auto& tol = problem.tol;
  CanonicalSubspaces out;
  out.at_t = t;

  if (chain.mu_t == 0) {
    out.s_can = Subspace::full(m);
    out.n_can = Subspace::zero(m);
    return out;
  }

  // Flow subspace from the reduction product C_0 ... C_{mu-1}.
  const auto red = reduction_profile(problem, t);
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(m, m);
  for (const auto& lvl : red.trace) c = c * lvl.C;
  out.s_can = column_space(c, tol);

  // N_can = N_0 + ... + N_{mu-1}.
  Subspace n = Subspace::zero(m);
  for (int i = 0; i < chain.mu_t; ++i)
    n = subspace_sum(n, kernel_space(chain.levels[i].G, tol), tol);
  out.n_can = n;

  const int d = tractability_profile(chain, m).d;
  if (out.s_can.dim() != d || out.n_can.dim() != m - d ||
      intersection_dim(out.s_can, out.n_can, tol).dim != 0) {
    std::ostringstream os;
    os << "canonical decomposition failed at t=" << t << ": dim s_can=" << out.s_can.dim()
       << ", dim n_can=" << out.n_can.dim() << ", d=" << d;
    throw DecompositionFailure(os.str());
  }
  return out;
}

}  // namespace dae
