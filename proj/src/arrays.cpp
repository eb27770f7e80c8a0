#include "dae/arrays.hpp"

#include <cmath>
#include <sstream>

namespace dae {

namespace {

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

}  // namespace

DerivativeArrayStack build_arrays(const FrozenPiece& piece, double t, int k) {
  const int m = piece.m();
  const int declared = std::min(piece.problem().E.smoothness_order(),
                                piece.problem().F.smoothness_order());
  // At an interior breakpoint the one-sided piece is used; arrays beyond the
  // declared global class are only meaningful one-sidedly there.
  if (k > declared && !piece.problem().breakpoints().empty()) {
    for (double b : piece.problem().breakpoints()) {
      if (std::abs(b - t) < 1e-13) throw InsufficientSmoothness(k, declared);
    }
  }

  DerivativeArrayStack s;
  s.k = k;
  s.at_t = t;
  const int n = (k + 1) * m;
  s.E_arr = Eigen::MatrixXd::Zero(n, n);
  s.F_arr = Eigen::MatrixXd::Zero(n, m);

  std::vector<Eigen::MatrixXd> dE(k + 1), dF(k + 1);
  for (int i = 0; i <= k; ++i) {
    dE[i] = piece.E(t, i);
    dF[i] = piece.F(t, i);
  }

  for (int i = 0; i <= k; ++i) {
    s.F_arr.block(i * m, 0, m, m) = dF[i];
    for (int j = 0; j <= i; ++j) {
      Eigen::MatrixXd blk = binom(i, i - j) * dE[i - j];
      if (i - j - 1 >= 0) blk += binom(i, i - j - 1) * dF[i - j - 1];
      s.E_arr.block(i * m, j * m, m, m) = blk;
    }
  }

  if (k >= 1) {
    s.D_arr = Eigen::MatrixXd::Zero(n, n);
    s.D_arr.block(0, 0, m, m) = dE[0];
    s.D_arr.block(m, 0, n - m, m) = s.F_arr.topRows(n - m);
    s.D_arr.block(m, m, n - m, n - m) = s.E_arr.topLeftCorner(n - m, n - m);

    const Eigen::MatrixXd p = pseudo_inverse(dE[0], piece.problem().tol) * dE[0];
    s.B_arr = s.D_arr;
    s.B_arr.block(0, 0, m, m) = p;
  } else {
    s.D_arr = s.E_arr;
    s.B_arr = pseudo_inverse(dE[0], piece.problem().tol) * dE[0];
  }
  return s;
}

DerivativeArrayStack build_arrays(const DaeProblem& problem, double t, int k) {
  return build_arrays(FrozenPiece(problem, t), t, k);
}

Eigen::VectorXd stacked_rhs(const FrozenPiece& piece, double t, int k) {
  const int m = piece.m();
  Eigen::VectorXd out((k + 1) * m);
  for (int i = 0; i <= k; ++i) out.segment(i * m, m) = piece.q(t, i).col(0);
  return out;
}

Subspace array_constraint_space(const DaeProblem& problem, double t, int k) {
  const auto s = build_arrays(problem, t, k);
  const auto& tol = problem.tol;
  const Eigen::MatrixXd w =
      Eigen::MatrixXd::Identity(s.E_arr.rows(), s.E_arr.rows()) -
      s.E_arr * pseudo_inverse(s.E_arr, tol);
  return kernel_space(w * s.F_arr, tol);
}

ArrayProfile array_profile(const DaeProblem& problem, double t, int k_max) {
  const auto& tol = problem.tol;
  const FrozenPiece piece(problem, t);
  const int m = problem.m();

  ArrayProfile out;
  out.at_t = t;
  out.m = m;

  const Eigen::MatrixXd e0 = piece.E(t);
  const Subspace ker_e = kernel_space(e0, tol);
  const Eigen::MatrixXd pproj = Eigen::MatrixXd::Identity(m, m) - ker_e.basis * ker_e.basis.transpose();
  const Eigen::MatrixXd qproj = ker_e.basis * ker_e.basis.transpose();

  std::vector<Subspace> s_spaces;  // S_[j]
  for (int j = 0; j <= k_max; ++j) {
    DerivativeArrayStack stack;
    try {
      stack = build_arrays(piece, t, j);
    } catch (const InsufficientSmoothness& e) {
      std::ostringstream os;
      os << "array levels truncated at k=" << j - 1 << " (breakpoint at t=" << t
         << " with declared class C^" << e.have << ")";
      out.warnings.push_back(os.str());
      break;
    }

    const auto rd = rank_of(stack.E_arr, tol);
    out.r_arr.push_back(rd.rank);
    if (rd.ambiguous) {
      std::ostringstream os;
      os << "rank of E_[" << j << "] ambiguous (gap ratio " << rd.gap_ratio << ") at t=" << t;
      out.warnings.push_back(os.str());
    }

    Eigen::MatrixXd ef(stack.E_arr.rows(), stack.E_arr.cols() + m);
    ef.leftCols(stack.E_arr.cols()) = stack.E_arr;
    ef.rightCols(m) = stack.F_arr;
    out.full_row_rank_ok.push_back(rank_of(ef, tol).rank == (j + 1) * m);

    // S_[j] = ker(W_[j] F_[j]).
    const auto fs = fundamental_subspaces(stack.E_arr, tol);
    const Eigen::MatrixXd wf = fs.cokernel.basis.transpose() * stack.F_arr;
    const Subspace s_j = kernel_space(wf, tol);
    s_spaces.push_back(s_j);
    out.s_dims.push_back(s_j.dim());

    const auto inter = intersection_dim(ker_e, s_j, tol);
    out.rho.push_back(m - inter.dim);

    // 1-fullness of E_[j] (leading block m).
    out.e_one_full.push_back(one_fullness(stack.E_arr, m, tol).is_one_full);

    if (j == 0) {
      out.rank_D.push_back(rank_of(e0, tol).rank);
      out.rank_B.push_back(rank_of(pproj, tol).rank);
      out.rank_T.push_back(0);
      out.rank_V.push_back(0);
      out.b_one_full.push_back(rank_of(e0, tol).rank == m);
      continue;
    }

    out.rank_D.push_back(rank_of(stack.D_arr, tol).rank);
    out.rank_B.push_back(rank_of(stack.B_arr, tol).rank);
    out.b_one_full.push_back(one_fullness(stack.B_arr, m, tol).is_one_full);

    // T_j: orthoprojector onto ker E cap S_[j-1]; V_j onto ker [Q; V_[j-1] F_[j-1]].
    const auto t_inter = intersection_dim(ker_e, s_spaces[j - 1], tol);
    out.rank_T.push_back(t_inter.dim);

    const auto prev = build_arrays(piece, t, j - 1);
    Eigen::MatrixXd fq_e(prev.E_arr.rows(), m + prev.E_arr.cols());
    fq_e.leftCols(m) = prev.F_arr * qproj;
    fq_e.rightCols(prev.E_arr.cols()) = prev.E_arr;
    const Subspace im_fqe = column_space(fq_e, tol);
    const Eigen::MatrixXd v_proj =
        Eigen::MatrixXd::Identity(fq_e.rows(), fq_e.rows()) - im_fqe.basis * im_fqe.basis.transpose();
    Eigen::MatrixXd stacked(m + prev.F_arr.rows(), m);
    stacked.topRows(m) = qproj;
    stacked.bottomRows(prev.F_arr.rows()) = v_proj * prev.F_arr;
    out.rank_V.push_back(kernel_space(stacked, tol).dim());
  }
  return out;
}

namespace {

bool column_constant(const std::vector<ArrayProfile>& probes, int level,
                     const std::vector<int> ArrayProfile::* field) {
  for (const auto& p : probes)
    if (level >= static_cast<int>((p.*field).size())) return false;
  for (size_t i = 1; i < probes.size(); ++i) {
    if ((probes[i].*field)[level] != (probes[0].*field)[level]) return false;
  }
  return true;
}

bool flag_all(const std::vector<ArrayProfile>& probes, int level,
              const std::vector<bool> ArrayProfile::* field) {
  for (const auto& p : probes)
    if (level >= static_cast<int>((p.*field).size()) || !(p.*field)[level]) return false;
  return true;
}

}  // namespace

IndexReport index_report(const DaeProblem& problem, const std::vector<double>& t_probes,
                         int k_max) {
  IndexReport rep;
  for (double t : t_probes) rep.probes.push_back(array_profile(problem, t, k_max));
  const auto& probes = rep.probes;
  const int m = problem.m();

  const bool e_nonsingular_everywhere = [&] {
    for (const auto& p : probes)
      if (p.r_arr[0] != m) return false;
    return true;
  }();

  // Differentiation index: smallest nu with E_[nu] of constant rank and 1-full.
  for (int nu = 0; nu <= k_max; ++nu) {
    if (column_constant(probes, nu, &ArrayProfile::r_arr) &&
        flag_all(probes, nu, &ArrayProfile::e_one_full)) {
      rep.mu_diff.value = nu;
      break;
    }
  }
  if (!rep.mu_diff.defined())
    rep.mu_diff.reason = "no level up to k_max has constant rank and 1-fullness";

  // Regular differentiation index: additionally all lower ranks constant.
  if (rep.mu_diff.defined()) {
    const int nu = *rep.mu_diff.value;
    bool lower_ok = true;
    int bad = -1;
    for (int j = 0; j < nu; ++j) {
      if (!column_constant(probes, j, &ArrayProfile::r_arr)) {
        lower_ok = false;
        bad = j;
        break;
      }
    }
    if (lower_ok) {
      rep.mu_rdiff.value = nu;
    } else {
      std::ostringstream os;
      os << "r_[" << bad << "] is not constant over the probes";
      rep.mu_rdiff.reason = os.str();
    }
  } else {
    rep.mu_rdiff.reason = rep.mu_diff.reason;
  }

  // Projector-based differentiation index: smallest nu with rho_{nu-1} = m and
  // constant lower ranks; nonsingular E pins it to 0 by the index-0 convention.
  if (e_nonsingular_everywhere) {
    rep.mu_pbdiff.value = 0;
  } else {
    for (int nu = 1; nu <= k_max; ++nu) {
      bool consts = column_constant(probes, nu - 1, &ArrayProfile::rho) &&
                    column_constant(probes, nu - 1, &ArrayProfile::r_arr);
      for (int j = 0; j < nu - 1 && consts; ++j) {
        consts = column_constant(probes, j, &ArrayProfile::rho) &&
                 column_constant(probes, j, &ArrayProfile::r_arr);
      }
      if (!consts) {
        rep.mu_pbdiff.reason = "rank functions rho/r not constant over the probes";
        break;
      }
      if (probes[0].rho[nu - 1] == m) {
        rep.mu_pbdiff.value = nu;
        break;
      }
    }
    if (!rep.mu_pbdiff.defined() && rep.mu_pbdiff.reason.empty())
      rep.mu_pbdiff.reason = "rho did not reach m up to k_max";
  }

  // SF-hypothesis order: smallest mu_hat whose level has constant rank and full
  // rank in the derived blocks Z^T F_[mu_hat] and E C.
  for (int mh = 0; mh <= k_max; ++mh) {
    if (!column_constant(probes, mh, &ArrayProfile::r_arr)) continue;
    const int a_hat = (mh + 1) * m - probes[0].r_arr[mh];
    bool ok = true;
    for (size_t pi = 0; pi < t_probes.size() && ok; ++pi) {
      const auto stack = build_arrays(problem, t_probes[pi], mh);
      const auto fs = fundamental_subspaces(stack.E_arr, problem.tol);
      const Eigen::MatrixXd f2 = fs.cokernel.basis.transpose() * stack.F_arr;
      if (rank_of(f2, problem.tol).rank != a_hat) {
        ok = false;
        break;
      }
      const Subspace c = kernel_space(f2, problem.tol);
      if (c.dim() != m - a_hat) {
        ok = false;
        break;
      }
      const Eigen::MatrixXd ec = FrozenPiece(problem, t_probes[pi]).E(t_probes[pi]) * c.basis;
      if (rank_of(ec, problem.tol).rank != m - a_hat) ok = false;
    }
    if (ok) {
      rep.sf_mu_hat.value = mh;
      break;
    }
  }
  if (!rep.sf_mu_hat.defined()) rep.sf_mu_hat.reason = "SF-hypothesis not satisfied up to k_max";

  // Consistency across the defined notions (index-0 handled by convention).
  rep.consistent = true;
  std::vector<int> mus;
  if (rep.mu_diff.defined()) mus.push_back(*rep.mu_diff.value);
  if (rep.mu_rdiff.defined()) mus.push_back(*rep.mu_rdiff.value);
  if (rep.mu_pbdiff.defined()) mus.push_back(*rep.mu_pbdiff.value);
  if (rep.sf_mu_hat.defined() && !e_nonsingular_everywhere)
    mus.push_back(*rep.sf_mu_hat.value + 1);
  for (size_t i = 1; i < mus.size(); ++i)
    if (mus[i] != mus[0]) rep.consistent = false;
  return rep;
}

CharacteristicProfile theta_from_arrays(const ArrayProfile& p) {
  const int m = p.m;
  const int r = p.r_arr.at(0);
  if (r == m) return CharacteristicProfile::from_thetas(m, r, {});
  std::vector<int> thetas;
  for (size_t i = 0; i + 1 < p.r_arr.size(); ++i) {
    const int theta = m + p.r_arr[i] - p.r_arr[i + 1];
    thetas.push_back(theta);
    if (theta == 0) break;
  }
  if (thetas.empty() || thetas.back() != 0)
    throw NonConstantRank(static_cast<int>(p.r_arr.size()) - 1);
  return CharacteristicProfile::from_thetas(m, r, std::move(thetas));
}

}  // namespace dae
