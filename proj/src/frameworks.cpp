#include "dae/frameworks.hpp"

#include <Eigen/QR>
#include <sstream>

namespace dae {

namespace {

// Values of one pair along a symmetric stencil; the active window shrinks by
// one point per reduction level (each level consumes one central difference).
struct PairStencil {
  std::vector<Eigen::MatrixXd> E, F;
  double h = 0.0;
  int lo = 0, hi = 0;  // active index window (inclusive)
  int center = 0;

  int size() const { return static_cast<int>(E.size()); }
};

PairStencil initial_stencil(const DaeProblem& problem, double t, double fd_step, int levels) {
  PairStencil s;
  s.h = fd_step > 0.0 ? fd_step : problem.fd_step;
  const int half = levels + 1;
  const FrozenPiece piece(problem, t);
  for (int j = -half; j <= half; ++j) {
    const double tj = t + j * s.h;
    s.E.push_back(piece.E(tj));
    s.F.push_back(piece.F(tj));
  }
  s.lo = 0;
  s.hi = 2 * half;
  s.center = half;
  return s;
}

struct LevelBases {
  FundamentalSubspaces fs;  // of E at one stencil point, aligned to the center
  Eigen::MatrixXd C;        // S-basis, aligned (basic) or pivot-determined (elimination)
};

}  // namespace

PreRegularity pre_regularity_check(const Eigen::MatrixXd& E, const Eigen::MatrixXd& F,
                                   const TolerancePolicy& tol) {
  if (E.rows() != E.cols() || F.rows() != F.cols() || E.rows() != F.rows())
    throw DimensionMismatch("pre-regularity check needs square pairs of equal size");
  const int m = static_cast<int>(E.rows());
  PreRegularity out;
  Eigen::MatrixXd ef(m, 2 * m);
  ef << E, F;
  out.qualified = rank_of(ef, tol).rank == m;
  const auto fs = fundamental_subspaces(E, tol);
  out.rank_E = fs.rank;
  out.r = fs.rank.rank;
  const Subspace s = kernel_space(fs.cokernel.basis.transpose() * F, tol);
  out.theta = intersection_dim(fs.kernel, s, tol).dim;
  out.pre_regular = out.qualified;
  return out;
}

namespace {

// One reduction step on the whole active window: builds E_{i+1}, F_{i+1} at
// the inner stencil points from aligned bases of the current level.
void reduce_stencil(PairStencil& st, const LevelBases& center_bases, ReductionMode mode,
                    const Eigen::PermutationMatrix<Eigen::Dynamic>& perm, int r, int mi,
                    const TolerancePolicy& tol) {
  const int n = st.size();
  std::vector<Eigen::MatrixXd> Y(n), C(n);
  for (int p = st.lo; p <= st.hi; ++p) {
    if (p == st.center) {
      Y[p] = center_bases.fs.range.basis;
      C[p] = center_bases.C;
      continue;
    }
    const auto fs = fundamental_subspaces(st.E[p], tol);
    if (fs.rank.rank != r)
      throw Error("rank of E changes inside the finite-difference stencil; move the probe or "
                  "shrink fd_step");
    Y[p] = align_basis(fs.range.basis, center_bases.fs.range.basis);
    if (mode == ReductionMode::Basic) {
      const Subspace s = kernel_space(fs.cokernel.basis.transpose() * st.F[p], tol);
      if (s.dim() != r) throw Error("dim S changes inside the finite-difference stencil");
      C[p] = align_basis(s.basis, center_bases.C);
    } else {
      // Elimination: C = K [I; -B^{-1} A] with the pivot permutation frozen at
      // the center; gauge-free, no alignment needed.
      const Eigen::MatrixXd zf = fs.cokernel.basis.transpose() * st.F[p];
      const Eigen::MatrixXd zfp = zf * perm;
      const int rank_def = mi - r;
      const Eigen::MatrixXd a = zfp.leftCols(mi - rank_def);
      const Eigen::MatrixXd b = zfp.rightCols(rank_def);
      Eigen::MatrixXd cp(mi, r);
      cp.topRows(r) = Eigen::MatrixXd::Identity(r, r);
      cp.bottomRows(rank_def) = -b.partialPivLu().solve(a);
      C[p] = perm * cp;
    }
  }
  std::vector<Eigen::MatrixXd> En(n), Fn(n);
  for (int p = st.lo + 1; p <= st.hi - 1; ++p) {
    const Eigen::MatrixXd cdot = (C[p + 1] - C[p - 1]) / (2.0 * st.h);
    En[p] = Y[p].transpose() * st.E[p] * C[p];
    Fn[p] = Y[p].transpose() * (st.F[p] * C[p] + st.E[p] * cdot);
  }
  st.E = std::move(En);
  st.F = std::move(Fn);
  ++st.lo;
  --st.hi;
}

}  // namespace

ReductionResult reduction_profile(const DaeProblem& problem, double t, ReductionMode mode,
                                  double fd_step) {
  const int m = problem.m();
  const auto& tol = problem.tol;
  ReductionResult out;
  PairStencil st = initial_stencil(problem, t, fd_step, m + 1);

  std::vector<int> thetas;
  int r_level = 0;
  for (int level = 0;; ++level) {
    if (level > m) throw MaxLevelExceeded(m);
    const Eigen::MatrixXd& E = st.E[st.center];
    const Eigen::MatrixXd& F = st.F[st.center];
    const int mi = static_cast<int>(E.rows());

    Eigen::MatrixXd ef(mi, 2 * mi);
    ef << E, F;
    if (rank_of(ef, tol).rank != mi) throw PreRegularityLost(level, t);

    LevelBases bases;
    bases.fs = fundamental_subspaces(E, tol);
    const int r = bases.fs.rank.rank;
    if (bases.fs.rank.ambiguous) {
      std::ostringstream os;
      os << "rank of E_" << level << " ambiguous (gap ratio " << bases.fs.rank.gap_ratio
         << ") at t=" << t;
      out.warnings.push_back(os.str());
    }
    if (level == 0) r_level = r;

    if (level == 0 && r == mi) {
      out.profile = CharacteristicProfile::from_thetas(m, m, {});
      return out;
    }

    const Subspace s_space = kernel_space(bases.fs.cokernel.basis.transpose() * F, tol);
    const int theta = intersection_dim(bases.fs.kernel, s_space, tol).dim;
    thetas.push_back(theta);

    ReductionLevel lvl;
    lvl.level = level;
    lvl.m_i = mi;
    lvl.r_i = r;
    lvl.theta_i = theta;
    lvl.E_i = E;
    lvl.F_i = F;
    lvl.Y = bases.fs.range.basis;
    lvl.Z = bases.fs.cokernel.basis;
    lvl.C = s_space.basis;
    out.trace.push_back(std::move(lvl));

    if (theta == 0) break;

    Eigen::PermutationMatrix<Eigen::Dynamic> perm(mi);
    perm.setIdentity();
    bases.C = s_space.basis;
    if (mode == ReductionMode::Elimination) {
      // Column-pivoted split Z^T F K = [A B], B nonsingular: pivot columns go last.
      const Eigen::MatrixXd zf = bases.fs.cokernel.basis.transpose() * F;
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(zf);
      const auto piv = qr.colsPermutation().indices();
      const int rank_def = mi - r;
      std::vector<int> order;
      std::vector<bool> is_pivot(mi, false);
      for (int i = 0; i < rank_def; ++i) is_pivot[piv(i)] = true;
      for (int i = 0; i < mi; ++i)
        if (!is_pivot[i]) order.push_back(i);
      for (int i = 0; i < rank_def; ++i) order.push_back(piv(i));
      for (int i = 0; i < mi; ++i) perm.indices()(i) = order[i];
      const Eigen::MatrixXd zfp = zf * perm;
      const Eigen::MatrixXd a = zfp.leftCols(r);
      const Eigen::MatrixXd b = zfp.rightCols(rank_def);
      Eigen::MatrixXd cp(mi, r);
      cp.topRows(r) = Eigen::MatrixXd::Identity(r, r);
      cp.bottomRows(rank_def) = -b.partialPivLu().solve(a);
      bases.C = perm * cp;
      out.trace.back().C = bases.C;
    }

    reduce_stencil(st, bases, mode, perm, r, mi, tol);
  }

  out.profile = CharacteristicProfile::from_thetas(m, r_level, std::move(thetas));
  return out;
}

DissectionResult dissection_profile(const DaeProblem& problem, double t, double fd_step) {
  const auto& tol = problem.tol;
  const int m = problem.m();
  const auto reduction = reduction_profile(problem, t, ReductionMode::Basic, fd_step);

  DissectionResult out;
  if (reduction.profile.mu == 0) {
    out.profile = reduction.profile;
    out.r_dissection = {m};
    out.mu_dissection = 0;
    return out;
  }

  // r^D_{i+1} = r^D_i + rank(Z_i^T F_i T_i), accumulated along the chain.
  out.r_dissection.push_back(reduction.profile.r);
  for (const auto& lvl : reduction.trace) {
    const Subspace t_i = kernel_space(lvl.E_i, tol);
    const Eigen::MatrixXd zft = lvl.Z.transpose() * lvl.F_i * t_i.basis;
    const int a_i = rank_of(zft, tol).rank;
    out.r_dissection.push_back(out.r_dissection.back() + a_i);
  }
  out.mu_dissection = static_cast<int>(out.r_dissection.size()) - 1;
  if (out.r_dissection.back() != m)
    throw Error("dissection ranks did not reach m at the terminal level");

  std::vector<int> thetas;
  for (size_t i = 1; i < out.r_dissection.size(); ++i) thetas.push_back(m - out.r_dissection[i]);
  out.profile = CharacteristicProfile::from_thetas(m, out.r_dissection.front(), std::move(thetas));
  return out;
}

namespace {

// Bases that drive one strangeness step, per stencil point, aligned to the center.
struct StrangenessBases {
  Eigen::MatrixXd Tc, T, Y, Z;      // splitting of E
  Eigen::MatrixXd W, V, T_R, T_N;   // splitting of F_hat = Z^T F T
  Eigen::MatrixXd K_s, K_d;         // splitting of S_blk = V^T Z^T F T^c
};

struct StrangenessDims {
  int r = 0, a = 0, s = 0, d = 0, v = 0;
};

StrangenessBases strangeness_bases(const Eigen::MatrixXd& E, const Eigen::MatrixXd& F,
                                   const TolerancePolicy& tol, const StrangenessBases* center,
                                   StrangenessDims* dims) {
  StrangenessBases b;
  const auto fsE = fundamental_subspaces(E, tol);
  b.Tc = fsE.corange.basis;
  b.T = fsE.kernel.basis;
  b.Y = fsE.range.basis;
  b.Z = fsE.cokernel.basis;
  if (center) {
    if (b.T.cols() != center->T.cols())
      throw Error("rank of E changes inside the strangeness stencil");
    b.Tc = align_basis(b.Tc, center->Tc);
    b.T = align_basis(b.T, center->T);
    b.Y = align_basis(b.Y, center->Y);
    b.Z = align_basis(b.Z, center->Z);
  }

  const Eigen::MatrixXd f_hat = b.Z.transpose() * F * b.T;
  const auto fsH = fundamental_subspaces(f_hat, tol);
  b.W = fsH.range.basis;
  b.V = fsH.cokernel.basis;
  b.T_R = fsH.corange.basis;
  b.T_N = fsH.kernel.basis;
  if (center) {
    if (b.V.cols() != center->V.cols())
      throw Error("rank of Z^T F T changes inside the strangeness stencil");
    b.W = align_basis(b.W, center->W);
    b.V = align_basis(b.V, center->V);
    b.T_R = align_basis(b.T_R, center->T_R);
    b.T_N = align_basis(b.T_N, center->T_N);
  }

  const Eigen::MatrixXd s_blk = b.V.transpose() * b.Z.transpose() * F * b.Tc;
  const auto fsS = fundamental_subspaces(s_blk, tol);
  b.K_s = fsS.corange.basis;
  b.K_d = fsS.kernel.basis;
  if (center) {
    if (b.K_d.cols() != center->K_d.cols())
      throw Error("strangeness rank changes inside the stencil");
    b.K_s = align_basis(b.K_s, center->K_s);
    b.K_d = align_basis(b.K_d, center->K_d);
  }

  if (dims) {
    dims->r = fsE.rank.rank;
    dims->a = fsH.rank.rank;
    dims->s = fsS.rank.rank;
    dims->d = dims->r - dims->s;
    dims->v = static_cast<int>(E.rows()) - dims->r - dims->a - dims->s;
  }
  return b;
}

// Column transform of one strangeness step: x = K xtilde with blocks
// (u1, u2, w1, w2) of sizes (s, d, a, s+v); the second factor removes the
// w1-coupling of u2 in the purely algebraic rows.
Eigen::MatrixXd strangeness_k_total(const Eigen::MatrixXd& F, const StrangenessBases& b,
                                    const StrangenessDims& dm) {
  const int m = static_cast<int>(F.rows());
  Eigen::MatrixXd k(m, m);
  int col = 0;
  const Eigen::MatrixXd u1 = b.Tc * b.K_s;
  const Eigen::MatrixXd u2 = b.Tc * b.K_d;
  const Eigen::MatrixXd w1 = b.T * b.T_R;
  const Eigen::MatrixXd w2 = b.T * b.T_N;
  k.middleCols(col, u1.cols()) = u1;
  col += static_cast<int>(u1.cols());
  k.middleCols(col, u2.cols()) = u2;
  col += static_cast<int>(u2.cols());
  k.middleCols(col, w1.cols()) = w1;
  col += static_cast<int>(w1.cols());
  k.middleCols(col, w2.cols()) = w2;

  // w1 <- w1 - B u2 with B = (W^T Fhat T_R)^{-1} W^T Z^T F T^c K_d, so that the
  // purely algebraic rows decouple from the dynamic columns.
  if (dm.a > 0 && dm.d > 0) {
    const Eigen::MatrixXd ma = b.W.transpose() * b.Z.transpose() * F * b.T * b.T_R;
    const Eigen::MatrixXd coup = b.W.transpose() * b.Z.transpose() * F * u2;
    const Eigen::MatrixXd bblk = ma.partialPivLu().solve(coup);
    Eigen::MatrixXd k2 = Eigen::MatrixXd::Identity(m, m);
    k2.block(dm.s + dm.d, dm.s, dm.a, dm.d) = -bblk;
    k = k * k2;
  }
  return k;
}

}  // namespace

StrangenessResult strangeness_profile(const DaeProblem& problem, double t, double fd_step) {
  const int m = problem.m();
  const auto& tol = problem.tol;
  StrangenessResult out;
  PairStencil st = initial_stencil(problem, t, fd_step, m + 1);

  std::vector<StrangenessTriple> triples;
  for (int level = 0;; ++level) {
    if (level > m) throw MaxLevelExceeded(m);
    const Eigen::MatrixXd& E = st.E[st.center];
    const Eigen::MatrixXd& F = st.F[st.center];

    StrangenessDims dm;
    const StrangenessBases center = strangeness_bases(E, F, tol, nullptr, &dm);
    if (dm.v != 0) throw NonZeroVanishing(level, dm.v);

    StrangenessTriple trip;
    trip.level = level;
    trip.r_s = dm.r;
    trip.a_s = dm.a;
    trip.s_s = dm.s;
    trip.d_s = dm.d;
    trip.v_s = dm.v;
    triples.push_back(trip);

    if (dm.s == 0) {
      out.mu_strangeness = level;
      break;
    }

    // Build the next pair at all inner stencil points.
    const int n = st.size();
    std::vector<Eigen::MatrixXd> K(n);
    std::vector<StrangenessBases> bases(n);
    for (int p = st.lo; p <= st.hi; ++p) {
      bases[p] = p == st.center
                     ? center
                     : strangeness_bases(st.E[p], st.F[p], tol, &center, nullptr);
      K[p] = strangeness_k_total(st.F[p], bases[p], dm);
    }

    std::vector<Eigen::MatrixXd> En(n), Fn(n);
    for (int p = st.lo + 1; p <= st.hi - 1; ++p) {
      const Eigen::MatrixXd kdot = (K[p + 1] - K[p - 1]) / (2.0 * st.h);
      const StrangenessBases& bp = bases[p];

      const Eigen::MatrixXd ebar = st.E[p] * K[p];
      const Eigen::MatrixXd gbar = st.F[p] * K[p] + st.E[p] * kdot;

      // Row split (Y | W^T Z^T | V^T Z^T) and normalization of the E-part.
      Eigen::MatrixXd rows(m, m);
      rows.topRows(dm.r) = bp.Y.transpose();
      rows.middleRows(dm.r, dm.a) = bp.W.transpose() * bp.Z.transpose();
      rows.bottomRows(dm.s) = bp.V.transpose() * bp.Z.transpose();

      Eigen::MatrixXd e2 = rows * ebar;
      Eigen::MatrixXd g2 = rows * gbar;
      const auto lu_top = Eigen::MatrixXd(e2.topLeftCorner(dm.r, dm.r)).partialPivLu();
      g2.topRows(dm.r) = lu_top.solve(g2.topRows(dm.r)).eval();

      // Eliminate column block 1 with the bottom s rows, then column block 3
      // with the middle a rows; both have zero E-part, so E is untouched.
      const auto lu_s = Eigen::MatrixXd(g2.bottomLeftCorner(dm.s, dm.s)).partialPivLu();
      g2.bottomRows(dm.s) = lu_s.solve(g2.bottomRows(dm.s)).eval();
      {
        const Eigen::MatrixXd coeff = g2.block(0, 0, dm.r + dm.a, dm.s);
        g2.block(0, 0, dm.r + dm.a, m) -= coeff * g2.bottomRows(dm.s);
      }
      if (dm.a > 0) {
        const auto lu_a = Eigen::MatrixXd(g2.block(dm.r, dm.s + dm.d, dm.a, dm.a)).partialPivLu();
        g2.middleRows(dm.r, dm.a) = lu_a.solve(g2.middleRows(dm.r, dm.a)).eval();
        const Eigen::MatrixXd coeff = g2.block(0, dm.s + dm.d, dm.r, dm.a);
        g2.topRows(dm.r) -= coeff * g2.middleRows(dm.r, dm.a);
      }

      // The E-part is diag(0_s, I_d, 0, 0) by construction: the leading s
      // differential rows turn algebraic when their derivatives are replaced by
      // differentiated constraint data.
      Eigen::MatrixXd e_next = Eigen::MatrixXd::Zero(m, m);
      e_next.block(dm.s, dm.s, dm.d, dm.d).setIdentity();
      En[p] = e_next;
      Fn[p] = g2;
    }
    st.E = std::move(En);
    st.F = std::move(Fn);
    ++st.lo;
    --st.hi;
  }

  out.triples = std::move(triples);
  if (out.triples.front().r_s == m) {
    out.profile = CharacteristicProfile::from_thetas(m, m, {});
  } else {
    std::vector<int> thetas;
    for (const auto& trip : out.triples) thetas.push_back(trip.s_s);
    out.profile = CharacteristicProfile::from_thetas(m, out.triples.front().r_s, std::move(thetas));
  }
  return out;
}

}  // namespace dae
