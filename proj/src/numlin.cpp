#include "dae/numlin.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace dae {

namespace {

constexpr double kGapWarnRatio = 1e3;
constexpr double kOneFullTol = 1e-8;

void require_finite(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw NonFinite();
}

// Jacobi is most accurate on small blocks; divide-and-conquer wins beyond.
constexpr Eigen::Index kBdcSwitch = 24;

Eigen::VectorXd singular_values_of(const Eigen::MatrixXd& m) {
  if (std::min(m.rows(), m.cols()) > kBdcSwitch)
    return Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues();
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
}

RankDecision decide_rank(const Eigen::VectorXd& sigma, Eigen::Index rows, Eigen::Index cols,
                         const TolerancePolicy& tol) {
  RankDecision d;
  d.singular_values = sigma;
  const double smax = sigma.size() ? sigma(0) : 0.0;
  const double cut = tol.cutoff(smax, rows, cols);
  int r = 0;
  while (r < sigma.size() && sigma(r) > cut) ++r;
  d.rank = r;
  if (r > 0 && r < sigma.size() && sigma(r) > 0.0) {
    d.gap_ratio = sigma(r - 1) / sigma(r);
    d.ambiguous = d.gap_ratio < kGapWarnRatio;
  }
  return d;
}

}  // namespace

RankDecision rank_of(const Eigen::MatrixXd& m, const TolerancePolicy& tol) {
  require_finite(m);
  if (m.size() == 0) return RankDecision{};
  return decide_rank(singular_values_of(m), m.rows(), m.cols(), tol);
}

FundamentalSubspaces fundamental_subspaces(const Eigen::MatrixXd& m, const TolerancePolicy& tol) {
  require_finite(m);
  FundamentalSubspaces out;
  const auto rows = m.rows();
  const auto cols = m.cols();
  if (m.size() == 0) {
    out.range = Subspace::zero(static_cast<int>(rows));
    out.kernel = Subspace::full(static_cast<int>(cols));
    out.corange = Subspace::zero(static_cast<int>(cols));
    out.cokernel = Subspace::full(static_cast<int>(rows));
    return out;
  }
  Eigen::MatrixXd u, v;
  Eigen::VectorXd sigma;
  if (std::min(rows, cols) > kBdcSwitch) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u = svd.matrixU();
    v = svd.matrixV();
    sigma = svd.singularValues();
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u = svd.matrixU();
    v = svd.matrixV();
    sigma = svd.singularValues();
  }
  out.rank = decide_rank(sigma, rows, cols, tol);
  const int r = out.rank.rank;
  // Deterministic sign convention: entry of largest magnitude positive in each
  // left singular vector (right vector flipped along).
  for (int j = 0; j < u.cols() && j < v.cols(); ++j) {
    Eigen::Index imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    if (u(imax, j) < 0.0) {
      u.col(j) *= -1.0;
      v.col(j) *= -1.0;
    }
  }
  out.range = Subspace{static_cast<int>(rows), u.leftCols(r)};
  out.cokernel = Subspace{static_cast<int>(rows), u.rightCols(rows - r)};
  out.corange = Subspace{static_cast<int>(cols), v.leftCols(r)};
  out.kernel = Subspace{static_cast<int>(cols), v.rightCols(cols - r)};
  return out;
}

Subspace column_space(const Eigen::MatrixXd& m, const TolerancePolicy& tol) {
  return fundamental_subspaces(m, tol).range;
}

Subspace kernel_space(const Eigen::MatrixXd& m, const TolerancePolicy& tol) {
  return fundamental_subspaces(m, tol).kernel;
}

IntersectionResult intersection_dim(const Subspace& a, const Subspace& b,
                                    const TolerancePolicy& tol) {
  if (a.ambient_dim != b.ambient_dim)
    throw DimensionMismatch("subspace intersection needs equal ambient dimensions");
  const int n = a.ambient_dim;
  const Eigen::MatrixXd pa = a.basis * a.basis.transpose();
  const Eigen::MatrixXd pb = b.basis * b.basis.transpose();
  Eigen::MatrixXd stacked(2 * n, n);
  stacked.topRows(n) = Eigen::MatrixXd::Identity(n, n) - pa;
  stacked.bottomRows(n) = Eigen::MatrixXd::Identity(n, n) - pb;
  IntersectionResult out;
  out.basis = kernel_space(stacked, tol);
  out.dim = out.basis.dim();
  return out;
}

OneFullnessResult one_fullness(const Eigen::MatrixXd& m, int block, const TolerancePolicy& tol) {
  require_finite(m);
  if (m.rows() != m.cols() || block <= 0 || m.rows() % block != 0)
    throw DimensionMismatch("1-fullness needs a square matrix whose size is a multiple of block");
  OneFullnessResult out;
  out.witness_kernel = kernel_space(m, tol);
  if (out.witness_kernel.dim() == 0) {
    out.leading_block_mass = 0.0;
    out.is_one_full = true;
    return out;
  }
  const Eigen::MatrixXd top = out.witness_kernel.basis.topRows(block);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(top);
  out.leading_block_mass = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  out.is_one_full = out.leading_block_mass <= kOneFullTol;
  return out;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, const TolerancePolicy& tol) {
  require_finite(m);
  const auto invert = [&](const auto& svd) {
    const auto& sigma = svd.singularValues();
    const double cut = tol.cutoff(sigma.size() ? sigma(0) : 0.0, m.rows(), m.cols());
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
      if (sigma(i) > cut) inv(i) = 1.0 / sigma(i);
    return Eigen::MatrixXd(svd.matrixV().leftCols(sigma.size()) * inv.asDiagonal() *
                           svd.matrixU().leftCols(sigma.size()).transpose());
  };
  if (std::min(m.rows(), m.cols()) > kBdcSwitch)
    return invert(Eigen::BDCSVD<Eigen::MatrixXd>(m, Eigen::ComputeFullU | Eigen::ComputeFullV));
  return invert(Eigen::JacobiSVD<Eigen::MatrixXd>(m, Eigen::ComputeFullU | Eigen::ComputeFullV));
}

Projector orthogonal_projector(const Subspace& s) {
  return Projector{s.basis * s.basis.transpose(), Projector::Kind::Orthogonal};
}

Projector projector_onto_along(const Subspace& onto, const Subspace& along) {
  if (onto.ambient_dim != along.ambient_dim)
    throw DimensionMismatch("projector subspaces need equal ambient dimensions");
  const int n = onto.ambient_dim;
  if (onto.dim() + along.dim() != n)
    throw DimensionMismatch("projector subspaces are not complementary (dimension count)");
  Eigen::MatrixXd basis(n, n);
  basis.leftCols(onto.dim()) = onto.basis;
  basis.rightCols(along.dim()) = along.basis;
  Eigen::MatrixXd target(n, n);
  target.setZero();
  target.leftCols(onto.dim()) = onto.basis;
  // P maps basis -> [onto-part, 0]; solve P * basis = target.
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis.transpose());
  if (std::abs(lu.determinant()) < 1e-14)
    throw DimensionMismatch("projector subspaces are not complementary (singular frame)");
  Eigen::MatrixXd p = lu.solve(target.transpose()).transpose();
  return Projector{p, Projector::Kind::Oblique};
}

Subspace subspace_sum(const Subspace& a, const Subspace& b, const TolerancePolicy& tol) {
  if (a.ambient_dim != b.ambient_dim)
    throw DimensionMismatch("subspace sum needs equal ambient dimensions");
  Eigen::MatrixXd joined(a.ambient_dim, a.dim() + b.dim());
  joined.leftCols(a.dim()) = a.basis;
  joined.rightCols(b.dim()) = b.basis;
  if (joined.cols() == 0) return Subspace::zero(a.ambient_dim);
  return column_space(joined, tol);
}

Subspace orthogonal_complement(const Subspace& s, const TolerancePolicy& tol) {
  if (s.dim() == 0) return Subspace::full(s.ambient_dim);
  return fundamental_subspaces(s.basis.transpose(), tol).kernel;
}

double subspace_distance(const Subspace& a, const Subspace& b) {
  const Eigen::MatrixXd diff = a.basis * a.basis.transpose() - b.basis * b.basis.transpose();
  if (diff.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(diff);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

Eigen::MatrixXd align_basis(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& reference) {
  if (basis.cols() != reference.cols() || basis.rows() != reference.rows())
    throw DimensionMismatch("basis alignment needs equal shapes");
  if (basis.cols() == 0) return basis;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.transpose() * reference,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  return basis * (svd.matrixU() * svd.matrixV().transpose());
}

}  // namespace dae
