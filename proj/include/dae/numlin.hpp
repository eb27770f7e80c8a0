#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dae/errors.hpp"

namespace dae {

// Governs every numerical rank decision. The effective singular-value cutoff is
// max(abs_floor, rel_rank_tol * sigma_max * max(rows, cols)).
struct TolerancePolicy {
  double rel_rank_tol = 1e-10;
  double abs_floor = 1e-13;

  double cutoff(double sigma_max, Eigen::Index rows, Eigen::Index cols) const {
    return std::max(abs_floor, rel_rank_tol * sigma_max * static_cast<double>(std::max(rows, cols)));
  }
};

// A rank decision together with its audit trail. gap_ratio = sigma_r / sigma_{r+1};
// a ratio below 1e3 marks the decision as ambiguous (reported, never fatal).
struct RankDecision {
  int rank = 0;
  Eigen::VectorXd singular_values;
  double gap_ratio = std::numeric_limits<double>::infinity();
  bool ambiguous = false;
};

struct Subspace {
  int ambient_dim = 0;
  Eigen::MatrixXd basis;  // orthonormal columns; may have zero columns

  int dim() const { return static_cast<int>(basis.cols()); }
  static Subspace zero(int ambient) {
    return Subspace{ambient, Eigen::MatrixXd::Zero(ambient, 0)};
  }
  static Subspace full(int ambient) {
    return Subspace{ambient, Eigen::MatrixXd::Identity(ambient, ambient)};
  }
};

struct Projector {
  enum class Kind { Orthogonal, Oblique };
  Eigen::MatrixXd matrix;
  Kind kind = Kind::Orthogonal;
};

struct FundamentalSubspaces {
  Subspace range;     // im M
  Subspace kernel;    // ker M
  Subspace corange;   // (ker M)^perp = im M^T
  Subspace cokernel;  // (im M)^perp = ker M^T
  RankDecision rank;
};

struct IntersectionResult {
  int dim = 0;
  Subspace basis;
};

struct OneFullnessResult {
  bool is_one_full = false;
  Subspace witness_kernel;    // orthonormal kernel basis of the full matrix
  double leading_block_mass;  // largest singular value of the kernel basis' top block
};

RankDecision rank_of(const Eigen::MatrixXd& m, const TolerancePolicy& tol);

FundamentalSubspaces fundamental_subspaces(const Eigen::MatrixXd& m, const TolerancePolicy& tol);

// dim(A cap B) and an orthonormal basis, via the stacked-annihilator kernel
// null([I - P_A; I - P_B]).
IntersectionResult intersection_dim(const Subspace& a, const Subspace& b,
                                    const TolerancePolicy& tol);

// A block matrix of leading block size `block` is 1-full when every kernel
// vector has zero leading block.
OneFullnessResult one_fullness(const Eigen::MatrixXd& m, int block, const TolerancePolicy& tol);

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, const TolerancePolicy& tol);

Projector orthogonal_projector(const Subspace& s);

// Projector onto `onto` along `along`; the two must be complementary.
Projector projector_onto_along(const Subspace& onto, const Subspace& along);

// Orthonormal basis of the span of the columns of m.
Subspace column_space(const Eigen::MatrixXd& m, const TolerancePolicy& tol);

// Orthonormal basis of ker m.
Subspace kernel_space(const Eigen::MatrixXd& m, const TolerancePolicy& tol);

// Sum of subspaces (span of the union of bases).
Subspace subspace_sum(const Subspace& a, const Subspace& b, const TolerancePolicy& tol);

// Orthogonal complement within the ambient space.
Subspace orthogonal_complement(const Subspace& s, const TolerancePolicy& tol);

// Spectral norm distance between the orthogonal projectors of two subspaces.
double subspace_distance(const Subspace& a, const Subspace& b);

// Procrustes alignment: the orthogonal mix of `basis` columns closest to `reference`.
// Both must have orthonormal columns of equal count.
Eigen::MatrixXd align_basis(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& reference);

}  // namespace dae
