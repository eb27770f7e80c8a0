#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dae/problem.hpp"
#include "dae/profile.hpp"

namespace dae {

// Derivative arrays of the k-times differentiated DAE at one point. E_arr is
// the (k+1)m square block lower triangular array with E on the diagonal and
// binomially weighted derivative blocks below; D_arr and B_arr replace the top
// block row by [E 0] and [P 0] (P = E^+ E).
struct DerivativeArrayStack {
  int k = 0;
  double at_t = 0.0;
  Eigen::MatrixXd E_arr;  // (k+1)m x (k+1)m
  Eigen::MatrixXd F_arr;  // (k+1)m x m
  Eigen::MatrixXd D_arr;  // (k+1)m x (k+1)m (k >= 1)
  Eigen::MatrixXd B_arr;  // (k+1)m x (k+1)m (k >= 1)
};

DerivativeArrayStack build_arrays(const FrozenPiece& piece, double t, int k);
DerivativeArrayStack build_arrays(const DaeProblem& problem, double t, int k);

// Stacked right-hand side (q, q', ..., q^(k)) at t.
Eigen::VectorXd stacked_rhs(const FrozenPiece& piece, double t, int k);

// Rank data of the arrays at one point, levels 0..k_max.
struct ArrayProfile {
  double at_t = 0.0;
  int m = 0;
  std::vector<int> r_arr;               // rank E_[j]
  std::vector<bool> full_row_rank_ok;   // rank [E_[j] F_[j]] == m(j+1)
  std::vector<int> s_dims;              // dim S_[j]
  std::vector<int> rho;                 // rho_j = m - dim(ker E cap S_[j])
  std::vector<int> rank_T;              // rank T_j, j >= 1 (index 0 unused)
  std::vector<int> rank_V;              // rank V_j, j >= 1 (index 0 unused)
  std::vector<int> rank_D;              // rank D_[j], j >= 1 (index 0 = rank E)
  std::vector<int> rank_B;              // rank B_[j], j >= 1 (index 0 = rank E)
  std::vector<bool> e_one_full;         // E_[j] 1-full (leading block m)
  std::vector<bool> b_one_full;         // B_[j] 1-full, j >= 1
  std::vector<std::string> warnings;

  bool any_solvability_violation() const {
    for (bool ok : full_row_rank_ok)
      if (!ok) return true;
    return false;
  }
};

ArrayProfile array_profile(const DaeProblem& problem, double t, int k_max);

// One of the four array-based index notions, or the reason it is undefined.
struct IndexValue {
  std::optional<int> value;
  std::string reason;  // set when undefined
  bool defined() const { return value.has_value(); }
};

struct IndexReport {
  IndexValue mu_diff;
  IndexValue mu_rdiff;
  IndexValue mu_pbdiff;
  IndexValue sf_mu_hat;
  bool consistent = false;  // all defined values agree (mu_diff = mu_pbdiff = ... = sf+1)
  std::vector<ArrayProfile> probes;
};

IndexReport index_report(const DaeProblem& problem, const std::vector<double>& t_probes, int k_max);

// Canonical profile from one point's array ranks: theta_i = m + r_[i] - r_[i+1].
// Rank constancy across probes is the caller's responsibility (scanner / report).
CharacteristicProfile theta_from_arrays(const ArrayProfile& profile);

// The subspace S_[k] = ker(W_[k] F_[k]) at one point.
Subspace array_constraint_space(const DaeProblem& problem, double t, int k);

}  // namespace dae
