#pragma once

#include <string>
#include <vector>

#include "dae/problem.hpp"
#include "dae/profile.hpp"

namespace dae {

// One level of the admissible matrix-function chain G_i = G_{i-1} + B_{i-1} Q_{i-1}.
struct ChainLevel {
  int level = 0;
  Eigen::MatrixXd G, B;
  Eigen::MatrixXd Q, P, Pi;  // nullspace projector, complement, accumulated product
  int r_t = 0;               // rank G_i
  int u_t = 0;               // dim((N_0+...+N_{i-1}) cap N_i)
};

struct ChainResult {
  std::vector<ChainLevel> levels;  // levels 0..mu (partial when not completed)
  int mu_t = 0;                    // meaningful only when completed
  bool completed = false;          // false when the chain breaks down at a critical point
  std::string failure;             // reason when not completed
  std::vector<std::string> warnings;
};

// Builds the chain at one point with widely orthogonal projectors
// (ker Q_i = (N_0+...+N_{i-1}) + (N_i + N_0+...+N_{i-1})^perp); projector-product
// derivatives by aligned central differences over the stencil, set to exact
// zero when the projectors are constant across it.
ChainResult admissible_chain_at(const DaeProblem& problem, double t, double fd_step = 0.0,
                                int max_level = -1);

CharacteristicProfile tractability_profile(const ChainResult& chain, int m);

struct CanonicalSubspaces {
  Subspace s_can;  // flow subspace, basis from the reduction product C_0...C_{mu-1}
  Subspace n_can;  // N_0 + ... + N_{mu-1} from the chain
  double at_t = 0.0;
};

CanonicalSubspaces canonical_subspaces_at(const DaeProblem& problem, double t,
                                          const ChainResult& chain);

}  // namespace dae
