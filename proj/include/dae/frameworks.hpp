#pragma once

#include <string>
#include <vector>

#include "dae/problem.hpp"
#include "dae/profile.hpp"

namespace dae {

// Pointwise qualification / pre-regularity data of a pair {E, F}.
struct PreRegularity {
  bool qualified = false;    // rank [E F] = m
  bool pre_regular = false;  // pointwise proxy; constancy is a neighborhood property
  int r = 0;                 // rank E
  int theta = 0;             // dim(ker E cap S), S = ker(Z^T F)
  RankDecision rank_E;
};

PreRegularity pre_regularity_check(const Eigen::MatrixXd& E, const Eigen::MatrixXd& F,
                                   const TolerancePolicy& tol);

// One level of the basic (or elimination) reduction at a point.
struct ReductionLevel {
  int level = 0;
  int m_i = 0;
  int r_i = 0;
  int theta_i = 0;
  Eigen::MatrixXd E_i, F_i;
  Eigen::MatrixXd Y, Z, C;  // range / corange-annihilator / S-basis used at this level
};

enum class ReductionMode { Basic, Elimination };

struct ReductionResult {
  CharacteristicProfile profile;
  std::vector<ReductionLevel> trace;
  std::vector<std::string> warnings;
};

// Reduction chain E_{i+1} = Y_i^T E_i C_i, F_{i+1} = Y_i^T (F_i C_i + E_i C_i'),
// iterated until theta hits zero. Basis derivatives come from central
// differences of Procrustes-aligned bases over a symmetric stencil; the
// polynomial piece in force at t is extended analytically, so probes at
// breakpoints see the one-sided problem.
ReductionResult reduction_profile(const DaeProblem& problem, double t,
                                  ReductionMode mode = ReductionMode::Basic, double fd_step = 0.0);

struct DissectionResult {
  CharacteristicProfile profile;
  std::vector<int> r_dissection;  // r^D_0 = r, r^D_{i+1} = r^D_i + rank(Z_i^T F_i T_i)
  int mu_dissection = 0;
};

DissectionResult dissection_profile(const DaeProblem& problem, double t, double fd_step = 0.0);

struct StrangenessTriple {
  int level = 0;
  int r_s = 0;
  int a_s = 0;
  int s_s = 0;
  int d_s = 0;
  int v_s = 0;
};

struct StrangenessResult {
  std::vector<StrangenessTriple> triples;
  CharacteristicProfile profile;
  int mu_strangeness = 0;  // first level with s = 0
  std::vector<std::string> warnings;
};

// Strangeness chain on full-size pairs: per level the five ranks
// (r, a, s, d, v); the next pair comes from the canonical-form reduction step,
// with transformation derivatives by aligned finite differences.
StrangenessResult strangeness_profile(const DaeProblem& problem, double t, double fd_step = 0.0);

}  // namespace dae
