#pragma once

#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <random>

#include "dae/problem.hpp"
#include "dae/profile.hpp"

namespace dae {

enum class ScfVariant { FullColumn, FullRow };

struct PolynomialFill {
  int degree = 0;
  double magnitude = 0.0;  // 0 = structural zeros off the secondary diagonal
};

// Recipe for a benchmark pair in structured canonical form E = diag(I_d, N),
// F = diag(Omega, I_l) with N strictly block upper triangular and full-rank
// secondary-diagonal blocks encoding the requested theta profile.
struct ScfSpec {
  int d = 0;
  std::vector<int> thetas;  // nonincreasing, terminal zero (empty: index 0)
  ScfVariant variant = ScfVariant::FullColumn;
  std::optional<PiecewiseMatrixFunction> omega;  // d x d; zero when absent
  PolynomialFill fill;
  std::uint64_t seed = 0;

  std::vector<int> block_sizes() const;  // l_1..l_mu
  int m() const;
  CharacteristicProfile expected_profile() const;

  nlohmann::json to_json() const;
  static ScfSpec from_json(const nlohmann::json& j);
};

DaeProblem build_scf_pair(const ScfSpec& spec, double t0, double t1);

struct EquivalenceTransform {
  PiecewiseMatrixFunction L;
  PiecewiseMatrixFunction K;
  PiecewiseMatrixFunction K_deriv;
  double condition_bound = 50.0;
};

// Random polynomial L, K of the given degree, pointwise nonsingular with
// condition number <= condition_bound on a validation grid (rejection
// sampling, deterministic in the rng state).
EquivalenceTransform random_equivalence(int m, double t0, double t1, int degree,
                                        double condition_bound, std::mt19937_64& rng);

// {E, F} -> {L E K, L F K + L E K'} as exact polynomial products.
DaeProblem apply_equivalence(const DaeProblem& problem, const EquivalenceTransform& transform);

// Manufactured right-hand side q = E x* ' + F x* for a reference solution x*.
DaeProblem manufacture_problem(const DaeProblem& problem, const PiecewiseMatrixFunction& x_star);

// Rank oracle for derivative arrays of strictly block upper triangular N:
// assembles the array of depth k at t and returns its rank together with
// rank N(t)^{k+1}. For full column-rank or full row-rank secondary diagonals
// these agree as rank = k*l + rank N^{k+1}.
struct SutRanks {
  int rank_array = 0;
  int rank_power = 0;
};

SutRanks sut_rank_oracle(const PiecewiseMatrixFunction& n, const std::vector<int>& block_sizes,
                         int k, double t, const TolerancePolicy& tol);

// Random strictly block upper triangular matrix function with full column-rank
// (or row-rank) secondary blocks, for oracle exercises.
PiecewiseMatrixFunction random_sut(const std::vector<int>& block_sizes, ScfVariant variant,
                                   int degree, double t0, double t1, std::mt19937_64& rng,
                                   double fill_magnitude = 0.5);

}  // namespace dae
