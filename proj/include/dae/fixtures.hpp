#pragma once

#include "dae/problem.hpp"

namespace dae::fixtures {

// m=2 pair with constant rank E whose flow collapses at t=1:
// E = [[1, -t], [1, -t]], F = 2 I on [0, 2].
DaeProblem flow_singularity();

// m=7 constant pair, E made of nilpotent Jordan blocks of sizes 3, 2, 2, F = I.
// Regular with mu=3, r=4, theta=(3,1,0), d=0.
DaeProblem jordan_blocks();

// m=4 pair E = [[0,1,a,0],[0,0,0,b],[0,0,0,1],[0,0,0,0]], F = I on [t0, t1].
// Regular with mu=3, theta=(1,1,0) where a+b != 0 and mu=2, theta=(2,0) where
// a+b vanishes identically; zeros of a+b are harmless critical points.
DaeProblem theta_jump(const PiecewiseMatrixFunction& alpha, const PiecewiseMatrixFunction& beta);

// The alpha(t)=t^2, beta(t)=1 instance of theta_jump on [0, 1].
DaeProblem theta_jump_regular();

// The beta = -alpha instance (alpha = t^2) on [0, 1]: mu=2 everywhere.
DaeProblem theta_jump_degenerate();

// alpha(t)=t, beta(t)=-1/2 on [0, 1]: harmless critical point at t=0.5.
DaeProblem theta_jump_crossing();

// m=3 switched-nilpotent pair in canonical block form, alpha = 0 on [-1,0) and
// t^3 on [0,1]: index one left of 0, index two right of it, d=1 throughout.
DaeProblem switched_nilpotent();

// m=3 pair E = diag(1,1,0), F = [[0,0,b],[1,1,0],[1,0,0]] with b(t)=t on
// [-1,1]: loses solvability at t=0.
DaeProblem solvability_loss();

// m=3 pair E = [[0,a,0],[0,0,1],[0,0,0]], F = [[-6,0,0],[0,1,0],[1,0,1]].
DaeProblem rank_cases(const PiecewiseMatrixFunction& alpha);
DaeProblem rank_cases_linear();     // a(t) = t on [-1, 1]
DaeProblem rank_cases_quadratic();  // a(t) = t^2 on [-1, 1]
DaeProblem rank_cases_constant();   // a(t) = 1 on [-1, 1]

// m=2 pair E = [[0,t],[0,0]], F = [[0,2],[1,1]] on [-1,1]: rank E drops at
// t=0 and the scalar inherent ODE becomes singular there.
DaeProblem flow_rank_drop();

// Scalar helper: polynomial in t with the given coefficients on [a, b].
PiecewiseMatrixFunction scalar_poly(const std::vector<double>& coeffs, double a, double b);

}  // namespace dae::fixtures
