#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dae/arrays.hpp"
#include "dae/fixtures.hpp"
#include "dae/generator.hpp"

using namespace dae;

TEST_CASE("array assembly: base cases and binomial weights") {
  auto p = fixtures::theta_jump_regular();  // alpha = t^2, beta = 1
  const double t = 0.3;

  SUBCASE("k = 0 reproduces the pair") {
    auto s = build_arrays(p, t, 0);
    CHECK((s.E_arr - FrozenPiece(p, t).E(t)).norm() == 0.0);
    CHECK((s.F_arr - FrozenPiece(p, t).F(t)).norm() == 0.0);
  }

  SUBCASE("k = 1 block layout for the 4x4 fixture") {
    auto s = build_arrays(p, t, 1);
    REQUIRE(s.E_arr.rows() == 8);
    const double a = t * t, da = 2 * t, b = 1.0, db = 0.0;
    Eigen::MatrixXd expected(8, 8);
    expected << 0, 1, a, 0, 0, 0, 0, 0,    //
        0, 0, 0, b, 0, 0, 0, 0,            //
        0, 0, 0, 1, 0, 0, 0, 0,            //
        0, 0, 0, 0, 0, 0, 0, 0,            //
        1, 0, da, 0, 0, 1, a, 0,           //
        0, 1, 0, db, 0, 0, 0, b,           //
        0, 0, 1, 0, 0, 0, 0, 1,            //
        0, 0, 0, 1, 0, 0, 0, 0;
    CHECK((s.E_arr - expected).norm() < 1e-14);
  }

  SUBCASE("constant pair: off-diagonal blocks reduce to F") {
    auto jp = fixtures::jordan_blocks();
    auto s = build_arrays(jp, 0.5, 2);
    const Eigen::MatrixXd e = FrozenPiece(jp, 0.5).E(0.5);
    const Eigen::MatrixXd f = Eigen::MatrixXd::Identity(7, 7);
    CHECK((s.E_arr.block(7, 0, 7, 7) - f).norm() == 0.0);        // E' + F = F
    CHECK((s.E_arr.block(14, 7, 7, 7) - f).norm() == 0.0);       // 2E' + F = F
    CHECK((s.E_arr.block(14, 0, 7, 7)).norm() == 0.0);           // E'' + 2F' = 0
    CHECK((s.E_arr.block(14, 14, 7, 7) - e).norm() == 0.0);
  }

  SUBCASE("D and B differ from the stacked form only in the top-left block") {
    auto s = build_arrays(p, t, 2);
    CHECK((s.D_arr.bottomRows(8) - s.B_arr.bottomRows(8)).norm() == 0.0);
    CHECK((s.D_arr.block(0, 0, 4, 4) - FrozenPiece(p, t).E(t)).norm() == 0.0);
    CHECK(s.D_arr.block(0, 4, 4, 8).norm() == 0.0);
    const Eigen::MatrixXd pp = s.B_arr.block(0, 0, 4, 4);
    CHECK((pp * pp - pp).norm() < 1e-12);  // orthoprojector onto (ker E)^perp
  }
}

TEST_CASE("array ranks of the theta-jump pair") {
  SUBCASE("nonvanishing branch: r_[1] = 5, r_[2] = 8, rho = (3,3,4)") {
    auto p = fixtures::theta_jump_regular();
    auto prof = array_profile(p, 0.3, 3);
    CHECK(prof.r_arr[0] == 2);
    CHECK(prof.r_arr[1] == 5);
    CHECK(prof.r_arr[2] == 8);
    CHECK(prof.rho[0] == 3);
    CHECK(prof.rho[1] == 3);
    CHECK(prof.rho[2] == 4);
    auto cp = theta_from_arrays(prof);
    CHECK(cp.thetas == std::vector<int>{1, 1, 0});
    CHECK(cp.mu == 3);
    CHECK(cp.d == 0);
  }
  SUBCASE("vanishing branch: r_[1] = 4 and theta = (2,0)") {
    auto p = fixtures::theta_jump_degenerate();
    auto prof = array_profile(p, 0.3, 3);
    CHECK(prof.r_arr[1] == 4);
    CHECK(prof.r_arr[2] == 8);
    auto cp = theta_from_arrays(prof);
    CHECK(cp.thetas == std::vector<int>{2, 0});
    CHECK(cp.mu == 2);
  }
}

TEST_CASE("array ranks of the constant Jordan-block pair follow km + r - sum(theta)") {
  auto p = fixtures::jordan_blocks();
  auto prof = array_profile(p, 0.5, 3);
  // Independent check by direct assembly: with r=4 and theta=(3,1,0) the ranks
  // are 7k + 4 - sum_{i<k} theta_i.
  CHECK(prof.r_arr[0] == 4);
  CHECK(prof.r_arr[1] == 8);
  CHECK(prof.r_arr[2] == 14);
  CHECK(prof.r_arr[3] == 21);
  auto cp = theta_from_arrays(prof);
  CHECK(cp.thetas == std::vector<int>{3, 1, 0});
  CHECK(cp.d == 0);
}

TEST_CASE("rank case table of the 3x3 rank-cases pair") {
  // r_[1] = 5 / 4 / 3 according to (a != 0) / (a = 0, a' != 0) / (a = a' = 0, a'' != 0).
  auto lin = fixtures::rank_cases_linear();
  CHECK(array_profile(lin, 0.5, 1).r_arr[1] == 5);   // a = t at t=0.5
  CHECK(array_profile(lin, 0.0, 1).r_arr[1] == 4);   // a = 0, a' = 1
  auto quad = fixtures::rank_cases_quadratic();
  CHECK(array_profile(quad, 0.0, 1).r_arr[1] == 3);  // a = a' = 0, a'' = 2
  auto cst = fixtures::rank_cases_constant();
  CHECK(array_profile(cst, 0.0, 1).r_arr[1] == 5);
}

TEST_CASE("solvability violation is flagged where [E_[1] F_[1]] loses row rank") {
  auto p = fixtures::solvability_loss();
  auto at0 = array_profile(p, 0.0, 1);
  CHECK_FALSE(at0.full_row_rank_ok[1]);
  CHECK(at0.any_solvability_violation());
  auto off = array_profile(p, 0.5, 1);
  CHECK(off.full_row_rank_ok[0]);
  CHECK(off.full_row_rank_ok[1]);
}

TEST_CASE("rank identities of the D and B arrays") {
  for (auto* make : {+[] { return fixtures::jordan_blocks(); },
                     +[] { return fixtures::theta_jump_regular(); },
                     +[] { return fixtures::switched_nilpotent(); },
                     +[] { return fixtures::flow_singularity(); }}) {
    auto p = make();
    // Probes include a critical point (t in the domain of every fixture).
    for (double t : {0.25, 0.5, 1.0}) {
      if (t < p.t_begin() || t > p.t_end()) continue;
      auto prof = array_profile(p, t, 3);
      for (int k = 1; k <= 3; ++k) {
        const int expected = prof.m - (prof.m - prof.rho[k - 1]) + prof.r_arr[k - 1];
        CHECK(prof.rank_D[k] == expected);
        CHECK(prof.rank_B[k] == expected);
        // Sandwich r_[k] + r <= r_[k+1] <= r_[k] + m at every probe.
        if (k + 1 <= 3) {
          CHECK(prof.r_arr[k + 1] >= prof.r_arr[k] + prof.r_arr[0] - (prof.m - prof.rho[0]));
          CHECK(prof.r_arr[k + 1] >= prof.r_arr[k]);
          CHECK(prof.r_arr[k + 1] <= prof.r_arr[k] + prof.m);
        }
      }
    }
  }
}

TEST_CASE("T and V projector ranks on regular probes") {
  auto p = fixtures::theta_jump_regular();
  auto prof = array_profile(p, 0.3, 3);
  // rank T_k = theta_{k-1}, rank V_k = r - sum_{i<k} theta_i with theta=(1,1,0).
  CHECK(prof.rank_T[1] == 1);
  CHECK(prof.rank_T[2] == 1);
  CHECK(prof.rank_T[3] == 0);
  CHECK(prof.rank_V[1] == 1);
  CHECK(prof.rank_V[2] == 0);
  CHECK(prof.rank_V[3] == 0);
  // rank T_k + rank V_k = dim ker(W_[k-1] F_[k-1]) = dim S_[k-1].
  for (int k = 1; k <= 3; ++k) CHECK(prof.rank_T[k] + prof.rank_V[k] == prof.s_dims[k - 1]);
}

TEST_CASE("index notions over probe sets") {
  SUBCASE("switched nilpotent: diff index 2 on the full interval, 1 left of 0") {
    auto p = fixtures::switched_nilpotent();
    auto full = index_report(p, {-0.8, -0.3, 0.4, 0.9}, 3);
    REQUIRE(full.mu_diff.defined());
    CHECK(*full.mu_diff.value == 2);
    CHECK_FALSE(full.mu_rdiff.defined());  // r_[0] jumps across 0

    auto left = index_report(p, {-0.9, -0.5, -0.1}, 3);
    REQUIRE(left.mu_diff.defined());
    CHECK(*left.mu_diff.value == 1);
    REQUIRE(left.mu_rdiff.defined());
    CHECK(*left.mu_rdiff.value == 1);
    CHECK(left.consistent);
  }
  SUBCASE("theta-jump regular branch: all four notions give 3") {
    auto p = fixtures::theta_jump_regular();
    auto rep = index_report(p, {0.2, 0.5, 0.8}, 4);
    REQUIRE(rep.mu_diff.defined());
    REQUIRE(rep.mu_rdiff.defined());
    REQUIRE(rep.mu_pbdiff.defined());
    REQUIRE(rep.sf_mu_hat.defined());
    CHECK(*rep.mu_diff.value == 3);
    CHECK(*rep.mu_rdiff.value == 3);
    CHECK(*rep.mu_pbdiff.value == 3);
    CHECK(*rep.sf_mu_hat.value == 2);
    CHECK(rep.consistent);
  }
  SUBCASE("regular ODE: every index is zero") {
    auto e = PiecewiseMatrixFunction::constant(Eigen::MatrixXd::Identity(2, 2), 0.0, 1.0);
    auto f = PiecewiseMatrixFunction::constant(Eigen::MatrixXd::Zero(2, 2), 0.0, 1.0);
    auto p = DaeProblem::make(e, f);
    auto rep = index_report(p, {0.2, 0.8}, 2);
    CHECK(*rep.mu_diff.value == 0);
    CHECK(*rep.mu_pbdiff.value == 0);
    auto prof = theta_from_arrays(array_profile(p, 0.5, 2));
    CHECK(prof.mu == 0);
    CHECK(prof.d == 2);
    CHECK(prof.thetas.empty());
  }
}

TEST_CASE("B_[mu] of a generated regular pair is 1-full at the index") {
  dae::ScfSpec spec;
  spec.thetas = {1, 0};
  spec.d = 1;
  spec.seed = 8;
  spec.fill = {1, 0.3};
  auto p = dae::build_scf_pair(spec, 0.0, 1.0);
  auto prof = array_profile(p, 0.4, 3);
  CHECK(prof.b_one_full[2]);       // at mu = 2
  CHECK_FALSE(prof.b_one_full[1]); // below the index
}
