#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dae/fixtures.hpp"
#include "dae/generator.hpp"
#include "dae/solver.hpp"
#include "dae/tractability.hpp"

using namespace dae;

namespace {

// E = diag(1, 0), F = I, q = (1, t): x1' + x1 = 1, x2 = t.
DaeProblem index1_canonical() {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(2, 2);
  e(0, 0) = 1;
  auto ef = PiecewiseMatrixFunction::constant(e, 0.0, 1.0);
  auto ff = PiecewiseMatrixFunction::constant(Eigen::MatrixXd::Identity(2, 2), 0.0, 1.0);
  Eigen::MatrixXd q0(2, 1), q1(2, 1);
  q0 << 1, 0;
  q1 << 0, 1;
  auto qf = PiecewiseMatrixFunction::polynomial({q0, q1}, 0.0, 1.0);
  return DaeProblem::make(ef, ff, qf);
}

PiecewiseMatrixFunction poly_solution(const std::vector<Eigen::VectorXd>& coeffs, double a,
                                      double b) {
  std::vector<Eigen::MatrixXd> c;
  for (const auto& v : coeffs) c.push_back(v);
  return PiecewiseMatrixFunction::polynomial(c, a, b);
}

}  // namespace

TEST_CASE("consistent initialization") {
  SUBCASE("homogeneous zero-freedom pair forces x0 = 0") {
    auto p = fixtures::theta_jump_regular();
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(4, 1);
    auto q = PiecewiseMatrixFunction::constant(z, 0.0, 1.0);
    auto hp = DaeProblem::make(p.E, p.F, q);
    Eigen::VectorXd alpha(4);
    alpha << 3, -1, 7, 2;
    auto cv = consistent_initialization(hp, 0.4, alpha, 3);
    CHECK(cv.x0.norm() < 1e-10);
  }
  SUBCASE("constraint components enforced, free components preserved") {
    auto p = index1_canonical();
    Eigen::VectorXd alpha(2);
    alpha << 5, 99;
    auto cv = consistent_initialization(p, 0.0, alpha, 1);
    CHECK(cv.x0(0) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(std::abs(cv.x0(1)) < 1e-12);
  }
  SUBCASE("idempotence: re-running with alpha = x0 returns x0") {
    auto p = index1_canonical();
    Eigen::VectorXd alpha(2);
    alpha << -2, 4;
    auto cv = consistent_initialization(p, 0.3, alpha, 1);
    auto cv2 = consistent_initialization(p, 0.3, cv.x0, 1);
    CHECK((cv.x0 - cv2.x0).norm() < 1e-12);
  }
  SUBCASE("infeasible constraints at a solvability loss") {
    auto p = fixtures::solvability_loss();
    Eigen::MatrixXd q0 = Eigen::MatrixXd::Zero(3, 1);
    q0(0, 0) = 1;  // generic q: first component nonzero
    auto q = PiecewiseMatrixFunction::constant(q0, -1.0, 1.0);
    auto hp = DaeProblem::make(p.E, p.F, q);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS((void)consistent_initialization(hp, 0.0, alpha, 2), InfeasibleConstraints);
    CHECK_NOTHROW((void)consistent_initialization(hp, 0.5, alpha, 2));
  }
  SUBCASE("forced component is independent of the guess") {
    ScfSpec spec;
    spec.thetas = {1, 0};
    spec.d = 1;
    spec.seed = 21;
    spec.fill = {1, 0.3};
    auto base = build_scf_pair(spec, 0.0, 1.0);
    const int m = spec.m();
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
    auto mp = manufacture_problem(base, poly_solution({ones, 0.5 * ones}, 0.0, 1.0));

    auto chain = admissible_chain_at(mp, 0.2);
    auto cs = canonical_subspaces_at(mp, 0.2, chain);
    const Eigen::MatrixXd pi_can =
        projector_onto_along(cs.s_can, cs.n_can).matrix;

    Eigen::VectorXd a1 = Eigen::VectorXd::LinSpaced(m, 1.0, m);
    Eigen::VectorXd a2 = a1 + pi_can * Eigen::VectorXd::Constant(m, 0.7);
    auto c1 = consistent_initialization(mp, 0.2, a1, 2);
    auto c2 = consistent_initialization(mp, 0.2, a2, 2);
    const Eigen::MatrixXd off = Eigen::MatrixXd::Identity(m, m) - pi_can;
    CHECK((off * (c1.x0 - c2.x0)).norm() < 1e-8);
    // The affine freedom at t0 has dimension d = 1.
    CHECK(cs.s_can.dim() == 1);
  }
}

TEST_CASE("completion integration on the canonical index-1 problem") {
  auto p = index1_canonical();
  IvpSpec spec;
  spec.t0 = 0.0;
  spec.t_end = 1.0;
  spec.step = 1e-2;
  spec.alpha = Eigen::VectorXd::Zero(2);
  auto sol = integrate_completion(p, spec);
  // x1(t) = 1 - e^{-t}; x2(t) = t.
  const Eigen::VectorXd xe = sol.x.back();
  CHECK(xe(0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-8));
  CHECK(xe(1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sol.residual_max < 1e-8);
  CHECK(sol.constraint_drift_max < 1e-6);
}

TEST_CASE("manufactured solution on a transformed index-3 pair") {
  ScfSpec spec;
  spec.thetas = {1, 1, 0};
  spec.d = 1;
  spec.seed = 2;
  spec.fill = {1, 0.3};
  Eigen::MatrixXd w0(1, 1), w1(1, 1);
  w0 << 0.5;
  w1 << 1.0;
  spec.omega = PiecewiseMatrixFunction::polynomial({w0, w1}, 0.0, 1.0);
  auto base = build_scf_pair(spec, 0.0, 1.0);
  std::mt19937_64 rng(7);
  auto tr = random_equivalence(spec.m(), 0.0, 1.0, 1, 20.0, rng);
  auto moved = apply_equivalence(base, tr);

  // Polynomial reference of degree 5.
  std::vector<Eigen::VectorXd> cs;
  std::mt19937_64 rng2(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k <= 5; ++k) {
    Eigen::VectorXd v(spec.m());
    for (int i = 0; i < v.size(); ++i) v(i) = u(rng2);
    cs.push_back(v);
  }
  auto x_star = poly_solution(cs, 0.0, 1.0);
  auto mp = manufacture_problem(moved, x_star);

  IvpSpec ivp;
  ivp.t0 = 0.0;
  ivp.t_end = 1.0;
  ivp.step = 1e-2;
  ivp.alpha = x_star.eval_at(0.0).col(0);
  auto sol = integrate_completion(mp, ivp);
  CHECK(sol.k_used == 3);
  double max_err = 0.0;
  for (size_t i = 0; i < sol.grid.size(); ++i)
    max_err = std::max(max_err, (sol.x[i] - x_star.eval_at(sol.grid[i]).col(0)).norm());
  CHECK(max_err < 1e-6);
}

TEST_CASE("fourth-order convergence under step halving") {
  ScfSpec spec;
  spec.thetas = {1, 0};
  spec.d = 1;
  spec.seed = 31;
  spec.fill = {1, 0.3};
  Eigen::MatrixXd w0(1, 1);
  w0 << 1.0;
  spec.omega = PiecewiseMatrixFunction::constant(w0, 0.0, 1.0);
  auto base = build_scf_pair(spec, 0.0, 1.0);

  std::vector<Eigen::VectorXd> cs;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k <= 5; ++k) {
    Eigen::VectorXd v(spec.m());
    for (int i = 0; i < v.size(); ++i) v(i) = u(rng);
    cs.push_back(v);
  }
  auto x_star = poly_solution(cs, 0.0, 1.0);
  auto mp = manufacture_problem(base, x_star);

  auto max_err_for = [&](double h) {
    IvpSpec ivp;
    ivp.t0 = 0.0;
    ivp.t_end = 1.0;
    ivp.step = h;
    ivp.alpha = x_star.eval_at(0.0).col(0);
    auto sol = integrate_completion(mp, ivp);
    double e = 0.0;
    for (size_t i = 0; i < sol.grid.size(); ++i)
      e = std::max(e, (sol.x[i] - x_star.eval_at(sol.grid[i]).col(0)).norm());
    return e;
  };
  const double e1 = max_err_for(1e-2);
  const double e2 = max_err_for(5e-3);
  const double ratio = e1 / e2;
  CHECK(ratio > 10.0);
  CHECK(ratio < 24.0);
}

TEST_CASE("accurately stated initial conditions") {
  SUBCASE("canonical pair: G = [I_d 0] accurate, G = [0 I_a] not") {
    ScfSpec spec;
    spec.thetas = {1, 0};
    spec.d = 2;
    auto p = build_scf_pair(spec, 0.0, 1.0);  // m = 4, d = 2
    Eigen::MatrixXd g_good = Eigen::MatrixXd::Zero(2, 4);
    g_good(0, 0) = 1;
    g_good(1, 1) = 1;
    CHECK(ic_accuracy_check(p, 0.2, g_good));
    Eigen::MatrixXd g_bad = Eigen::MatrixXd::Zero(2, 4);
    g_bad(0, 2) = 1;
    g_bad(1, 3) = 1;
    CHECK_FALSE(ic_accuracy_check(p, 0.2, g_bad));
  }
  SUBCASE("index-1 pair: G = E(t0) is accurate") {
    auto p = fixtures::switched_nilpotent();
    const Eigen::MatrixXd g = FrozenPiece(p, -0.5).E(-0.5);
    CHECK(ic_accuracy_check(p, -0.5, g));
  }
}

TEST_CASE("reduction route agrees with the completion route for index <= 2") {
  ScfSpec spec;
  spec.thetas = {1, 0};
  spec.d = 1;
  spec.seed = 77;
  spec.fill = {1, 0.25};
  Eigen::MatrixXd w0(1, 1);
  w0 << -0.5;
  spec.omega = PiecewiseMatrixFunction::constant(w0, 0.0, 1.0);
  auto base = build_scf_pair(spec, 0.0, 1.0);
  std::mt19937_64 rng(3);
  auto tr = random_equivalence(spec.m(), 0.0, 1.0, 1, 15.0, rng);
  auto moved = apply_equivalence(base, tr);

  std::vector<Eigen::VectorXd> cs;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::mt19937_64 rng2(4);
  for (int k = 0; k <= 3; ++k) {
    Eigen::VectorXd v(spec.m());
    for (int i = 0; i < v.size(); ++i) v(i) = u(rng2);
    cs.push_back(v);
  }
  auto x_star = poly_solution(cs, 0.0, 1.0);
  auto mp = manufacture_problem(moved, x_star);

  IvpSpec ivp;
  ivp.t0 = 0.0;
  ivp.t_end = 1.0;
  ivp.step = 5e-3;
  ivp.alpha = x_star.eval_at(0.0).col(0);

  auto completion = integrate_completion(mp, ivp);
  auto reduction = integrate_by_reduction(mp, ivp);
  REQUIRE(completion.grid.size() == reduction.grid.size());
  double gap = 0.0;
  for (size_t i = 0; i < completion.grid.size(); ++i)
    gap = std::max(gap, (completion.x[i] - reduction.x[i]).norm());
  CHECK(gap < 1e-4);
}
