#include "dae/fixtures.hpp"

namespace dae::fixtures {

namespace {

Eigen::MatrixXd zeros(int m) { return Eigen::MatrixXd::Zero(m, m); }

// (scalar function) * (constant matrix), as an exact piecewise polynomial.
PiecewiseMatrixFunction scalar_times(const PiecewiseMatrixFunction& s, const Eigen::MatrixXd& m) {
  std::vector<Segment> segs;
  for (const auto& seg : s.segments()) {
    Segment out;
    out.t0 = seg.t0;
    out.t1 = seg.t1;
    for (const auto& c : seg.coeffs) out.coeffs.push_back(c(0, 0) * m);
    segs.push_back(std::move(out));
  }
  return PiecewiseMatrixFunction::from_segments(static_cast<int>(m.rows()),
                                                static_cast<int>(m.cols()), std::move(segs),
                                                s.smoothness_order());
}

}  // namespace

PiecewiseMatrixFunction scalar_poly(const std::vector<double>& coeffs, double a, double b) {
  std::vector<Eigen::MatrixXd> c;
  for (double v : coeffs) c.push_back(Eigen::MatrixXd::Constant(1, 1, v));
  return PiecewiseMatrixFunction::polynomial(c, a, b);
}

DaeProblem flow_singularity() {
  Eigen::MatrixXd e0(2, 2), e1(2, 2);
  e0 << 1, 0, 1, 0;
  e1 << 0, -1, 0, -1;
  auto e = PiecewiseMatrixFunction::polynomial({e0, e1}, 0.0, 2.0);
  auto f = PiecewiseMatrixFunction::constant(2.0 * Eigen::MatrixXd::Identity(2, 2), 0.0, 2.0);
  return DaeProblem::make(e, f);
}

DaeProblem jordan_blocks() {
  Eigen::MatrixXd e = zeros(7);
  e(0, 1) = 1;
  e(1, 2) = 1;
  e(3, 4) = 1;
  e(5, 6) = 1;
  auto ef = PiecewiseMatrixFunction::constant(e, 0.0, 1.0);
  auto ff = PiecewiseMatrixFunction::constant(Eigen::MatrixXd::Identity(7, 7), 0.0, 1.0);
  return DaeProblem::make(ef, ff);
}

DaeProblem theta_jump(const PiecewiseMatrixFunction& alpha, const PiecewiseMatrixFunction& beta) {
  const double a = alpha.domain_begin();
  const double b = alpha.domain_end();
  // E = E_base + alpha * P13 + beta * P24.
  Eigen::MatrixXd base = zeros(4);
  base(0, 1) = 1;
  base(2, 3) = 1;
  Eigen::MatrixXd p13 = zeros(4), p24 = zeros(4);
  p13(0, 2) = 1;
  p24(1, 3) = 1;
  auto e = add(PiecewiseMatrixFunction::constant(base, a, b),
               add(scalar_times(alpha, p13), scalar_times(beta, p24)));
  auto f = PiecewiseMatrixFunction::constant(Eigen::MatrixXd::Identity(4, 4), a, b);
  return DaeProblem::make(e, f);
}

DaeProblem theta_jump_regular() {
  return theta_jump(scalar_poly({0, 0, 1}, 0.0, 1.0), scalar_poly({1}, 0.0, 1.0));
}

DaeProblem theta_jump_degenerate() {
  return theta_jump(scalar_poly({0, 0, 1}, 0.0, 1.0), scalar_poly({0, 0, -1}, 0.0, 1.0));
}

DaeProblem theta_jump_crossing() {
  return theta_jump(scalar_poly({0, 1}, 0.0, 1.0), scalar_poly({-0.5}, 0.0, 1.0));
}

DaeProblem switched_nilpotent() {
  Segment left;
  left.t0 = -1.0;
  left.t1 = 0.0;
  Eigen::MatrixXd e_base = zeros(3);
  e_base(0, 0) = 1;
  left.coeffs = {e_base};
  Segment right;
  right.t0 = 0.0;
  right.t1 = 1.0;
  Eigen::MatrixXd cubic = zeros(3);
  cubic(1, 2) = 1;
  right.coeffs = {e_base, zeros(3), zeros(3), cubic};
  auto e = PiecewiseMatrixFunction::from_segments(3, 3, {left, right}, 2);
  auto f = PiecewiseMatrixFunction::constant(Eigen::MatrixXd::Identity(3, 3), -1.0, 1.0);
  return DaeProblem::make(e, f);
}

DaeProblem solvability_loss() {
  Eigen::MatrixXd e = zeros(3);
  e(0, 0) = 1;
  e(1, 1) = 1;
  Eigen::MatrixXd f0 = zeros(3), f1 = zeros(3);
  f0(1, 0) = 1;
  f0(1, 1) = 1;
  f0(2, 0) = 1;
  f1(0, 2) = 1;  // beta(t) = t enters F(0,2)
  auto e_fn = PiecewiseMatrixFunction::constant(e, -1.0, 1.0);
  auto f_fn = PiecewiseMatrixFunction::polynomial({f0, f1}, -1.0, 1.0);
  return DaeProblem::make(e_fn, f_fn);
}

DaeProblem rank_cases(const PiecewiseMatrixFunction& alpha) {
  const double a = alpha.domain_begin();
  const double b = alpha.domain_end();
  Eigen::MatrixXd base = zeros(3);
  base(1, 2) = 1;
  Eigen::MatrixXd p12 = zeros(3);
  p12(0, 1) = 1;
  auto e = add(PiecewiseMatrixFunction::constant(base, a, b), scalar_times(alpha, p12));
  Eigen::MatrixXd f(3, 3);
  f << -6, 0, 0, 0, 1, 0, 1, 0, 1;
  return DaeProblem::make(e, PiecewiseMatrixFunction::constant(f, a, b));
}

DaeProblem rank_cases_linear() { return rank_cases(scalar_poly({0, 1}, -1.0, 1.0)); }
DaeProblem rank_cases_quadratic() { return rank_cases(scalar_poly({0, 0, 1}, -1.0, 1.0)); }
DaeProblem rank_cases_constant() { return rank_cases(scalar_poly({1}, -1.0, 1.0)); }

DaeProblem flow_rank_drop() {
  Eigen::MatrixXd e1 = zeros(2);
  e1(0, 1) = 1;
  auto e = PiecewiseMatrixFunction::polynomial({zeros(2), e1}, -1.0, 1.0);
  Eigen::MatrixXd f(2, 2);
  f << 0, 2, 1, 1;
  return DaeProblem::make(e, PiecewiseMatrixFunction::constant(f, -1.0, 1.0));
}

}  // namespace dae::fixtures
