#include "dae/solver.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

#include "dae/arrays.hpp"
#include "dae/tractability.hpp"

namespace dae {

nlohmann::json IvpSpec::to_json() const {
  nlohmann::json j;
  j["t0"] = t0;
  j["alpha"] = std::vector<double>(alpha.data(), alpha.data() + alpha.size());
  j["t_end"] = t_end;
  j["step"] = step;
  j["k_used"] = k_used;
  return j;
}

IvpSpec IvpSpec::from_json(const nlohmann::json& j) {
  IvpSpec s;
  s.t0 = j.at("t0").get<double>();
  const auto a = j.at("alpha").get<std::vector<double>>();
  s.alpha = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
  s.t_end = j.at("t_end").get<double>();
  s.step = j.value("step", 1e-2);
  s.k_used = j.value("k_used", 0);
  return s;
}

IvpSpec IvpSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open ivp file: " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

ConsistentValue consistent_initialization(const DaeProblem& problem, double t0,
                                          const Eigen::VectorXd& alpha, int k) {
  if (k < 1) throw IndexUndetermined("consistent initialization needs k >= 1");
  const int m = problem.m();
  if (alpha.size() != m) throw DimensionMismatch("guess size differs from m");
  const auto& tol = problem.tol;
  const FrozenPiece piece(problem, t0);

  const auto stack = build_arrays(piece, t0, k - 1);
  const Eigen::Index rows = stack.E_arr.rows();
  Eigen::MatrixXd a(rows, m + rows);
  a.leftCols(m) = stack.F_arr;
  a.rightCols(rows) = stack.E_arr;
  const Eigen::VectorXd b = stacked_rhs(piece, t0, k - 1);

  const Eigen::MatrixXd a_pinv = pseudo_inverse(a, tol);
  const Eigen::VectorXd z_p = a_pinv * b;
  const double feas = (a * z_p - b).norm();
  if (feas > 1e-8 * (1.0 + b.norm())) throw InfeasibleConstraints(t0, feas);

  const Subspace null_a = kernel_space(a, tol);
  const Eigen::MatrixXd e0 = piece.E(t0);
  const Eigen::MatrixXd p_proj = pseudo_inverse(e0, tol) * e0;

  Eigen::VectorXd z = z_p;
  if (null_a.dim() > 0) {
    const Eigen::MatrixXd n_top = null_a.basis.topRows(m);
    const Eigen::MatrixXd mm = p_proj * n_top;
    const Eigen::VectorXd rhs = p_proj * (alpha - z_p.head(m));
    const Eigen::VectorXd c = pseudo_inverse(mm, tol) * rhs;
    z += null_a.basis * c;

    // The minimizer must pin x0 uniquely: any feasible direction that moves x0
    // without moving P x0 signals that k is below the index.
    const Subspace free_c = kernel_space(mm, tol);
    if (free_c.dim() > 0) {
      const double movable = (n_top * free_c.basis).norm();
      if (movable > 1e-8)
        throw IndexUndetermined("constraint set leaves x0 underdetermined; increase k");
    }
  }

  ConsistentValue out;
  out.x0 = z.head(m);
  out.w = z.tail(rows);
  out.constraint_residual = (a * z - b).norm();
  return out;
}

namespace {

// First m rows of a left inverse that exposes x' in the inflated system; exists
// exactly when the array is 1-full. Near harmless critical points the
// extraction can be ill-conditioned even though the solution stays benign, so
// the condition number is reported, never acted on.
Eigen::MatrixXd completion_rows(const Eigen::MatrixXd& e_arr, int m, const TolerancePolicy& tol,
                                double t, double* condition) {
  const auto rd = rank_of(e_arr, tol);
  if (condition && rd.rank > 0)
    *condition = std::max(*condition,
                          rd.singular_values(0) / rd.singular_values(rd.rank - 1));
  const Eigen::MatrixXd r = pseudo_inverse(e_arr, tol).topRows(m);
  Eigen::MatrixXd check = r * e_arr;
  check.leftCols(m) -= Eigen::MatrixXd::Identity(m, m);
  if (check.norm() > 1e-7 * (1.0 + e_arr.norm())) throw OneFullnessLost(t);
  return r;
}

int determine_k(const DaeProblem& problem, const IvpSpec& spec) {
  if (spec.k_used > 0) return spec.k_used;
  std::vector<double> probes;
  for (int i = 0; i <= 4; ++i) probes.push_back(spec.t0 + (spec.t_end - spec.t0) * i / 4.0);
  const auto rep = index_report(problem, probes, problem.default_kmax());
  if (!rep.mu_diff.defined())
    throw IndexUndetermined("differentiation index undefined on [t0, t_end]: " +
                            rep.mu_diff.reason);
  return std::max(1, *rep.mu_diff.value);
}

}  // namespace

SolveResult integrate_completion(const DaeProblem& problem, const IvpSpec& spec) {
  const int m = problem.m();
  const auto& tol = problem.tol;
  const int nu = determine_k(problem, spec);

  SolveResult out;
  out.k_used = nu;
  const auto field = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const FrozenPiece piece(problem, t);
    const auto stack = build_arrays(piece, t, nu);
    const Eigen::MatrixXd r =
        completion_rows(stack.E_arr, m, tol, t, &out.completion_condition_max);
    return -r * (stack.F_arr * x) + r * stacked_rhs(piece, t, nu);
  };

  const auto init = consistent_initialization(problem, spec.t0, spec.alpha, nu);
  out.consistency_gap = (init.x0 - spec.alpha).norm();

  Eigen::VectorXd x = init.x0;
  double t = spec.t0;
  out.grid.push_back(t);
  out.x.push_back(x);
  out.drifts.push_back(0.0);

  const auto residual_at = [&](double ts, const Eigen::VectorXd& xs,
                               const Eigen::VectorXd& xdot) {
    const FrozenPiece piece(problem, ts);
    return (piece.E(ts) * xdot + piece.F(ts) * xs - piece.q(ts).col(0)).norm();
  };

  const double h = spec.step;
  const int nsteps = static_cast<int>(std::round((spec.t_end - spec.t0) / h));
  for (int step = 0; step < nsteps; ++step) {
    const Eigen::VectorXd k1 = field(t, x);
    out.residuals.push_back(residual_at(t, x, k1));
    out.residual_max = std::max(out.residual_max, out.residuals.back());
    const Eigen::VectorXd k2 = field(t + 0.5 * h, x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = field(t + 0.5 * h, x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = field(t + h, x + h * k3);
    Eigen::VectorXd x_next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t_next = spec.t0 + (step + 1) * h;

    // Re-project onto the constraint set to control drift.
    const auto proj = consistent_initialization(problem, t_next, x_next, nu);
    const double drift = (proj.x0 - x_next).norm();
    out.constraint_drift_max = std::max(out.constraint_drift_max, drift);
    if (proj.constraint_residual > 1e-7 * (1.0 + proj.x0.norm()))
      throw StepFailure(t_next, proj.constraint_residual);
    x = proj.x0;
    t = t_next;
    out.grid.push_back(t);
    out.x.push_back(x);
    out.drifts.push_back(drift);
  }

  // Residual at the final point.
  out.residuals.push_back(residual_at(t, x, field(t, x)));
  out.residual_max = std::max(out.residual_max, out.residuals.back());
  return out;
}

bool ic_accuracy_check(const DaeProblem& problem, double t0, const Eigen::MatrixXd& g) {
  const auto& tol = problem.tol;
  const auto chain = admissible_chain_at(problem, t0);
  if (!chain.completed) throw NotRegularAt(t0);
  const auto profile = tractability_profile(chain, problem.m());
  if (rank_of(g, tol).rank != profile.d) return false;
  const auto cs = canonical_subspaces_at(problem, t0, chain);
  const Subspace ker_g = kernel_space(g, tol);
  if (ker_g.dim() != cs.n_can.dim()) return false;
  return subspace_distance(ker_g, cs.n_can) < 1e-7;
}

namespace {

// Gauge-anchored data of the reduction chain at one time, for index <= 2.
struct ReductionEval {
  Eigen::MatrixXd c0, c1;        // S-bases (c1 empty for index 1)
  Eigen::VectorXd p0, p1;        // particular parts
  Eigen::MatrixXd e_mu, f_mu;    // terminal nonsingular pair
  Eigen::VectorXd q_mu;
  int mu = 0;
};

struct ReductionGauge {
  bool have = false;
  Eigen::MatrixXd y0, c0, y1, c1;
};

ReductionEval reduction_eval(const DaeProblem& problem, double t, ReductionGauge& gauge) {
  const auto& tol = problem.tol;
  const FrozenPiece piece(problem, t);
  const double h = problem.fd_step;
  const int half = 3;
  const int n = 2 * half + 1;
  const int center = half;

  // Level 0 with q.
  std::vector<Eigen::MatrixXd> e0(n), f0(n);
  std::vector<Eigen::VectorXd> q0(n);
  for (int p = 0; p < n; ++p) {
    const double tp = t + (p - center) * h;
    e0[p] = piece.E(tp);
    f0[p] = piece.F(tp);
    q0[p] = piece.q(tp).col(0);
  }
  const bool anchored = gauge.have;
  auto fs_c = fundamental_subspaces(e0[center], tol);
  Eigen::MatrixXd y_c = fs_c.range.basis;
  const Subspace s_c = kernel_space(fs_c.cokernel.basis.transpose() * f0[center], tol);
  Eigen::MatrixXd c_c = s_c.basis;
  if (anchored) {
    y_c = align_basis(y_c, gauge.y0);
    c_c = align_basis(c_c, gauge.c0);
  }
  gauge.y0 = y_c;
  gauge.c0 = c_c;

  const int r0 = fs_c.rank.rank;
  std::vector<Eigen::MatrixXd> y0v(n), c0v(n);
  std::vector<Eigen::VectorXd> p0v(n);
  for (int p = 0; p < n; ++p) {
    const auto fs = fundamental_subspaces(e0[p], tol);
    if (fs.rank.rank != r0) throw NotRegularAt(t);
    y0v[p] = align_basis(fs.range.basis, y_c);
    const Eigen::MatrixXd zf = fs.cokernel.basis.transpose() * f0[p];
    c0v[p] = align_basis(kernel_space(zf, tol).basis, c_c);
    p0v[p] = pseudo_inverse(zf, tol) * (fs.cokernel.basis.transpose() * q0[p]);
  }

  std::vector<Eigen::MatrixXd> e1(n), f1(n);
  std::vector<Eigen::VectorXd> q1(n);
  for (int p = 1; p + 1 < n; ++p) {
    const Eigen::MatrixXd cdot = (c0v[p + 1] - c0v[p - 1]) / (2.0 * h);
    const Eigen::VectorXd pdot = (p0v[p + 1] - p0v[p - 1]) / (2.0 * h);
    e1[p] = y0v[p].transpose() * e0[p] * c0v[p];
    f1[p] = y0v[p].transpose() * (f0[p] * c0v[p] + e0[p] * cdot);
    q1[p] = y0v[p].transpose() * (q0[p] - e0[p] * pdot - f0[p] * p0v[p]);
  }

  ReductionEval out;
  out.c0 = c0v[center];
  out.p0 = p0v[center];

  if (rank_of(e1[center], tol).rank == r0) {
    out.mu = 1;
    out.e_mu = e1[center];
    out.f_mu = f1[center];
    out.q_mu = q1[center];
    gauge.have = true;
    return out;
  }

  // Second level (index 2 expected: E_2 nonsingular).
  auto fs1_c = fundamental_subspaces(e1[center], tol);
  Eigen::MatrixXd y1_c = fs1_c.range.basis;
  const Subspace s1_c = kernel_space(fs1_c.cokernel.basis.transpose() * f1[center], tol);
  Eigen::MatrixXd c1_c = s1_c.basis;
  if (anchored && gauge.y1.size() > 0) {
    y1_c = align_basis(y1_c, gauge.y1);
    c1_c = align_basis(c1_c, gauge.c1);
  }
  gauge.y1 = y1_c;
  gauge.c1 = c1_c;

  const int r1 = fs1_c.rank.rank;
  std::vector<Eigen::MatrixXd> y1v(n), c1v(n);
  std::vector<Eigen::VectorXd> p1v(n);
  for (int p = 1; p + 1 < n; ++p) {
    const auto fs = fundamental_subspaces(e1[p], tol);
    if (fs.rank.rank != r1) throw NotRegularAt(t);
    y1v[p] = align_basis(fs.range.basis, y1_c);
    const Eigen::MatrixXd zf = fs.cokernel.basis.transpose() * f1[p];
    c1v[p] = align_basis(kernel_space(zf, tol).basis, c1_c);
    p1v[p] = pseudo_inverse(zf, tol) * (fs.cokernel.basis.transpose() * q1[p]);
  }
  const int cc = center;
  const Eigen::MatrixXd c1dot = (c1v[cc + 1] - c1v[cc - 1]) / (2.0 * h);
  const Eigen::VectorXd p1dot = (p1v[cc + 1] - p1v[cc - 1]) / (2.0 * h);
  out.c1 = c1v[cc];
  out.p1 = p1v[cc];
  out.e_mu = y1v[cc].transpose() * e1[cc] * c1v[cc];
  out.f_mu = y1v[cc].transpose() * (f1[cc] * c1v[cc] + e1[cc] * c1dot);
  out.q_mu = y1v[cc].transpose() * (q1[cc] - e1[cc] * p1dot - f1[cc] * p1v[cc]);
  out.mu = 2;
  if (rank_of(out.e_mu, tol).rank != static_cast<int>(out.e_mu.rows())) throw NotRegularAt(t);
  gauge.have = true;
  return out;
}

}  // namespace

SolveResult integrate_by_reduction(const DaeProblem& problem, const IvpSpec& spec) {
  const auto& tol = problem.tol;
  ReductionGauge gauge;

  // Anchor the gauge and determine the index structure.
  const auto ev0 = reduction_eval(problem, spec.t0, gauge);
  if (ev0.mu > 2) throw IndexUndetermined("reduction route implemented for index <= 2 only");

  const auto reconstruct = [&](const ReductionEval& ev, const Eigen::VectorXd& v) {
    if (ev.mu == 1) return Eigen::VectorXd(ev.c0 * v + ev.p0);
    return Eigen::VectorXd(ev.c0 * (ev.c1 * v + ev.p1) + ev.p0);
  };
  const auto core_of = [&](const ReductionEval& ev, const Eigen::VectorXd& x) {
    if (ev.mu == 1) return Eigen::VectorXd(pseudo_inverse(ev.c0, tol) * (x - ev.p0));
    return Eigen::VectorXd(pseudo_inverse(ev.c1, tol) *
                           (pseudo_inverse(ev.c0, tol) * (x - ev.p0) - ev.p1));
  };

  const auto init = consistent_initialization(problem, spec.t0, spec.alpha,
                                              spec.k_used > 0 ? spec.k_used : ev0.mu);
  Eigen::VectorXd v = core_of(ev0, init.x0);

  SolveResult out;
  out.k_used = ev0.mu;
  out.consistency_gap = (init.x0 - spec.alpha).norm();
  out.grid.push_back(spec.t0);
  out.x.push_back(reconstruct(ev0, v));

  const double h = spec.step;
  const int nsteps = static_cast<int>(std::round((spec.t_end - spec.t0) / h));
  double t = spec.t0;
  for (int step = 0; step < nsteps; ++step) {
    const auto f = [&](double ts, const Eigen::VectorXd& vs) -> Eigen::VectorXd {
      auto ev = reduction_eval(problem, ts, gauge);
      return ev.e_mu.partialPivLu().solve(ev.q_mu - ev.f_mu * vs);
    };
    const Eigen::VectorXd k1 = f(t, v);
    const Eigen::VectorXd k2 = f(t + 0.5 * h, v + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(t + 0.5 * h, v + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(t + h, v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = spec.t0 + (step + 1) * h;
    auto ev = reduction_eval(problem, t, gauge);
    out.grid.push_back(t);
    out.x.push_back(reconstruct(ev, v));
  }
  return out;
}

}  // namespace dae
