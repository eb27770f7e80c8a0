#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>

#include "dae/matfun.hpp"
#include "dae/numlin.hpp"

namespace dae {

// A linear time-varying DAE E(t) x' + F(t) x = q(t) on an interval, plus the
// tolerance policy and probe settings used by every analysis on it.
struct DaeProblem {
  PiecewiseMatrixFunction E;
  PiecewiseMatrixFunction F;
  std::optional<PiecewiseMatrixFunction> q;  // m x 1 right-hand side

  TolerancePolicy tol;
  double fd_step = 1e-5;  // basis-derivative stencil step

  int m() const { return E.rows(); }
  double t_begin() const { return E.domain_begin(); }
  double t_end() const { return E.domain_end(); }

  // Default derivative-array depth: the regular index never exceeds m.
  int default_kmax() const { return m(); }

  // Breakpoints of E, F (and q if present), merged.
  std::vector<double> breakpoints() const;

  static DaeProblem make(PiecewiseMatrixFunction E, PiecewiseMatrixFunction F,
                         std::optional<PiecewiseMatrixFunction> q = std::nullopt);

  nlohmann::json to_json() const;
  static DaeProblem from_json(const nlohmann::json& j);
  static DaeProblem load(const std::string& path);
  void save(const std::string& path) const;
};

// The polynomial pieces of E, F, q in force at a probe point (right-limit
// rule). All evaluations extend these pieces analytically, so pointwise
// analyses near a breakpoint see the one-sided smooth problem.
class FrozenPiece {
 public:
  FrozenPiece(const DaeProblem& p, double t);

  Eigen::MatrixXd E(double t, int order = 0) const { return p_->E.eval_segment(seg_e_, t, order); }
  Eigen::MatrixXd F(double t, int order = 0) const { return p_->F.eval_segment(seg_f_, t, order); }
  Eigen::MatrixXd q(double t, int order = 0) const;
  bool has_q() const { return p_->q.has_value(); }
  int m() const { return p_->m(); }
  double anchor() const { return t_; }
  const DaeProblem& problem() const { return *p_; }

 private:
  const DaeProblem* p_;
  double t_;
  int seg_e_;
  int seg_f_;
  int seg_q_;
};

}  // namespace dae
