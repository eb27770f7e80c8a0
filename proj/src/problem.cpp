#include "dae/problem.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>

namespace dae {

DaeProblem DaeProblem::make(PiecewiseMatrixFunction E, PiecewiseMatrixFunction F,
                            std::optional<PiecewiseMatrixFunction> q) {
  if (E.rows() != E.cols()) throw DimensionMismatch("E must be square");
  if (F.rows() != F.cols() || F.rows() != E.rows())
    throw DimensionMismatch("F must be square with the size of E");
  if (E.domain_begin() != F.domain_begin() || E.domain_end() != F.domain_end())
    throw DimensionMismatch("E and F must share the problem interval");
  if (q) {
    if (q->rows() != E.rows() || q->cols() != 1)
      throw DimensionMismatch("q must be an m x 1 matrix function");
  }
  DaeProblem p{std::move(E), std::move(F), std::move(q), {}, 1e-5};
  if (const char* env = std::getenv("DAE_TOL")) {
    const double v = std::strtod(env, nullptr);
    if (v > 0.0) p.tol.rel_rank_tol = v;
  }
  return p;
}

std::vector<double> DaeProblem::breakpoints() const {
  std::vector<double> out = E.breakpoints();
  for (double t : F.breakpoints()) out.push_back(t);
  if (q)
    for (double t : q->breakpoints()) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double x, double y) { return std::abs(x - y) < 1e-14; }),
            out.end());
  return out;
}

nlohmann::json DaeProblem::to_json() const {
  nlohmann::json j;
  j["m"] = m();
  j["interval"] = {t_begin(), t_end()};
  j["E"] = E.to_json();
  j["F"] = F.to_json();
  if (q) j["q"] = q->to_json();
  j["tolerance"] = {{"rel_rank_tol", tol.rel_rank_tol}, {"abs_floor", tol.abs_floor}};
  return j;
}

DaeProblem DaeProblem::from_json(const nlohmann::json& j) {
  auto E = PiecewiseMatrixFunction::from_json(j.at("E"));
  auto F = PiecewiseMatrixFunction::from_json(j.at("F"));
  std::optional<PiecewiseMatrixFunction> q;
  if (j.contains("q") && !j.at("q").is_null()) q = PiecewiseMatrixFunction::from_json(j.at("q"));
  auto p = make(std::move(E), std::move(F), std::move(q));
  if (j.contains("tolerance")) {
    const auto& t = j.at("tolerance");
    p.tol.rel_rank_tol = t.value("rel_rank_tol", p.tol.rel_rank_tol);
    p.tol.abs_floor = t.value("abs_floor", p.tol.abs_floor);
  }
  return p;
}

DaeProblem DaeProblem::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open problem file: " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

void DaeProblem::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write problem file: " + path);
  out << to_json().dump(2) << "\n";
}

FrozenPiece::FrozenPiece(const DaeProblem& p, double t)
    : p_(&p),
      t_(t),
      seg_e_(p.E.segment_at(t)),
      seg_f_(p.F.segment_at(t)),
      seg_q_(p.q ? p.q->segment_at(t) : 0) {}

Eigen::MatrixXd FrozenPiece::q(double t, int order) const {
  if (!p_->q) return Eigen::MatrixXd::Zero(p_->m(), 1);
  return p_->q->eval_segment(seg_q_, t, order);
}

}  // namespace dae
