#pragma once

#include <optional>
#include <vector>

#include "dae/problem.hpp"
#include "dae/profile.hpp"

namespace dae {

struct IvpSpec {
  double t0 = 0.0;
  Eigen::VectorXd alpha;  // initial guess, projected to a consistent value
  double t_end = 1.0;
  double step = 1e-2;
  int k_used = 0;  // derivative-array depth; 0 = determine from the index report

  nlohmann::json to_json() const;
  static IvpSpec from_json(const nlohmann::json& j);
  static IvpSpec load(const std::string& path);
};

struct ConsistentValue {
  Eigen::VectorXd x0;
  Eigen::VectorXd w;         // derivative-array tail of the combined system
  double constraint_residual = 0.0;
};

// min ||P(t0)(x0 - alpha)|| subject to F_[k-1] x0 + E_[k-1] w = q_[k-1](t0),
// with P the orthoprojector along ker E(t0).
ConsistentValue consistent_initialization(const DaeProblem& problem, double t0,
                                          const Eigen::VectorXd& alpha, int k);

struct SolveResult {
  std::vector<double> grid;
  std::vector<Eigen::VectorXd> x;
  std::vector<double> residuals;      // ||E x' + F x - q|| per grid point (x' from the field)
  std::vector<double> drifts;         // re-projection distance per step (0 at t0)
  double residual_max = 0.0;
  double constraint_drift_max = 0.0;
  double consistency_gap = 0.0;           // ||alpha - x0|| at t0
  double completion_condition_max = 0.0;  // worst conditioning of the 1-full extraction
  int k_used = 0;
};

// Classical 4th-order one-step method on the completion ODE extracted from the
// 1-full derivative array, with a consistency re-projection after every step.
SolveResult integrate_completion(const DaeProblem& problem, const IvpSpec& spec);

// True iff ker G equals N_can(t0) (accurately stated initial condition).
bool ic_accuracy_check(const DaeProblem& problem, double t0, const Eigen::MatrixXd& g);

// Cross-check route for index <= 2: integrates the reduced system obtained
// from the reduction chain (basis derivatives by aligned finite differences)
// and reconstructs the full solution. Gauges are propagated between calls, so
// accuracy is that of the finite-difference machinery (about 1e-4).
SolveResult integrate_by_reduction(const DaeProblem& problem, const IvpSpec& spec);

}  // namespace dae
