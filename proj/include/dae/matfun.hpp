#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "dae/errors.hpp"

namespace dae {

// One polynomial piece sum_k C_k t^k on a half-open interval [t0, t1).
struct Segment {
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<Eigen::MatrixXd> coeffs;  // coeffs[k] multiplies t^k
};

// Piecewise-polynomial matrix function of one real variable.
//
// Segments partition [domain_begin, domain_end] without gaps or overlaps and
// must match values and derivatives up to the declared smoothness order at the
// interior breakpoints. Evaluation at a breakpoint uses the right-limit piece;
// callers that want the left limit select the segment explicitly.
// Immutable after construction, safe for concurrent use.
class PiecewiseMatrixFunction {
 public:
  static PiecewiseMatrixFunction from_segments(int rows, int cols, std::vector<Segment> segments,
                                               int smoothness_order);

  // Constant matrix on [a, b].
  static PiecewiseMatrixFunction constant(const Eigen::MatrixXd& value, double a, double b);

  // Single polynomial piece on [a, b].
  static PiecewiseMatrixFunction polynomial(const std::vector<Eigen::MatrixXd>& coeffs, double a,
                                            double b);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int smoothness_order() const { return smoothness_order_; }
  double domain_begin() const { return segments_.front().t0; }
  double domain_end() const { return segments_.back().t1; }
  const std::vector<Segment>& segments() const { return segments_; }

  // Value at t (right-limit piece at breakpoints). Throws OutOfDomain.
  Eigen::MatrixXd eval_at(double t) const;

  // Exact segment-wise polynomial derivative of the given order.
  PiecewiseMatrixFunction derivative(int order = 1) const;

  // Index of the piece governing t under the right-limit convention.
  int segment_at(double t) const;

  // Evaluates the (extended) polynomial of one piece anywhere, `order`-th derivative.
  // Lets pointwise analyses work with the analytic continuation of the piece at
  // hand instead of stepping over a breakpoint.
  Eigen::MatrixXd eval_segment(int segment_index, double t, int order = 0) const;

  // Interior breakpoints (segment boundaries strictly inside the domain).
  std::vector<double> breakpoints() const;

  nlohmann::json to_json() const;
  static PiecewiseMatrixFunction from_json(const nlohmann::json& j);

  bool same_coefficients(const PiecewiseMatrixFunction& other, double tol = 0.0) const;

 private:
  PiecewiseMatrixFunction() = default;
  int rows_ = 0;
  int cols_ = 0;
  int smoothness_order_ = 0;
  std::vector<Segment> segments_;
};

// Exact product (A*B)(t) as a piecewise polynomial on the common refinement of
// the two segmentations.
PiecewiseMatrixFunction multiply(const PiecewiseMatrixFunction& a, const PiecewiseMatrixFunction& b);

PiecewiseMatrixFunction add(const PiecewiseMatrixFunction& a, const PiecewiseMatrixFunction& b);

}  // namespace dae
