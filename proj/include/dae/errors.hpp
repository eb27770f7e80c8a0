#pragma once

#include <stdexcept>
#include <string>

namespace dae {

// Base class for all structured errors thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// -- matrix function construction / evaluation --------------------------------

class GapOrOverlap : public Error {
 public:
  GapOrOverlap(double left_end, double right_begin)
      : Error("segment intervals do not partition the domain: piece ends at " +
              std::to_string(left_end) + ", next begins at " + std::to_string(right_begin)),
        left_end(left_end), right_begin(right_begin) {}
  double left_end, right_begin;
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class SmoothnessViolation : public Error {
 public:
  SmoothnessViolation(double breakpoint, int order, double mismatch_norm)
      : Error("derivative of order " + std::to_string(order) + " jumps at t=" +
              std::to_string(breakpoint) + " (mismatch " + std::to_string(mismatch_norm) + ")"),
        breakpoint(breakpoint), order(order), mismatch_norm(mismatch_norm) {}
  double breakpoint;
  int order;
  double mismatch_norm;
};

class OutOfDomain : public Error {
 public:
  OutOfDomain(double t, double a, double b)
      : Error("t=" + std::to_string(t) + " outside domain [" + std::to_string(a) + ", " +
              std::to_string(b) + "]"),
        t(t) {}
  double t;
};

// -- numerical linear algebra --------------------------------------------------

class NonFinite : public Error {
 public:
  NonFinite() : Error("matrix has non-finite entries") {}
};

// -- pointwise framework computations -------------------------------------------

class PreRegularityLost : public Error {
 public:
  PreRegularityLost(int level, double t)
      : Error("pre-regularity lost at level " + std::to_string(level) + ", t=" + std::to_string(t)),
        level(level), t(t) {}
  int level;
  double t;
};

class MaxLevelExceeded : public Error {
 public:
  explicit MaxLevelExceeded(int max_level)
      : Error("reduction exceeded " + std::to_string(max_level) + " levels"), max_level(max_level) {}
  int max_level;
};

class NonZeroVanishing : public Error {
 public:
  NonZeroVanishing(int level, int v)
      : Error("strangeness chain has v=" + std::to_string(v) + " vanishing equations at level " +
              std::to_string(level)),
        level(level), v(v) {}
  int level, v;
};

class NonzeroIntersection : public Error {
 public:
  NonzeroIntersection(int level, int u)
      : Error("tractability chain: dim((N_0+...+N_{i-1}) \\cap N_i) = " + std::to_string(u) +
              " > 0 at level " + std::to_string(level)),
        level(level), u(u) {}
  int level, u;
};

class DecompositionFailure : public Error {
 public:
  explicit DecompositionFailure(const std::string& what) : Error(what) {}
};

// -- derivative arrays -----------------------------------------------------------

class InsufficientSmoothness : public Error {
 public:
  InsufficientSmoothness(int k, int have)
      : Error("derivative array of order " + std::to_string(k) +
              " needs C^" + std::to_string(k) + " coefficients at a breakpoint, declared C^" +
              std::to_string(have)),
        k(k), have(have) {}
  int k, have;
};

class SolvabilityViolated : public Error {
 public:
  SolvabilityViolated(int level, double t)
      : Error("[E_[k] F_[k]] loses full row rank at k=" + std::to_string(level) +
              ", t=" + std::to_string(t)),
        level(level), t(t) {}
  int level;
  double t;
};

class NonConstantRank : public Error {
 public:
  explicit NonConstantRank(int level)
      : Error("array rank r_[" + std::to_string(level) + "] is not constant over the probe set"),
        level(level) {}
  int level;
};

// -- generator --------------------------------------------------------------------

class InvalidProfile : public Error {
 public:
  explicit InvalidProfile(const std::string& what) : Error(what) {}
};

class SingularTransform : public Error {
 public:
  explicit SingularTransform(double t)
      : Error("equivalence transform singular or ill-conditioned near t=" + std::to_string(t)), t(t) {}
  double t;
};

class NotStrictlyUpperTriangular : public Error {
 public:
  NotStrictlyUpperTriangular() : Error("matrix is not strictly block upper triangular") {}
};

// -- solver -------------------------------------------------------------------------

class InfeasibleConstraints : public Error {
 public:
  InfeasibleConstraints(double t, double residual)
      : Error("derivative-array constraints infeasible at t=" + std::to_string(t) +
              " (residual " + std::to_string(residual) + ")"),
        t(t), residual(residual) {}
  double t, residual;
};

class IndexUndetermined : public Error {
 public:
  explicit IndexUndetermined(const std::string& what) : Error(what) {}
};

class OneFullnessLost : public Error {
 public:
  explicit OneFullnessLost(double t)
      : Error("derivative array lost 1-fullness at t=" + std::to_string(t)), t(t) {}
  double t;
};

class StepFailure : public Error {
 public:
  StepFailure(double t, double residual)
      : Error("constraint residual " + std::to_string(residual) + " too large after step to t=" +
              std::to_string(t)),
        t(t), residual(residual) {}
  double t, residual;
};

class NotRegularAt : public Error {
 public:
  explicit NotRegularAt(double t) : Error("pair is not regular at t=" + std::to_string(t)), t(t) {}
  double t;
};

}  // namespace dae
