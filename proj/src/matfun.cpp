#include "dae/matfun.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace dae {

namespace {

constexpr double kBreakMatchTol = 1e-8;  // derivative agreement at breakpoints
constexpr double kGapTol = 1e-12;        // partition gap/overlap tolerance (relative)
constexpr int kUnlimitedSmoothness = 1000000;  // single-piece polynomials are C^inf

Eigen::MatrixXd eval_poly(const std::vector<Eigen::MatrixXd>& coeffs, double t, int rows, int cols) {
  // Horner evaluation.
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(rows, cols);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = acc * t + *it;
  }
  return acc;
}

std::vector<Eigen::MatrixXd> diff_coeffs(const std::vector<Eigen::MatrixXd>& coeffs, int rows,
                                         int cols) {
  std::vector<Eigen::MatrixXd> out;
  for (size_t k = 1; k < coeffs.size(); ++k) {
    out.push_back(static_cast<double>(k) * coeffs[k]);
  }
  if (out.empty()) out.push_back(Eigen::MatrixXd::Zero(rows, cols));
  return out;
}

}  // namespace

PiecewiseMatrixFunction PiecewiseMatrixFunction::from_segments(int rows, int cols,
                                                               std::vector<Segment> segments,
                                                               int smoothness_order) {
  if (segments.empty()) throw DimensionMismatch("at least one segment required");
  if (rows <= 0 || cols <= 0) throw DimensionMismatch("matrix dimensions must be positive");
  for (auto& seg : segments) {
    if (seg.coeffs.empty()) seg.coeffs.push_back(Eigen::MatrixXd::Zero(rows, cols));
    for (const auto& c : seg.coeffs) {
      if (c.rows() != rows || c.cols() != cols)
        throw DimensionMismatch("coefficient matrix size differs from declared (rows, cols)");
    }
    if (!(seg.t0 < seg.t1)) throw DimensionMismatch("segment interval must have t0 < t1");
  }
  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) { return a.t0 < b.t0; });
  for (size_t i = 0; i + 1 < segments.size(); ++i) {
    const double gap = segments[i + 1].t0 - segments[i].t1;
    const double scale = 1.0 + std::abs(segments[i].t1);
    if (std::abs(gap) > kGapTol * scale) throw GapOrOverlap(segments[i].t1, segments[i + 1].t0);
    segments[i + 1].t0 = segments[i].t1;  // snap to exact contiguity
  }

  PiecewiseMatrixFunction f;
  f.rows_ = rows;
  f.cols_ = cols;
  f.smoothness_order_ = std::max(0, smoothness_order);
  f.segments_ = std::move(segments);

  // Values and derivatives up to the declared order must agree at interior breakpoints.
  for (size_t i = 0; i + 1 < f.segments_.size(); ++i) {
    const double tb = f.segments_[i].t1;
    auto left = f.segments_[i].coeffs;
    auto right = f.segments_[i + 1].coeffs;
    for (int order = 0; order <= f.smoothness_order_; ++order) {
      const Eigen::MatrixXd lv = eval_poly(left, tb, rows, cols);
      const Eigen::MatrixXd rv = eval_poly(right, tb, rows, cols);
      const double mismatch = (lv - rv).norm();
      const double scale = 1.0 + std::max(lv.norm(), rv.norm());
      if (mismatch > kBreakMatchTol * scale) throw SmoothnessViolation(tb, order, mismatch);
      if (left.size() <= 1 && right.size() <= 1) break;  // all higher derivatives vanish
      left = diff_coeffs(left, rows, cols);
      right = diff_coeffs(right, rows, cols);
    }
  }
  return f;
}

PiecewiseMatrixFunction PiecewiseMatrixFunction::constant(const Eigen::MatrixXd& value, double a,
                                                          double b) {
  Segment seg;
  seg.t0 = a;
  seg.t1 = b;
  seg.coeffs = {value};
  return from_segments(static_cast<int>(value.rows()), static_cast<int>(value.cols()), {seg},
                       kUnlimitedSmoothness);
}

PiecewiseMatrixFunction PiecewiseMatrixFunction::polynomial(
    const std::vector<Eigen::MatrixXd>& coeffs, double a, double b) {
  Segment seg;
  seg.t0 = a;
  seg.t1 = b;
  seg.coeffs = coeffs;
  return from_segments(static_cast<int>(coeffs.front().rows()),
                       static_cast<int>(coeffs.front().cols()), {seg},
                       kUnlimitedSmoothness);
}

int PiecewiseMatrixFunction::segment_at(double t) const {
  const double a = domain_begin();
  const double b = domain_end();
  const double slack = kGapTol * (1.0 + std::max(std::abs(a), std::abs(b)));
  if (t < a - slack || t > b + slack) throw OutOfDomain(t, a, b);
  // Right-limit convention: the piece whose [t0, t1) contains t; the final
  // point of the domain belongs to the last piece.
  for (size_t i = 0; i < segments_.size(); ++i) {
    if (t < segments_[i].t1 || i + 1 == segments_.size()) return static_cast<int>(i);
  }
  return static_cast<int>(segments_.size()) - 1;
}

Eigen::MatrixXd PiecewiseMatrixFunction::eval_segment(int segment_index, double t, int order) const {
  auto coeffs = segments_.at(static_cast<size_t>(segment_index)).coeffs;
  for (int k = 0; k < order; ++k) coeffs = diff_coeffs(coeffs, rows_, cols_);
  return eval_poly(coeffs, t, rows_, cols_);
}

Eigen::MatrixXd PiecewiseMatrixFunction::eval_at(double t) const {
  return eval_segment(segment_at(t), t, 0);
}

PiecewiseMatrixFunction PiecewiseMatrixFunction::derivative(int order) const {
  PiecewiseMatrixFunction out = *this;
  for (auto& seg : out.segments_) {
    for (int k = 0; k < order; ++k) seg.coeffs = diff_coeffs(seg.coeffs, rows_, cols_);
  }
  out.smoothness_order_ = std::max(0, smoothness_order_ - order);
  return out;
}

std::vector<double> PiecewiseMatrixFunction::breakpoints() const {
  std::vector<double> out;
  for (size_t i = 0; i + 1 < segments_.size(); ++i) out.push_back(segments_[i].t1);
  return out;
}

nlohmann::json PiecewiseMatrixFunction::to_json() const {
  nlohmann::json j;
  j["rows"] = rows_;
  j["cols"] = cols_;
  j["smoothness"] = smoothness_order_;
  j["segments"] = nlohmann::json::array();
  for (const auto& seg : segments_) {
    nlohmann::json js;
    js["t0"] = seg.t0;
    js["t1"] = seg.t1;
    js["coeffs"] = nlohmann::json::array();
    for (const auto& c : seg.coeffs) {
      nlohmann::json flat = nlohmann::json::array();
      for (int r = 0; r < c.rows(); ++r)
        for (int col = 0; col < c.cols(); ++col) flat.push_back(c(r, col));
      js["coeffs"].push_back(flat);
    }
    j["segments"].push_back(js);
  }
  return j;
}

PiecewiseMatrixFunction PiecewiseMatrixFunction::from_json(const nlohmann::json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const int smooth = j.value("smoothness", 0);
  std::vector<Segment> segs;
  for (const auto& js : j.at("segments")) {
    Segment seg;
    seg.t0 = js.at("t0").get<double>();
    seg.t1 = js.at("t1").get<double>();
    for (const auto& flat : js.at("coeffs")) {
      if (static_cast<int>(flat.size()) != rows * cols)
        throw DimensionMismatch("coefficient array length does not match rows*cols");
      Eigen::MatrixXd c(rows, cols);
      int idx = 0;
      for (int r = 0; r < rows; ++r)
        for (int col = 0; col < cols; ++col) c(r, col) = flat[idx++].get<double>();
      seg.coeffs.push_back(c);
    }
    segs.push_back(std::move(seg));
  }
  return from_segments(rows, cols, std::move(segs), smooth);
}

bool PiecewiseMatrixFunction::same_coefficients(const PiecewiseMatrixFunction& other,
                                                double tol) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) return false;
  if (segments_.size() != other.segments_.size()) return false;
  for (size_t i = 0; i < segments_.size(); ++i) {
    const auto& a = segments_[i];
    const auto& b = other.segments_[i];
    if (a.t0 != b.t0 || a.t1 != b.t1) return false;
    const size_t n = std::max(a.coeffs.size(), b.coeffs.size());
    for (size_t k = 0; k < n; ++k) {
      const Eigen::MatrixXd ca =
          k < a.coeffs.size() ? a.coeffs[k] : Eigen::MatrixXd::Zero(rows_, cols_);
      const Eigen::MatrixXd cb =
          k < b.coeffs.size() ? b.coeffs[k] : Eigen::MatrixXd::Zero(rows_, cols_);
      if ((ca - cb).lpNorm<Eigen::Infinity>() > tol) return false;
    }
  }
  return true;
}

namespace {

// Common refinement of two partitions of the same interval.
std::vector<std::pair<double, double>> refine(const PiecewiseMatrixFunction& a,
                                              const PiecewiseMatrixFunction& b) {
  std::vector<double> cuts{a.domain_begin(), a.domain_end()};
  for (double t : a.breakpoints()) cuts.push_back(t);
  for (double t : b.breakpoints()) cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-14; }),
             cuts.end());
  std::vector<std::pair<double, double>> out;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) out.emplace_back(cuts[i], cuts[i + 1]);
  return out;
}

}  // namespace

PiecewiseMatrixFunction multiply(const PiecewiseMatrixFunction& a,
                                 const PiecewiseMatrixFunction& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("product dimensions do not agree");
  std::vector<Segment> segs;
  for (auto [t0, t1] : refine(a, b)) {
    const double mid = 0.5 * (t0 + t1);
    const auto& ca = a.segments()[static_cast<size_t>(a.segment_at(mid))].coeffs;
    const auto& cb = b.segments()[static_cast<size_t>(b.segment_at(mid))].coeffs;
    Segment seg;
    seg.t0 = t0;
    seg.t1 = t1;
    seg.coeffs.assign(ca.size() + cb.size() - 1, Eigen::MatrixXd::Zero(a.rows(), b.cols()));
    for (size_t i = 0; i < ca.size(); ++i)
      for (size_t j = 0; j < cb.size(); ++j) seg.coeffs[i + j] += ca[i] * cb[j];
    segs.push_back(std::move(seg));
  }
  return PiecewiseMatrixFunction::from_segments(a.rows(), b.cols(), std::move(segs),
                                                std::min(a.smoothness_order(), b.smoothness_order()));
}

PiecewiseMatrixFunction add(const PiecewiseMatrixFunction& a, const PiecewiseMatrixFunction& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("sum dimensions do not agree");
  std::vector<Segment> segs;
  for (auto [t0, t1] : refine(a, b)) {
    const double mid = 0.5 * (t0 + t1);
    const auto& ca = a.segments()[static_cast<size_t>(a.segment_at(mid))].coeffs;
    const auto& cb = b.segments()[static_cast<size_t>(b.segment_at(mid))].coeffs;
    Segment seg;
    seg.t0 = t0;
    seg.t1 = t1;
    seg.coeffs.assign(std::max(ca.size(), cb.size()), Eigen::MatrixXd::Zero(a.rows(), a.cols()));
    for (size_t i = 0; i < ca.size(); ++i) seg.coeffs[i] += ca[i];
    for (size_t i = 0; i < cb.size(); ++i) seg.coeffs[i] += cb[i];
    segs.push_back(std::move(seg));
  }
  return PiecewiseMatrixFunction::from_segments(a.rows(), a.cols(), std::move(segs),
                                                std::min(a.smoothness_order(), b.smoothness_order()));
}

}  // namespace dae
