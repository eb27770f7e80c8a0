#include "dae/generator.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/QR>
#include <cmath>

namespace dae {

namespace {

// Random coefficient matrix with entries in [-magnitude, magnitude].
Eigen::MatrixXd random_block(int rows, int cols, double magnitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-magnitude, magnitude);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

}  // namespace

std::vector<int> ScfSpec::block_sizes() const {
  if (thetas.empty()) return {};
  if (thetas.back() != 0) throw InvalidProfile("theta list must end with zero");
  for (size_t i = 0; i + 1 < thetas.size(); ++i)
    if (thetas[i] < thetas[i + 1]) throw InvalidProfile("theta list must be nonincreasing");
  const int mu = static_cast<int>(thetas.size());
  if (mu >= 2 && thetas[mu - 2] <= 0)
    throw InvalidProfile("theta_{mu-2} must be positive for mu >= 2");
  // The free end block (= m - r) defaults to the smallest admissible size.
  const int end_block = std::max(thetas.empty() ? 1 : thetas.front(), 1);
  std::vector<int> l;
  if (variant == ScfVariant::FullColumn) {
    l.push_back(end_block);  // l_1 = m - r >= theta_0
    for (int i = 0; i + 1 < mu; ++i) l.push_back(thetas[i]);  // l_{i+2} = theta_i
  } else {
    for (int i = mu - 2; i >= 0; --i) l.push_back(thetas[i]);  // l_i ascending
    l.push_back(end_block);  // l_mu = m - r
  }
  for (int li : l)
    if (li < 1) throw InvalidProfile("implied block size below 1");
  return l;
}

int ScfSpec::m() const {
  int total = d;
  for (int li : block_sizes()) total += li;
  return total;
}

CharacteristicProfile ScfSpec::expected_profile() const {
  const int mm = m();
  if (thetas.empty()) return CharacteristicProfile::from_thetas(mm, mm, {});
  const auto l = block_sizes();
  const int end_block = variant == ScfVariant::FullColumn ? l.front() : l.back();
  return CharacteristicProfile::from_thetas(mm, mm - end_block, thetas);
}

nlohmann::json ScfSpec::to_json() const {
  nlohmann::json j;
  j["d"] = d;
  j["thetas"] = thetas;
  j["variant"] = variant == ScfVariant::FullColumn ? "column" : "row";
  j["fill"] = {{"degree", fill.degree}, {"magnitude", fill.magnitude}};
  j["seed"] = seed;
  if (omega) j["omega"] = omega->to_json();
  return j;
}

ScfSpec ScfSpec::from_json(const nlohmann::json& j) {
  ScfSpec s;
  s.d = j.at("d").get<int>();
  s.thetas = j.at("thetas").get<std::vector<int>>();
  s.variant = j.at("variant").get<std::string>() == "row" ? ScfVariant::FullRow
                                                          : ScfVariant::FullColumn;
  if (j.contains("fill")) {
    s.fill.degree = j["fill"].value("degree", 0);
    s.fill.magnitude = j["fill"].value("magnitude", 0.0);
  }
  s.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("omega") && !j["omega"].is_null())
    s.omega = PiecewiseMatrixFunction::from_json(j["omega"]);
  return s;
}

PiecewiseMatrixFunction random_sut(const std::vector<int>& block_sizes, ScfVariant variant,
                                   int degree, double t0, double t1, std::mt19937_64& rng,
                                   double fill_magnitude) {
  const int mu = static_cast<int>(block_sizes.size());
  int l = 0;
  std::vector<int> offset{0};
  for (int li : block_sizes) {
    l += li;
    offset.push_back(l);
  }

  std::vector<Eigen::MatrixXd> coeffs(static_cast<size_t>(degree) + 1,
                                      Eigen::MatrixXd::Zero(l, l));
  for (int i = 0; i < mu; ++i) {
    for (int j = i + 1; j < mu; ++j) {
      const int ri = block_sizes[i];
      const int cj = block_sizes[j];
      if (j == i + 1) {
        // Full-rank secondary block: identity pattern plus a small perturbation
        // that cannot destroy the rank.
        Eigen::MatrixXd base = Eigen::MatrixXd::Zero(ri, cj);
        const int k = std::min(ri, cj);
        base.topLeftCorner(k, k).setIdentity();
        coeffs[0].block(offset[i], offset[j], ri, cj) = base;
        if (degree >= 0) {
          for (int kk = 0; kk <= degree; ++kk) {
            coeffs[kk].block(offset[i], offset[j], ri, cj) +=
                random_block(ri, cj, 0.09 / (degree + 1), rng);
          }
        }
      } else {
        for (int kk = 0; kk <= degree; ++kk) {
          coeffs[kk].block(offset[i], offset[j], ri, cj) =
              random_block(ri, cj, fill_magnitude, rng);
        }
      }
    }
  }
  (void)variant;  // the identity pattern is full column and full row rank as sized
  return PiecewiseMatrixFunction::polynomial(coeffs, t0, t1);
}

DaeProblem build_scf_pair(const ScfSpec& spec, double t0, double t1) {
  const auto l = spec.block_sizes();
  const int mm = spec.m();
  int lsum = mm - spec.d;
  std::mt19937_64 rng(spec.seed);

  // N block: random SUT with the requested secondary-diagonal ranks; the
  // off-diagonal fill honours the requested degree/magnitude.
  auto make_n = [&]() -> PiecewiseMatrixFunction {
    if (spec.fill.magnitude == 0.0 && spec.fill.degree == 0) {
      // Pure structural pattern.
      int total = 0;
      std::vector<int> offset{0};
      for (int li : l) {
        total += li;
        offset.push_back(total);
      }
      Eigen::MatrixXd n0 = Eigen::MatrixXd::Zero(total, total);
      for (size_t i = 0; i + 1 < l.size(); ++i) {
        const int k = std::min(l[i], l[i + 1]);
        n0.block(offset[i], offset[i + 1], k, k).setIdentity();
      }
      return PiecewiseMatrixFunction::constant(n0, t0, t1);
    }
    return random_sut(l, spec.variant, spec.fill.degree, t0, t1, rng,
                      spec.fill.magnitude);
  };

  // Assemble E = diag(I_d, N), F = diag(Omega, I_l).
  std::vector<Eigen::MatrixXd> e_coeffs, f_coeffs;
  const auto build_diag = [&](const std::vector<Eigen::MatrixXd>& corner, bool top_identity,
                              std::vector<Eigen::MatrixXd>& out) {
    for (size_t k = 0; k < corner.size(); ++k) {
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(mm, mm);
      if (k == 0 && top_identity) c.topLeftCorner(spec.d, spec.d).setIdentity();
      if (lsum > 0) c.bottomRightCorner(lsum, lsum) = corner[k];
      out.push_back(c);
    }
  };

  // Collect N coefficients on its (single) segment.
  std::vector<Eigen::MatrixXd> n_coeffs{Eigen::MatrixXd::Zero(0, 0)};
  if (lsum > 0) n_coeffs = make_n().segments().front().coeffs;
  build_diag(n_coeffs, true, e_coeffs);

  // F: Omega in the top corner, identity in the bottom.
  PiecewiseMatrixFunction omega =
      spec.omega ? *spec.omega
                 : PiecewiseMatrixFunction::constant(Eigen::MatrixXd::Zero(std::max(spec.d, 1),
                                                                           std::max(spec.d, 1)),
                                                     t0, t1);
  if (spec.omega && (spec.omega->rows() != spec.d || spec.omega->cols() != spec.d))
    throw InvalidProfile("omega must be d x d");
  std::vector<Eigen::MatrixXd> omega_coeffs = omega.segments().front().coeffs;
  const size_t nf = std::max<size_t>(omega_coeffs.size(), 1);
  for (size_t k = 0; k < nf; ++k) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(mm, mm);
    if (spec.d > 0 && k < omega_coeffs.size())
      c.topLeftCorner(spec.d, spec.d) = omega_coeffs[k].topLeftCorner(spec.d, spec.d);
    if (k == 0 && lsum > 0) c.bottomRightCorner(lsum, lsum).setIdentity();
    f_coeffs.push_back(c);
  }

  auto e_fn = PiecewiseMatrixFunction::polynomial(e_coeffs, t0, t1);
  auto f_fn = PiecewiseMatrixFunction::polynomial(f_coeffs, t0, t1);
  return DaeProblem::make(e_fn, f_fn);
}

EquivalenceTransform random_equivalence(int m, double t0, double t1, int degree,
                                        double condition_bound, std::mt19937_64& rng) {
  const auto make_one = [&]() -> PiecewiseMatrixFunction {
    for (int attempt = 0; attempt < 200; ++attempt) {
      // Orthogonal constant part plus a scaled polynomial tail keeps the
      // condition number small by construction; rejection confirms it.
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_block(m, m, 1.0, rng));
      Eigen::MatrixXd q0 = qr.householderQ();
      std::vector<Eigen::MatrixXd> coeffs{q0};
      for (int k = 1; k <= degree; ++k) coeffs.push_back(random_block(m, m, 0.4 / degree, rng));
      auto fn = PiecewiseMatrixFunction::polynomial(coeffs, t0, t1);
      bool ok = true;
      for (int i = 0; i <= 20 && ok; ++i) {
        const double t = t0 + (t1 - t0) * i / 20.0;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(fn.eval_at(t));
        const auto& s = svd.singularValues();
        if (s(s.size() - 1) <= 0.0 || s(0) / s(s.size() - 1) > condition_bound) ok = false;
      }
      if (ok) return fn;
    }
    throw SingularTransform(t0);
  };

  auto l_fn = make_one();
  auto k_fn = make_one();
  auto k_dot = k_fn.derivative(1);
  return EquivalenceTransform{std::move(l_fn), std::move(k_fn), std::move(k_dot),
                              condition_bound};
}

DaeProblem apply_equivalence(const DaeProblem& problem, const EquivalenceTransform& transform) {
  // The transform must stay pointwise nonsingular on the interval.
  for (int i = 0; i <= 20; ++i) {
    const double t =
        problem.t_begin() + (problem.t_end() - problem.t_begin()) * i / 20.0;
    for (const auto* fn : {&transform.L, &transform.K}) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(fn->eval_at(t));
      const auto& sv = svd.singularValues();
      if (sv(sv.size() - 1) <= 0.0 ||
          sv(0) / sv(sv.size() - 1) > std::max(transform.condition_bound, 1.0) * 100.0)
        throw SingularTransform(t);
    }
  }
  const auto& e = problem.E;
  const auto& f = problem.F;
  auto e_new = multiply(multiply(transform.L, e), transform.K);
  auto f_new = add(multiply(multiply(transform.L, f), transform.K),
                   multiply(multiply(transform.L, e), transform.K_deriv));
  std::optional<PiecewiseMatrixFunction> q_new;
  if (problem.q) q_new = multiply(transform.L, *problem.q);
  auto out = DaeProblem::make(e_new, f_new, q_new);
  out.tol = problem.tol;
  out.fd_step = problem.fd_step;
  return out;
}

DaeProblem manufacture_problem(const DaeProblem& problem, const PiecewiseMatrixFunction& x_star) {
  if (x_star.rows() != problem.m() || x_star.cols() != 1)
    throw DimensionMismatch("reference solution must be m x 1");
  auto q = add(multiply(problem.E, x_star.derivative(1)), multiply(problem.F, x_star));
  auto out = DaeProblem::make(problem.E, problem.F, q);
  out.tol = problem.tol;
  out.fd_step = problem.fd_step;
  return out;
}

SutRanks sut_rank_oracle(const PiecewiseMatrixFunction& n, const std::vector<int>& block_sizes,
                         int k, double t, const TolerancePolicy& tol) {
  const int l = n.rows();
  if (n.cols() != l) throw DimensionMismatch("N must be square");
  int total = 0;
  std::vector<int> offset{0};
  for (int li : block_sizes) {
    total += li;
    offset.push_back(total);
  }
  if (total != l) throw DimensionMismatch("block sizes do not sum to the matrix size");

  // Strict block upper triangularity of every coefficient.
  for (const auto& seg : n.segments()) {
    for (const auto& c : seg.coeffs) {
      for (size_t i = 0; i < block_sizes.size(); ++i) {
        for (size_t j = 0; j <= i; ++j) {
          if (c.block(offset[i], offset[j], block_sizes[i], block_sizes[j]).norm() > 0.0)
            throw NotStrictlyUpperTriangular();
        }
      }
    }
  }

  // Array with the same binomial weights as the full derivative array of a
  // pair diag(I, N), diag(Omega, I): block(i,j) = C(i,i-j) N^(i-j) + [j=i-1] I.
  const int size = (k + 1) * l;
  Eigen::MatrixXd arr = Eigen::MatrixXd::Zero(size, size);
  std::vector<Eigen::MatrixXd> dn(k + 1);
  const int seg = n.segment_at(t);
  for (int i = 0; i <= k; ++i) dn[i] = n.eval_segment(seg, t, i);
  auto binom = [](int nn, int kk) {
    double v = 1.0;
    for (int i = 1; i <= kk; ++i) v = v * (nn - kk + i) / i;
    return v;
  };
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; j <= i; ++j) {
      Eigen::MatrixXd blk = binom(i, i - j) * dn[i - j];
      if (j == i - 1) blk += Eigen::MatrixXd::Identity(l, l);
      arr.block(i * l, j * l, l, l) = blk;
    }
  }

  SutRanks out;
  out.rank_array = rank_of(arr, tol).rank;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(l, l);
  for (int i = 0; i <= k; ++i) power = power * dn[0];
  out.rank_power = rank_of(power, tol).rank;
  return out;
}

}  // namespace dae
