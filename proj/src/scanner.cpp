#include "dae/scanner.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dae/frameworks.hpp"
#include "dae/tractability.hpp"

namespace dae {

namespace {

const char* kCaveat =
    "rank functions are certified on the probe grid only; critical sets finer than the grid "
    "(which can even be over-countable) are invisible, and transition points are bracketed, "
    "never pinpointed";

// Pointwise probe data used by the scanner and the classifier.
struct ProbeData {
  double t = 0.0;
  bool ok = false;                               // profile extraction succeeded
  bool solvability_violated = false;             // some [E_[k] F_[k]] lost row rank
  std::optional<CharacteristicProfile> profile;  // theta extraction from the arrays
  std::optional<int> d_point;                    // stabilized r_[K] - K m
  ArrayProfile arrays;
  std::string error;
};

ProbeData probe_at(const DaeProblem& problem, double t, int k_max) {
  ProbeData out;
  out.t = t;
  try {
    out.arrays = array_profile(problem, t, k_max);
    out.solvability_violated = out.arrays.any_solvability_violation();
    const int levels = static_cast<int>(out.arrays.r_arr.size()) - 1;
    if (levels >= 1) out.d_point = out.arrays.r_arr[levels] - levels * problem.m();
    try {
      out.profile = theta_from_arrays(out.arrays);
      out.ok = true;
    } catch (const Error& e) {
      out.error = e.what();
    }
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

std::string jump_evidence(const std::vector<ProbeData>& probes) {
  std::ostringstream os;
  const auto& ref = probes.front().arrays.r_arr;
  for (size_t k = 0; k < ref.size(); ++k) {
    int lo = ref[k], hi = ref[k];
    for (const auto& p : probes) {
      if (k < p.arrays.r_arr.size()) {
        lo = std::min(lo, p.arrays.r_arr[k]);
        hi = std::max(hi, p.arrays.r_arr[k]);
      }
    }
    if (lo != hi) os << "r_[" << k << "] jumps " << lo << ".." << hi << "; ";
  }
  return os.str();
}

PointClassification classify_from_probes(const std::vector<ProbeData>& probes, double t,
                                         int k_max) {
  PointClassification out;
  out.t = t;
  out.bracket_lo = probes.front().t;
  out.bracket_hi = probes.back().t;

  // Singular: a solvability violation anywhere in the bracket.
  for (const auto& p : probes) {
    if (p.solvability_violated) {
      out.kind = PointKind::Singular;
      std::ostringstream os;
      os << "solvability violated: rank [E_[k] F_[k]] below full row rank near t=" << p.t;
      out.evidence = os.str();
      return out;
    }
  }

  // Singular: the degree of freedom changes across or at the point.
  std::optional<int> d_ref;
  for (const auto& p : probes) {
    if (!p.d_point) continue;
    if (!d_ref) d_ref = *p.d_point;
    if (*d_ref != *p.d_point) {
      out.kind = PointKind::Singular;
      std::ostringstream os;
      os << "degree of freedom changes across the point (" << *d_ref << " vs " << *p.d_point
         << "): singular flow";
      out.evidence = os.str();
      return out;
    }
  }

  // Regular: identical profiles at every probe.
  bool all_equal = true;
  for (const auto& p : probes) {
    if (!p.ok || !probes.front().ok || !(p.profile == probes.front().profile)) all_equal = false;
  }
  if (all_equal) {
    out.kind = PointKind::Regular;
    out.profile = probes.front().profile;
    return out;
  }

  // Harmless: some stabilized level has constant rank and 1-fullness across
  // the bracket while lower ranks jump.
  for (int nu = 0; nu <= k_max; ++nu) {
    bool constant = true;
    bool one_full = true;
    for (const auto& p : probes) {
      if (nu >= static_cast<int>(p.arrays.r_arr.size())) {
        constant = false;
        break;
      }
      if (p.arrays.r_arr[nu] != probes.front().arrays.r_arr[nu]) constant = false;
      if (!p.arrays.e_one_full[nu]) one_full = false;
    }
    if (constant && one_full) {
      out.kind = PointKind::HarmlessCritical;
      std::ostringstream os;
      os << "constant d and constant 1-full E_[" << nu << "] across the bracket while "
         << jump_evidence(probes)
         << "local index changes (solvability certified by this proxy, not directly)";
      out.evidence = os.str();
      return out;
    }
  }

  out.kind = PointKind::Undetermined;
  std::string errs;
  for (const auto& p : probes)
    if (!p.error.empty()) errs += p.error + "; ";
  out.evidence = "no stabilized constant-rank 1-full level found on the bracket; " + errs +
                 jump_evidence(probes);
  return out;
}

}  // namespace

std::string to_string(PointKind kind) {
  switch (kind) {
    case PointKind::Regular: return "Regular";
    case PointKind::HarmlessCritical: return "HarmlessCritical";
    case PointKind::Singular: return "Singular";
    case PointKind::Undetermined: return "Undetermined";
  }
  return "?";
}

PointClassification classify_point(const DaeProblem& problem, double t,
                                   const std::vector<double>& neighborhood_probes, int k_max) {
  if (k_max < 0) k_max = problem.default_kmax();
  std::vector<double> ts = neighborhood_probes;
  ts.push_back(t);
  std::sort(ts.begin(), ts.end());
  std::vector<ProbeData> probes;
  for (double tp : ts) probes.push_back(probe_at(problem, tp, k_max));
  return classify_from_probes(probes, t, k_max);
}

ScanReport scan(const DaeProblem& problem, const GridSpec& grid) {
  const int k_max = grid.k_max > 0 ? grid.k_max : problem.default_kmax();
  const double a = problem.t_begin();
  const double b = problem.t_end();
  const int n = std::max(2, grid.probes);

  ScanReport rep;
  rep.caveat = kCaveat;
  rep.tolerance = problem.tol;

  std::vector<double> ts;
  for (int i = 0; i < n; ++i) ts.push_back(a + (b - a) * i / (n - 1));
  const double delta = (b - a) * 1e-7;
  for (double tb : problem.breakpoints()) {
    for (double tp : {tb - delta, tb, tb + delta})
      if (tp >= a && tp <= b) ts.push_back(tp);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  rep.grid = ts;

  std::vector<ProbeData> probes;
  probes.reserve(ts.size());
  for (double t : ts) {
    probes.push_back(probe_at(problem, t, k_max));
    for (const auto& w : probes.back().arrays.warnings) rep.tolerance_audit.push_back(w);
  }

  // Maximal runs of identical pointwise profiles become segments.
  const auto same = [](const ProbeData& x, const ProbeData& y) {
    return x.ok && y.ok && x.profile == y.profile;
  };
  std::vector<std::pair<size_t, size_t>> runs;
  size_t i = 0;
  while (i < probes.size()) {
    if (!probes[i].ok) {
      runs.emplace_back(i, i);
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < probes.size() && same(probes[j], probes[j + 1])) ++j;
    runs.emplace_back(i, j);
    i = j + 1;
  }

  // A run is a segment when it spans more than one probe; short runs and run
  // boundaries are classified as transition points.
  const auto neighbors_of = [&](size_t lo, size_t hi) {
    std::vector<ProbeData> nb;
    for (size_t k = lo >= 2 ? lo - 2 : 0; k <= std::min(hi + 2, probes.size() - 1); ++k)
      nb.push_back(probes[k]);
    return nb;
  };

  for (size_t rix = 0; rix < runs.size(); ++rix) {
    const auto [lo, hi] = runs[rix];
    const bool is_segment = hi > lo && probes[lo].ok;
    if (is_segment) {
      ScanSegment seg;
      seg.t0 = probes[lo].t;
      seg.t1 = probes[hi].t;
      seg.profile = *probes[lo].profile;
      rep.segments.push_back(seg);
      continue;
    }
    // Isolated probe (profile change or failure): classify it on its bracket.
    auto nb = neighbors_of(lo, hi);
    auto cls = classify_from_probes(nb, probes[lo].t, k_max);
    cls.t = probes[lo].t;
    rep.points.push_back(cls);
  }

  // Boundaries between adjacent segments with different profiles are also
  // transition points (the change happened between two grid probes).
  for (size_t rix = 0; rix + 1 < runs.size(); ++rix) {
    const auto [lo1, hi1] = runs[rix];
    const auto [lo2, hi2] = runs[rix + 1];
    const bool seg1 = hi1 > lo1 && probes[lo1].ok;
    const bool seg2 = hi2 > lo2 && probes[lo2].ok;
    if (seg1 && seg2 && !(probes[lo1].profile == probes[lo2].profile)) {
      std::vector<ProbeData> nb;
      for (size_t k = hi1 >= 1 ? hi1 - 1 : 0; k <= std::min(lo2 + 1, probes.size() - 1); ++k)
        nb.push_back(probes[k]);
      auto cls = classify_from_probes(nb, 0.5 * (probes[hi1].t + probes[lo2].t), k_max);
      rep.points.push_back(cls);
    }
  }
  std::sort(rep.points.begin(), rep.points.end(),
            [](const PointClassification& x, const PointClassification& y) { return x.t < y.t; });

  rep.almost_regular = !rep.points.empty() && !rep.segments.empty();
  for (const auto& p : rep.points) {
    if (p.kind != PointKind::HarmlessCritical) rep.almost_regular = false;
  }

  // Framework cross-check on sampled segment probes; the array route wins on a
  // discrepancy and the disagreement is reported.
  for (const auto& seg : rep.segments) {
    for (int s = 0; s < 3; ++s) {
      const double tc = seg.t0 + (seg.t1 - seg.t0) * (0.17 + 0.33 * s);
      auto ar = analyze_point(problem, tc, k_max);
      for (const auto& d : ar.discrepancies)
        rep.warnings.push_back("t=" + std::to_string(tc) + ": " + d);
      for (const auto& e : ar.framework_errors)
        rep.warnings.push_back("t=" + std::to_string(tc) + ": " + e);
    }
  }
  return rep;
}

bool ScanReport::any_singular() const {
  for (const auto& p : points)
    if (p.kind == PointKind::Singular) return true;
  return false;
}

bool ScanReport::any_undetermined() const {
  for (const auto& p : points)
    if (p.kind == PointKind::Undetermined) return true;
  return false;
}

int ScanReport::exit_code() const {
  if (any_singular()) return 20;
  if (any_undetermined()) return 30;
  if (!points.empty()) return 10;
  return 0;
}

nlohmann::json ScanReport::to_json() const {
  nlohmann::json j;
  j["tool_version"] = "1.0.0";
  j["caveat"] = caveat;
  j["tolerance"] = {{"rel_rank_tol", tolerance.rel_rank_tol}, {"abs_floor", tolerance.abs_floor}};
  j["grid"] = grid;
  j["segments"] = nlohmann::json::array();
  for (const auto& s : segments) {
    j["segments"].push_back({{"t0", s.t0},
                             {"t1", s.t1},
                             {"profile", s.profile.to_json()}});
  }
  j["points"] = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json pj{{"t", p.t},
                      {"bracket", {p.bracket_lo, p.bracket_hi}},
                      {"kind", to_string(p.kind)},
                      {"evidence", p.evidence}};
    if (p.profile) pj["profile"] = p.profile->to_json();
    j["points"].push_back(pj);
  }
  j["almost_regular"] = almost_regular;
  j["tolerance_audit"] = tolerance_audit;
  j["warnings"] = warnings;
  j["exit_code"] = exit_code();
  return j;
}

std::string ScanReport::to_csv() const {
  std::ostringstream os;
  os << "t0,t1,kind,r,mu,d,thetas\n";
  for (const auto& s : segments) {
    os << s.t0 << "," << s.t1 << ",Regular," << s.profile.r << "," << s.profile.mu << ","
       << s.profile.d << ",";
    for (size_t i = 0; i < s.profile.thetas.size(); ++i)
      os << (i ? " " : "") << s.profile.thetas[i];
    os << "\n";
  }
  for (const auto& p : points) {
    os << p.bracket_lo << "," << p.bracket_hi << "," << to_string(p.kind) << ",,,,\n";
  }
  return os.str();
}

namespace {

void check_eq(std::vector<std::string>& out, const std::string& what, int got, int expect) {
  if (got != expect) {
    std::ostringstream os;
    os << what << ": got " << got << ", canonical value says " << expect;
    out.push_back(os.str());
  }
}

}  // namespace

std::vector<std::string> identity_battery(const DaeProblem& problem, double t) {
  std::vector<std::string> out;
  const int m = problem.m();
  const int k_max = problem.default_kmax();

  const auto arrays = array_profile(problem, t, k_max);
  const auto canon = theta_from_arrays(arrays);
  const int mu = canon.mu;
  const int r = canon.r;
  auto theta = [&](int i) { return i < static_cast<int>(canon.thetas.size()) ? canon.thetas[i] : 0; };
  auto theta_sum_below = [&](int i) {
    int s = 0;
    for (int j = 0; j < i; ++j) s += theta(j);
    return s;
  };

  // 1-2. Basic and elimination chains: r_i = r - sum_{j<i} theta_j, theta_i matches.
  for (auto mode : {ReductionMode::Basic, ReductionMode::Elimination}) {
    const char* name = mode == ReductionMode::Basic ? "basic" : "elimination";
    const auto red = reduction_profile(problem, t, mode);
    check_eq(out, std::string(name) + " index", red.profile.mu, mu);
    for (const auto& lvl : red.trace) {
      check_eq(out, std::string(name) + " r_" + std::to_string(lvl.level), lvl.r_i,
               r - theta_sum_below(lvl.level));
      check_eq(out, std::string(name) + " theta_" + std::to_string(lvl.level), lvl.theta_i,
               theta(lvl.level));
    }
  }

  // 3. Dissection: r^D_i = m - theta_{i-1}.
  const auto dis = dissection_profile(problem, t);
  check_eq(out, "dissection index", dis.mu_dissection, mu);
  check_eq(out, "dissection r^D_0", dis.r_dissection[0], r);
  for (size_t idx = 1; idx < dis.r_dissection.size(); ++idx)
    check_eq(out, "dissection r^D_" + std::to_string(idx), dis.r_dissection[idx],
             m - theta(static_cast<int>(idx) - 1));

  // 4. Strangeness: s_i = theta_i, r^S_i = r - sum_{j<i} theta_j, a^S_i = m - r^S_i - theta_i.
  const auto str = strangeness_profile(problem, t);
  check_eq(out, "strangeness index", str.mu_strangeness, std::max(mu - 1, 0));
  for (const auto& trip : str.triples) {
    check_eq(out, "strangeness s_" + std::to_string(trip.level), trip.s_s, theta(trip.level));
    check_eq(out, "strangeness r_" + std::to_string(trip.level), trip.r_s,
             r - theta_sum_below(trip.level));
    check_eq(out, "strangeness a_" + std::to_string(trip.level), trip.a_s,
             m - trip.r_s - theta(trip.level));
    check_eq(out, "strangeness v_" + std::to_string(trip.level), trip.v_s, 0);
  }

  // 5. Tractability: r^T_i = m - theta_{i-1}.
  const auto chain = admissible_chain_at(problem, t);
  if (!chain.completed) {
    out.push_back("tractability chain incomplete: " + chain.failure);
  } else {
    check_eq(out, "tractability index", chain.mu_t, mu);
    check_eq(out, "tractability r^T_0", chain.levels[0].r_t, r);
    for (int idx = 1; idx <= chain.mu_t; ++idx)
      check_eq(out, "tractability r^T_" + std::to_string(idx), chain.levels[idx].r_t,
               m - theta(idx - 1));
  }

  // 6. Array ranks: r_[i] = i m + r - sum_{j<i} theta_j; D and B share them.
  for (int i = 0; i <= std::min(mu, static_cast<int>(arrays.r_arr.size()) - 1); ++i) {
    check_eq(out, "array rank r_[" + std::to_string(i) + "]", arrays.r_arr[i],
             i * m + r - theta_sum_below(i));
    check_eq(out, "rank D_[" + std::to_string(i) + "]", arrays.rank_D[i], arrays.r_arr[i]);
    check_eq(out, "rank B_[" + std::to_string(i) + "]", arrays.rank_B[i], arrays.r_arr[i]);
  }

  // 7. rho_i = m - theta_i.
  for (int i = 0; i < mu && i < static_cast<int>(arrays.rho.size()); ++i)
    check_eq(out, "rho_" + std::to_string(i), arrays.rho[i], m - theta(i));

  // 8. rank T_k = theta_{k-1}, rank V_k = r - sum_{j<k} theta_j.
  for (int k = 1; k <= mu && k < static_cast<int>(arrays.rank_T.size()); ++k) {
    check_eq(out, "rank T_" + std::to_string(k), arrays.rank_T[k], theta(k - 1));
    check_eq(out, "rank V_" + std::to_string(k), arrays.rank_V[k], r - theta_sum_below(k));
  }

  // 9. Degree of freedom and constraint count; every framework profile equal.
  check_eq(out, "d", canon.d, r - canon.theta_sum());
  check_eq(out, "a", canon.a, m - canon.d);
  const auto tr_prof = chain.completed ? tractability_profile(chain, m) : canon;
  for (const auto&[name, prof] :
       {std::pair<const char*, CharacteristicProfile>{"basic", reduction_profile(problem, t).profile},
        {"dissection", dis.profile},
        {"strangeness", str.profile},
        {"tractability", tr_prof}}) {
    if (!(prof == canon)) out.push_back(std::string(name) + " profile differs: " + prof.to_string() +
                                        " vs " + canon.to_string());
  }
  return out;
}

nlohmann::json AnalyzeReport::to_json() const {
  nlohmann::json j;
  j["t"] = t;
  j["canonical_profile"] = canonical.to_json();
  j["array_ranks"] = arrays.r_arr;
  j["rho"] = arrays.rho;
  j["full_row_rank_ok"] = std::vector<int>(arrays.full_row_rank_ok.begin(),
                                           arrays.full_row_rank_ok.end());
  auto put = [&](const char* name, const std::optional<CharacteristicProfile>& p) {
    if (p) j["frameworks"][name] = p->to_json();
  };
  put("basic", basic);
  put("elimination", elimination);
  put("dissection", dissection);
  put("strangeness", strangeness);
  put("tractability", tractability);
  j["framework_errors"] = framework_errors;
  j["discrepancies"] = discrepancies;
  j["warnings"] = warnings;
  return j;
}

AnalyzeReport analyze_point(const DaeProblem& problem, double t, int k_max) {
  if (k_max < 0) k_max = problem.default_kmax();
  AnalyzeReport rep;
  rep.t = t;
  rep.arrays = array_profile(problem, t, k_max);
  rep.warnings = rep.arrays.warnings;
  rep.canonical = theta_from_arrays(rep.arrays);

  const auto try_framework = [&](const char* name, auto&& fn,
                                 std::optional<CharacteristicProfile>& slot) {
    try {
      slot = fn();
      if (!(*slot == rep.canonical))
        rep.discrepancies.push_back(std::string(name) + ": " + slot->to_string() +
                                    " (arrays say " + rep.canonical.to_string() + ")");
    } catch (const Error& e) {
      rep.framework_errors.push_back(std::string(name) + ": " + e.what());
    }
  };
  try_framework("basic", [&] { return reduction_profile(problem, t).profile; }, rep.basic);
  try_framework("elimination",
                [&] { return reduction_profile(problem, t, ReductionMode::Elimination).profile; },
                rep.elimination);
  try_framework("dissection", [&] { return dissection_profile(problem, t).profile; },
                rep.dissection);
  try_framework("strangeness", [&] { return strangeness_profile(problem, t).profile; },
                rep.strangeness);
  try_framework("tractability",
                [&] {
                  auto chain = admissible_chain_at(problem, t);
                  return tractability_profile(chain, problem.m());
                },
                rep.tractability);
  return rep;
}

}  // namespace dae
