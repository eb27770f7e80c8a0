// Command-line front end: canonical characteristic values of linear
// time-varying DAEs E(t)x' + F(t)x = q(t), interval scanning and
// classification, benchmark generation, and solution of regular instances.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

#include "dae/arrays.hpp"
#include "dae/fixtures.hpp"
#include "dae/generator.hpp"
#include "dae/scanner.hpp"
#include "dae/solver.hpp"

namespace {

using namespace dae;

int cmd_analyze(const std::string& path, std::optional<double> t, int kmax, double tol_override) {
  auto problem = DaeProblem::load(path);
  if (tol_override > 0.0) problem.tol.rel_rank_tol = tol_override;
  const double tp = t ? *t : 0.5 * (problem.t_begin() + problem.t_end());
  auto rep = analyze_point(problem, tp, kmax);
  std::cout << rep.to_json().dump(2) << "\n";
  return rep.discrepancies.empty() && rep.framework_errors.empty() ? 0 : 1;
}

int cmd_scan(const std::string& path, int grid_n, const std::string& json_out,
             const std::string& csv_out) {
  auto problem = DaeProblem::load(path);
  GridSpec grid;
  grid.probes = grid_n;
  auto rep = scan(problem, grid);
  const auto j = rep.to_json();
  if (!json_out.empty()) {
    std::ofstream out(json_out);
    out << j.dump(2) << "\n";
  }
  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    out << rep.to_csv();
  }
  std::cout << "# " << rep.caveat << "\n";
  std::cout << "segments:\n";
  for (const auto& s : rep.segments)
    std::cout << "  [" << s.t0 << ", " << s.t1 << "]  " << s.profile.to_string() << "\n";
  std::cout << "points:\n";
  for (const auto& p : rep.points)
    std::cout << "  [" << p.bracket_lo << ", " << p.bracket_hi << "]  " << to_string(p.kind)
              << "  " << p.evidence << "\n";
  std::cout << "almost_regular: " << (rep.almost_regular ? "true" : "false") << "\n";
  for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
  for (const auto& w : rep.tolerance_audit) std::cout << "rank-audit: " << w << "\n";
  return rep.exit_code();
}

int cmd_generate(const std::string& thetas_csv, int d, const std::string& variant,
                 std::uint64_t seed, int degree, double magnitude, const std::string& out_problem,
                 const std::string& out_expected) {
  ScfSpec spec;
  spec.d = d;
  std::stringstream ss(thetas_csv);
  std::string item;
  while (std::getline(ss, item, ',')) spec.thetas.push_back(std::stoi(item));
  spec.variant = variant == "row" ? ScfVariant::FullRow : ScfVariant::FullColumn;
  spec.seed = seed;
  spec.fill = {degree, magnitude};

  auto problem = build_scf_pair(spec, 0.0, 1.0);
  problem.save(out_problem);

  nlohmann::json sidecar;
  sidecar["spec"] = spec.to_json();
  sidecar["seed"] = seed;
  sidecar["expected_profile"] = spec.expected_profile().to_json();
  std::ofstream out(out_expected);
  out << sidecar.dump(2) << "\n";
  std::cout << "wrote " << out_problem << " and " << out_expected << " (m=" << spec.m() << ", "
            << spec.expected_profile().to_string() << ")\n";
  return 0;
}

int cmd_solve(const std::string& problem_path, const std::string& ivp_path,
              const std::string& out_csv) {
  auto problem = DaeProblem::load(problem_path);
  auto ivp = IvpSpec::load(ivp_path);
  auto sol = integrate_completion(problem, ivp);

  std::ofstream out(out_csv);
  out << "t";
  for (int i = 0; i < problem.m(); ++i) out << ",x" << i + 1;
  out << ",residual,drift\n";
  for (size_t i = 0; i < sol.grid.size(); ++i) {
    out << sol.grid[i];
    for (int c = 0; c < problem.m(); ++c) out << "," << sol.x[i](c);
    out << "," << (i < sol.residuals.size() ? sol.residuals[i] : 0.0) << ","
        << (i < sol.drifts.size() ? sol.drifts[i] : 0.0) << "\n";
  }
  std::cout << "k_used=" << sol.k_used << " residual_max=" << sol.residual_max
            << " drift_max=" << sol.constraint_drift_max
            << " consistency_gap=" << sol.consistency_gap
            << " completion_cond_max=" << sol.completion_condition_max << "\n";
  return 0;
}

bool expect(bool cond, const std::string& what, int& failures) {
  std::cout << (cond ? "  ok    " : "  FAIL  ") << what << "\n";
  if (!cond) ++failures;
  return cond;
}

int cmd_selftest() {
  int failures = 0;
  std::cout << "fixture battery:\n";

  {
    auto p = fixtures::jordan_blocks();
    auto rep = analyze_point(p, 0.5);
    expect(rep.canonical.mu == 3 && rep.canonical.r == 4 &&
               rep.canonical.thetas == std::vector<int>{3, 1, 0} && rep.canonical.d == 0,
           "constant Jordan pair: mu=3, r=4, theta=(3,1,0), d=0", failures);
    expect(rep.discrepancies.empty() && rep.framework_errors.empty(),
           "constant Jordan pair: all frameworks agree", failures);
  }
  {
    auto rep = analyze_point(fixtures::theta_jump_regular(), 0.3);
    expect(rep.canonical.mu == 3 && rep.canonical.thetas == std::vector<int>{1, 1, 0},
           "theta-jump pair (nonvanishing branch): mu=3, theta=(1,1,0)", failures);
    auto rep2 = analyze_point(fixtures::theta_jump_degenerate(), 0.3);
    expect(rep2.canonical.mu == 2 && rep2.canonical.thetas == std::vector<int>{2, 0},
           "theta-jump pair (vanishing branch): mu=2, theta=(2,0)", failures);
  }
  {
    auto rep = scan(fixtures::switched_nilpotent(), GridSpec{201, -1});
    expect(rep.segments.size() == 2 && rep.almost_regular,
           "switched nilpotent pair: two segments, almost regular", failures);
  }
  {
    auto rep = scan(fixtures::flow_singularity(), GridSpec{201, -1});
    expect(rep.exit_code() == 20, "flow singularity pair: singular point found", failures);
  }
  {
    auto rep = scan(fixtures::solvability_loss(), GridSpec{201, -1});
    expect(rep.exit_code() == 20, "solvability-loss pair: singular point found", failures);
  }

  std::cout << "generator round trip (24 specs):\n";
  std::mt19937_64 rng(12345);
  int good = 0, total = 0;
  for (int trial = 0; trial < 24; ++trial) {
    ScfSpec spec;
    const int mu = 1 + static_cast<int>(rng() % 4);
    int level = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i + 1 < mu; ++i) spec.thetas.push_back(level);
    spec.thetas.push_back(0);
    std::sort(spec.thetas.rbegin(), spec.thetas.rend());
    spec.d = static_cast<int>(rng() % 3);
    spec.variant = (trial % 2) ? ScfVariant::FullRow : ScfVariant::FullColumn;
    spec.seed = rng();
    spec.fill = {1, 0.4};
    if (spec.m() > 12) continue;
    auto p = build_scf_pair(spec, 0.0, 1.0);
    auto tr = random_equivalence(spec.m(), 0.0, 1.0, 2, 50.0, rng);
    auto moved = apply_equivalence(p, tr);
    const auto got = theta_from_arrays(array_profile(moved, 0.35, moved.default_kmax()));
    ++total;
    if (got == spec.expected_profile()) ++good;
  }
  expect(good == total, "transformed pairs reproduce their spec profile (" +
                            std::to_string(good) + "/" + std::to_string(total) + ")",
         failures);

  std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"canonical characteristic values of linear time-varying DAEs"};
  app.require_subcommand(1);

  std::string problem_path, ivp_path, json_out, csv_out, variant = "column", thetas;
  std::string out_problem = "problem.json", out_expected = "expected.json";
  std::optional<double> t_opt;
  double tol = 0.0, magnitude = 0.4;
  int kmax = -1, grid_n = 401, d = 0, degree = 1;
  std::uint64_t seed = 1;

  auto* analyze = app.add_subcommand("analyze", "all frameworks at one point");
  analyze->add_option("problem", problem_path, "problem JSON")->required();
  double t_val = std::numeric_limits<double>::quiet_NaN();
  analyze->add_option("--t", t_val, "probe point (default: interval midpoint)");
  analyze->add_option("--kmax", kmax, "derivative-array depth");
  analyze->add_option("--tol", tol, "relative rank tolerance override");

  auto* scan_cmd = app.add_subcommand("scan", "sweep the interval and classify points");
  scan_cmd->add_option("problem", problem_path, "problem JSON")->required();
  scan_cmd->add_option("--grid", grid_n, "number of uniform probes");
  scan_cmd->add_option("--json", json_out, "write the full report here");
  scan_cmd->add_option("--csv", csv_out, "write segments/points as CSV");

  auto* gen = app.add_subcommand("generate", "emit a benchmark pair with known profile");
  gen->add_option("--theta", thetas, "comma-separated theta list, e.g. 3,1,0")->required();
  gen->add_option("--d", d, "dynamical degree of freedom");
  gen->add_option("--variant", variant, "column|row");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--degree", degree, "fill polynomial degree");
  gen->add_option("--magnitude", magnitude, "fill magnitude");
  gen->add_option("--out", out_problem, "problem output path");
  gen->add_option("--expected", out_expected, "sidecar output path");

  auto* solve = app.add_subcommand("solve", "integrate a regular instance");
  solve->add_option("problem", problem_path, "problem JSON")->required();
  solve->add_option("ivp", ivp_path, "IVP spec JSON")->required();
  solve->add_option("--out", csv_out, "solution CSV")->required();

  app.add_subcommand("selftest", "built-in fixture battery and generator round trip");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("analyze")) {
      if (!std::isnan(t_val)) t_opt = t_val;
      return cmd_analyze(problem_path, t_opt, kmax, tol);
    }
    if (app.got_subcommand("scan")) return cmd_scan(problem_path, grid_n, json_out, csv_out);
    if (app.got_subcommand("generate"))
      return cmd_generate(thetas, d, variant, seed, degree, magnitude, out_problem, out_expected);
    if (app.got_subcommand("solve")) return cmd_solve(problem_path, ivp_path, csv_out);
    if (app.got_subcommand("selftest")) return cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
