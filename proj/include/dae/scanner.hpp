#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "dae/arrays.hpp"
#include "dae/problem.hpp"
#include "dae/profile.hpp"

namespace dae {

enum class PointKind { Regular, HarmlessCritical, Singular, Undetermined };

std::string to_string(PointKind kind);

struct PointClassification {
  double t = 0.0;
  double bracket_lo = 0.0;  // transitions are located only to grid resolution
  double bracket_hi = 0.0;
  PointKind kind = PointKind::Undetermined;
  std::optional<CharacteristicProfile> profile;  // present for Regular
  std::string evidence;
};

struct ScanSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  CharacteristicProfile profile;
};

struct GridSpec {
  int probes = 401;
  int k_max = -1;  // -1: use the problem default (m)
};

struct ScanReport {
  std::string caveat;  // printed in every report header
  TolerancePolicy tolerance;
  std::vector<double> grid;
  std::vector<ScanSegment> segments;
  std::vector<PointClassification> points;  // non-regular probes, bracketed
  bool almost_regular = false;
  std::vector<std::string> tolerance_audit;
  std::vector<std::string> warnings;

  bool any_singular() const;
  bool any_undetermined() const;
  // 0 regular everywhere, 10 almost regular, 20 singular present, 30 undetermined present.
  int exit_code() const;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

ScanReport scan(const DaeProblem& problem, const GridSpec& grid = {});

// Classification of one point from bracketing probes (the point itself is
// probed as well, under the right-limit piece convention).
PointClassification classify_point(const DaeProblem& problem, double t,
                                   const std::vector<double>& neighborhood_probes, int k_max = -1);

// Cross-framework audit at one point: every characteristic-value identity that
// links the reduction, dissection, strangeness, tractability and
// derivative-array quantities, checked as exact integer equalities against the
// array-derived canonical values. Returns human-readable violations (empty on
// a fully consistent regular point).
std::vector<std::string> identity_battery(const DaeProblem& problem, double t);

// Per-point multi-framework report backing the `analyze` command.
struct AnalyzeReport {
  double t = 0.0;
  CharacteristicProfile canonical;  // arrays route (authoritative)
  ArrayProfile arrays;
  std::optional<CharacteristicProfile> basic, elimination, dissection, strangeness, tractability;
  std::vector<std::string> framework_errors;
  std::vector<std::string> discrepancies;  // frameworks disagreeing with the arrays route
  std::vector<std::string> warnings;
  nlohmann::json to_json() const;
};

AnalyzeReport analyze_point(const DaeProblem& problem, double t, int k_max = -1);

}  // namespace dae
