#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stepbench/types.hpp"

namespace stepbench {

/// One initial value problem on [t0, t_end]. All shipped problems use [0, 20].
struct OdeProblem {
  std::string id;
  int dim = 0;
  Rhs rhs;
  Vec y0;
  double t0 = 0.0;
  double t_end = 20.0;
  /// Closed-form solution y(t), when one exists (A1-A4, E1); else null.
  std::function<void(double t, std::span<double> y)> exact;

  bool has_exact() const { return static_cast<bool>(exact); }
  Vec exact_at(double t) const;
};

struct ProblemGroups {
  std::vector<std::string> group1;  // A1 A3 A5 B2 B4 C1 C3 C5 E2 E4
  std::vector<std::string> group2;  // A2 A4 B1 B3 B5 C2 C4 E1 E3 E5
};

/// Lookup by id ("A1".."E5"). Throws UnknownId for ids outside the set and
/// UnsupportedProblem for C5 when its data file is missing or fails its
/// checksum.
const OdeProblem& get_problem(const std::string& id);

/// All 20 ids in registry order (A1..A5, B1..B5, C1..C5, E1..E5).
const std::vector<std::string>& all_problem_ids();

const ProblemGroups& groups();

/// True when the C5 data file loaded and passed its checksum.
bool c5_available();

/// C5's constants are transcribed but not yet verified against the original
/// suite; until then default suites exclude it.
bool c5_verified();

/// Resolve a suite alias ("group1", "group2", "all") or a single problem id.
/// When C5 is dropped from an alias a footnote explaining why is appended.
std::vector<std::string> resolve_suite(const std::string& alias,
                                       std::string* footnote = nullptr);

/// Endpoint reference state: exact(t_end) when a closed form exists, else the
/// endpoint of a tau=1e-13 run with the standard controller and recommended
/// parameters, cached per (id, tau_ref).
Vec reference_endpoint(const std::string& id);

/// Builds C5 from `dir`/c5_outer_planets.dat, verifying the SHA-256 recorded
/// beside it. Throws UnsupportedProblem when the file is missing, malformed,
/// or fails the checksum. The registry uses this on the configured data dir;
/// it is exposed so the loading path stays directly testable.
OdeProblem load_c5_problem(const std::string& dir);

/// Directory holding the C5 data file; defaults to the build-time data path.
void set_data_dir(const std::string& dir);
const std::string& data_dir();

}  // namespace stepbench
