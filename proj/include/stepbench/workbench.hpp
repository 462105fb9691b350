#pragma once

#include <string>
#include <vector>

#include "stepbench/control.hpp"
#include "stepbench/problems.hpp"

namespace stepbench {

struct CurvePoint {
  double tau = 0.0;
  double global_error = 0.0;
  long long n_fevals = 0;
  long long n_accepted = 0;
  long long n_rejected = 0;
};

struct CurveGap {
  double tau = 0.0;
  std::string reason;
};

/// Per-problem work-precision data: (tau, global error, fevals) points
/// sorted by tau descending. Failed runs become gaps, not errors.
struct WorkPrecisionCurve {
  std::string problem_id;
  ControllerConfig controller;
  std::vector<CurvePoint> points;
  std::vector<CurveGap> gaps;
};

/// One independent integration task: a (problem, controller, tau) cell.
struct SweepCell {
  std::string problem_id;
  ControllerConfig controller;
  double tau = 0.0;
};

struct CellResult {
  bool ok = false;
  CurvePoint point;
  std::string fail_reason;
};

/// Serial reference cell runner, kept for testing the parallel kernel.
std::vector<CellResult> run_cells_serial(const std::vector<SweepCell>& cells);

/// OpenMP cell runner. jobs = 1 runs the serial reference; jobs <= 0 uses
/// the OpenMP default thread count. Results are independent of the
/// schedule: each cell writes only its own slot.
std::vector<CellResult> run_cells(const std::vector<SweepCell>& cells,
                                  int jobs);

/// 21 log-equispaced tolerances from 1e-2 down to 1e-12 (half decades).
std::vector<double> default_tau_grid();

/// Targets 1e-3 .. 1e-8 by decades.
std::vector<double> default_targets();

/// n log-equispaced values from `hi` down to `lo`.
std::vector<double> log_grid(double hi, double lo, int n);

/// One integrate() per tau on the grid (positive, descending).
WorkPrecisionCurve sweep(const OdeProblem& problem,
                         const ControllerConfig& controller,
                         const std::vector<double>& tau_grid, int jobs = 1);

/// Log-log piecewise-linear interpolation of n_fevals versus global error on
/// the lower-left Pareto envelope of the curve points. Throws
/// UnbracketedTarget when the target lies outside the envelope range.
double fevals_at(const WorkPrecisionCurve& curve, double target);

struct RatioCell {
  std::string problem;
  double target = 0.0;
  double fevals_a = 0.0;  // NaN when undefined
  double fevals_b = 0.0;
  bool defined = false;

  double ratio() const { return fevals_a / fevals_b; }
};

struct RatioRow {
  double target = 0.0;
  double mean_ratio = 0.0;  // NaN when no cell is defined
  int defined_cells = 0;
  int excluded_cells = 0;
};

/// Fixed-target comparison of two controllers over a suite: per-cell
/// interpolated feval counts, per-target arithmetic mean of the a/b ratios,
/// and the fraction of defined cells where a uses strictly fewer fevals.
struct RatioTable {
  std::vector<std::string> suite;
  ControllerConfig controller_a;
  ControllerConfig controller_b;
  std::vector<double> targets;
  std::vector<RatioCell> cells;  // target-major, suite order within a row
  std::vector<RatioRow> rows;
  double win_fraction = 0.0;
  int defined_cells = 0;
  int excluded_cells = 0;
};

RatioTable compare(const std::vector<std::string>& suite,
                   const ControllerConfig& a, const ControllerConfig& b,
                   const std::vector<double>& targets,
                   const std::vector<double>& tau_grid, int jobs = 1);

/// Mean of the per-target mean ratios (rows with no defined cell skipped).
double grand_mean_ratio(const RatioTable& table);

// ---- export / import -------------------------------------------------------

/// CSV with the pinned header
/// problem,controller,tau,global_error,n_fevals,n_accepted,n_rejected
std::string curve_csv(const WorkPrecisionCurve& curve);
std::string curves_csv(const std::vector<WorkPrecisionCurve>& curves);

std::string ratio_table_csv(const RatioTable& table);
RatioTable ratio_table_from_csv(const std::string& text);

std::string ratio_table_json(const RatioTable& table);
RatioTable ratio_table_from_json(const std::string& text);

/// Human-readable table: one line per target plus the summary lines.
std::string ratio_table_text(const RatioTable& table);

/// %.17g rendering used by every writer (round-trips doubles exactly).
std::string fmt_double(double v);

}  // namespace stepbench
