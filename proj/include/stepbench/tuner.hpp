#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "stepbench/control.hpp"

namespace stepbench {

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// What to tune: minimize the summed interpolated feval counts of one
/// controller kind over (suite x targets), subject to box bounds on
/// (sigma, lambda1, lambda2).
struct TuneSpec {
  ControllerKind kind = ControllerKind::Standard;
  std::vector<std::string> suite;   // empty -> group1 (minus unverified C5)
  std::vector<double> targets;      // empty -> {1e-4, 1e-5, 1e-6, 1e-7}
  Bounds sigma_bounds{1.0, 20.0};
  Bounds lambda1_bounds{0.05, 0.95};
  Bounds lambda2_bounds{1.05, 10.0};
  ParamTriple start{1.20, 0.50, 2.00};
  int budget = 200;                 // max objective evaluations
  std::vector<double> tau_grid;     // empty -> workbench default grid
  int jobs = 1;

  std::vector<std::string> resolved_suite() const;
  std::vector<double> resolved_targets() const;
  std::vector<double> resolved_tau_grid() const;
  std::array<Bounds, 3> bounds() const {
    return {sigma_bounds, lambda1_bounds, lambda2_bounds};
  }
};

struct TraceEntry {
  int iter = 0;  // 1-based objective evaluation counter
  ParamTriple params;
  double objective = 0.0;
};

struct TuneResult {
  ParamTriple best_params;
  double best_objective = 0.0;
  std::vector<TraceEntry> trace;
};

/// Sum over (problem, target) of fevals_at(curve(params), target). An
/// undefined cell costs 10x the largest defined cell of its target row
/// (falling back to the largest defined cell anywhere); throws Infeasible
/// when every cell is undefined.
double objective(const ParamTriple& params, const TuneSpec& spec);

/// Bounded Nelder-Mead (reflection 1, expansion 2, contraction 0.5, shrink
/// 0.5; bounds by projection) with 3 deterministic restarts from the
/// perturbed best. Never evaluates outside the bounds box.
using Objective3 = std::function<double(const ParamTriple&)>;
TuneResult minimize_nelder_mead(const Objective3& f,
                                const std::array<Bounds, 3>& bounds,
                                const ParamTriple& start, int budget);

TuneResult tune(const TuneSpec& spec);

/// CSV trace: iter,sigma,lambda1,lambda2,objective
std::string trace_csv(const TuneResult& result);

}  // namespace stepbench
