#pragma once

#include <vector>

#include "stepbench/control.hpp"
#include "stepbench/problems.hpp"
#include "stepbench/types.hpp"

namespace stepbench {

/// One trial step: the step length actually attempted, whether the controller
/// accepted it, and whether endpoint clamping shortened it.
struct StepRecord {
  double t = 0.0;
  double h = 0.0;
  bool accepted = false;
  bool clamped = false;
};

struct IntegrationStats {
  long long n_accepted = 0;
  long long n_rejected = 0;
  long long n_fevals = 0;
  Vec y_final;
  double t_final = 0.0;
  std::vector<StepRecord> h_history;  // populated when requested
};

struct IntegrationLimits {
  long long max_steps = 10'000'000;
  double h_min_factor = 1e-14;  // times interval length
  bool record_history = false;
};

/// Deterministic starting step: h0 = T * min(1e-2, tau^(1/(p+1))).
double initial_step(const OdeProblem& problem, const ControllerParams& params);

/// Adaptive loop: trial step, accept/reject via decide(), advance or retry.
/// FSAL first-stage reuse survives rejection, so for DP54
/// n_fevals = 1 + 6 * (n_accepted + n_rejected) on every successful run.
IntegrationStats integrate(const OdeProblem& problem,
                           const ControllerParams& params,
                           const IntegrationLimits& limits = {});

/// Inf-norm of (y_final - reference endpoint state).
double global_error(const OdeProblem& problem, const IntegrationStats& stats);

}  // namespace stepbench
