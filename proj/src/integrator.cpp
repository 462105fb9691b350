#include "stepbench/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stepbench/errors.hpp"
#include "stepbench/rk_step.hpp"
#include "stepbench/tableau.hpp"

namespace stepbench {

double initial_step(const OdeProblem& problem, const ControllerParams& params) {
  const double T = problem.t_end - problem.t0;
  const double inv = 1.0 / static_cast<double>(params.order + 1);
  return T * std::min(1e-2, std::pow(params.tau, inv));
}

IntegrationStats integrate(const OdeProblem& problem,
                           const ControllerParams& params,
                           const IntegrationLimits& limits) {
  if (!params.valid()) {
    raise(ErrorKind::Structural, "invalid controller parameters");
  }
  const EmbeddedTableau& tab = dp54_tableau();
  const double T = problem.t_end - problem.t0;
  const double h_min = limits.h_min_factor * T;

  IntegrationStats stats;
  double t = problem.t0;
  Vec y = problem.y0;
  double h = initial_step(problem, params);

  StepWorkspace ws;
  StepOutcome out;
  Vec k1(y.size());
  problem.rhs(t, y, k1);
  if (!all_finite(k1)) {
    raise(ErrorKind::Evaluation, "rhs non-finite at the initial state");
  }
  stats.n_fevals = 1;

  while (t < problem.t_end) {
    if (stats.n_accepted + stats.n_rejected >= limits.max_steps) {
      std::ostringstream os;
      os << problem.id << ": step budget " << limits.max_steps
         << " exceeded at t=" << t;
      raise(ErrorKind::StepBudget, os.str());
    }
    if (h < h_min) {
      std::ostringstream os;
      os << problem.id << ": step size " << h << " underflowed " << h_min
         << " at t=" << t << " (tau=" << params.tau << " unattainable)";
      raise(ErrorKind::StepUnderflow, os.str());
    }

    const double remaining = problem.t_end - t;
    const bool last = remaining <= h;
    const double h_eff = last ? remaining : h;
    const bool clamped = remaining < h;

    embedded_step_into(problem.rhs, t, y, h_eff, k1, tab, ws, out);
    stats.n_fevals += out.evals;
    if (!all_finite(out.y_high)) {
      std::ostringstream os;
      os << problem.id << ": state diverged (non-finite) at t=" << t
         << ", h=" << h_eff;
      raise(ErrorKind::Divergence, os.str());
    }

    const double err = all_finite(out.eps_vec)
                           ? inf_norm(out.eps_vec)
                           : std::numeric_limits<double>::infinity();
    const StepDecision dec = decide(params, h_eff, err);

    if (limits.record_history) {
      stats.h_history.push_back({t, h_eff, dec.accept, clamped});
    }

    if (dec.accept) {
      t = last ? problem.t_end : t + h_eff;
      y.swap(out.y_high);
      k1.swap(out.k_last);
      ++stats.n_accepted;
    } else {
      ++stats.n_rejected;
    }
    h = dec.h_next;
  }

  stats.t_final = t;
  stats.y_final = std::move(y);
  return stats;
}

double global_error(const OdeProblem& problem, const IntegrationStats& stats) {
  Vec ref;
  if (problem.has_exact()) {
    ref = problem.exact_at(problem.t_end);
  } else {
    try {
      ref = reference_endpoint(problem.id);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnknownId) throw;
      raise(ErrorKind::UnsupportedProblem,
            problem.id + ": no reference solution available");
    }
  }
  if (ref.size() != stats.y_final.size()) {
    raise(ErrorKind::Structural, problem.id + ": reference dimension mismatch");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    m = std::max(m, std::abs(stats.y_final[i] - ref[i]));
  }
  return m;
}

}  // namespace stepbench
