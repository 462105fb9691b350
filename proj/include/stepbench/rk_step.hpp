#pragma once

#include <span>

#include "stepbench/tableau.hpp"
#include "stepbench/types.hpp"

namespace stepbench {

/// Result of one embedded step: the order-p and order-q updates, their
/// componentwise difference, and the final stage derivative for FSAL reuse.
struct StepOutcome {
  Vec y_high;
  Vec y_low;
  Vec eps_vec;  // y_high - y_low, exact componentwise
  Vec k_last;   // f(t + h, y_high) for FSAL pairs, else empty
  int evals = 0;
};

/// Scratch buffers so the integrator can step without per-call allocation.
struct StepWorkspace {
  std::vector<Vec> k;
  Vec stage_y;

  void resize(int stages, int dim);
};

/// One embedded RK step of length h from (t, y).
///
/// `k1_cached`, when non-empty, must equal f(t, y); with an FSAL tableau this
/// saves the first stage evaluation (evals = stages - 1, else stages).
/// Throws ErrorKind::Evaluation if the rhs returns a non-finite value.
void embedded_step_into(const Rhs& f, double t, std::span<const double> y,
                        double h, std::span<const double> k1_cached,
                        const EmbeddedTableau& tab, StepWorkspace& ws,
                        StepOutcome& out);

/// Allocating convenience wrapper around embedded_step_into.
StepOutcome embedded_step(const Rhs& f, double t, std::span<const double> y,
                          double h, std::span<const double> k1_cached,
                          const EmbeddedTableau& tab);

}  // namespace stepbench
