#include "stepbench/rk_step.hpp"

#include <cassert>
#include <cmath>
#include <cstddef>
#include <sstream>

#include "stepbench/errors.hpp"

namespace stepbench {

namespace {

[[noreturn]] void raise_eval_error(double t, std::span<const double> y) {
  std::ostringstream os;
  os << "rhs returned a non-finite value at t=" << t << ", y=[";
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i) os << ", ";
    os << y[i];
  }
  os << "]";
  raise(ErrorKind::Evaluation, os.str());
}

void eval_checked(const Rhs& f, double t, std::span<const double> y,
                  std::span<double> dydt) {
  f(t, y, dydt);
  if (!all_finite(dydt)) raise_eval_error(t, y);
}

}  // namespace

void StepWorkspace::resize(int stages, int dim) {
  k.resize(static_cast<std::size_t>(stages));
  for (auto& ki : k) ki.resize(static_cast<std::size_t>(dim));
  stage_y.resize(static_cast<std::size_t>(dim));
}

void embedded_step_into(const Rhs& f, double t, std::span<const double> y,
                        double h, std::span<const double> k1_cached,
                        const EmbeddedTableau& tab, StepWorkspace& ws,
                        StepOutcome& out) {
  const std::size_t n = y.size();
  const std::size_t s = static_cast<std::size_t>(tab.stages);
  assert(h > 0.0);
  ws.resize(tab.stages, static_cast<int>(n));
  out.y_high.resize(n);
  out.y_low.resize(n);
  out.eps_vec.resize(n);

  const bool reuse = tab.fsal && !k1_cached.empty();
  out.evals = 0;
  if (reuse) {
    for (std::size_t j = 0; j < n; ++j) ws.k[0][j] = k1_cached[j];
  } else {
    eval_checked(f, t, y, ws.k[0]);
    ++out.evals;
  }

  for (std::size_t i = 1; i < s; ++i) {
    const auto& ai = tab.a[i];
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < i; ++l) acc += ai[l] * ws.k[l][j];
      ws.stage_y[j] = y[j] + h * acc;
    }
    eval_checked(f, t + tab.c[i] * h, ws.stage_y, ws.k[i]);
    ++out.evals;
  }

  for (std::size_t j = 0; j < n; ++j) {
    double hi = 0.0, lo = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      hi += tab.b[i] * ws.k[i][j];
      lo += tab.b_hat[i] * ws.k[i][j];
    }
    out.y_high[j] = y[j] + h * hi;
    out.y_low[j] = y[j] + h * lo;
    out.eps_vec[j] = out.y_high[j] - out.y_low[j];
  }

  // For an FSAL pair the last stage input is exactly y_high at t + h, so its
  // derivative doubles as the next step's first stage.
  if (tab.fsal) {
    out.k_last = ws.k[s - 1];
  } else {
    out.k_last.clear();
  }
}

StepOutcome embedded_step(const Rhs& f, double t, std::span<const double> y,
                          double h, std::span<const double> k1_cached,
                          const EmbeddedTableau& tab) {
  StepWorkspace ws;
  StepOutcome out;
  embedded_step_into(f, t, y, h, k1_cached, tab, ws, out);
  return out;
}

}  // namespace stepbench
