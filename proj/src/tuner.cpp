#include "stepbench/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stepbench/errors.hpp"
#include "stepbench/workbench.hpp"

namespace stepbench {

std::vector<std::string> TuneSpec::resolved_suite() const {
  if (!suite.empty()) return suite;
  return resolve_suite("group1");
}

std::vector<double> TuneSpec::resolved_targets() const {
  if (!targets.empty()) return targets;
  return {1e-4, 1e-5, 1e-6, 1e-7};
}

std::vector<double> TuneSpec::resolved_tau_grid() const {
  if (!tau_grid.empty()) return tau_grid;
  return default_tau_grid();
}

double objective(const ParamTriple& params, const TuneSpec& spec) {
  const auto suite = spec.resolved_suite();
  const auto targets = spec.resolved_targets();
  const auto grid = spec.resolved_tau_grid();
  const ControllerConfig cfg = make_config(spec.kind, params);

  std::vector<WorkPrecisionCurve> curves;
  curves.reserve(suite.size());
  for (const auto& id : suite) {
    try {
      curves.push_back(sweep(get_problem(id), cfg, grid, spec.jobs));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyCurve) throw;
      curves.push_back({id, cfg, {}, {}});  // all cells of this problem gap
    }
  }

  // cells[row][col]: interpolated fevals or NaN
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> cells(
      targets.size(), std::vector<double>(suite.size(), nan));
  double global_max = 0.0;
  bool any_defined = false;
  for (std::size_t r = 0; r < targets.size(); ++r) {
    for (std::size_t c = 0; c < suite.size(); ++c) {
      if (curves[c].points.empty()) continue;
      try {
        cells[r][c] = fevals_at(curves[c], targets[r]);
        any_defined = true;
        global_max = std::max(global_max, cells[r][c]);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::UnbracketedTarget) throw;
      }
    }
  }
  if (!any_defined) {
    raise(ErrorKind::Infeasible,
          "objective undefined: no (problem, target) cell was bracketed");
  }

  double total = 0.0;
  for (std::size_t r = 0; r < targets.size(); ++r) {
    double row_max = 0.0;
    for (std::size_t c = 0; c < suite.size(); ++c) {
      if (!std::isnan(cells[r][c])) row_max = std::max(row_max, cells[r][c]);
    }
    const double penalty = 10.0 * (row_max > 0.0 ? row_max : global_max);
    for (std::size_t c = 0; c < suite.size(); ++c) {
      total += std::isnan(cells[r][c]) ? penalty : cells[r][c];
    }
  }
  return total;
}

namespace {

using Point = std::array<double, 3>;

Point project(const Point& x, const std::array<Bounds, 3>& bounds) {
  Point p;
  for (int i = 0; i < 3; ++i) {
    p[i] = std::clamp(x[i], bounds[i].lo, bounds[i].hi);
  }
  return p;
}

ParamTriple to_triple(const Point& x) { return {x[0], x[1], x[2]}; }

struct Evaluator {
  const Objective3& f;
  const std::array<Bounds, 3>& bounds;
  int budget;
  TuneResult& result;

  bool exhausted() const {
    return static_cast<int>(result.trace.size()) >= budget;
  }

  // Projects, evaluates, traces. Returns +inf without evaluating once the
  // budget is spent so callers can unwind cleanly. Infeasible points count
  // against the budget and rank as infinitely bad.
  double operator()(Point& x) {
    x = project(x, bounds);
    if (exhausted()) return std::numeric_limits<double>::infinity();
    const ParamTriple t = to_triple(x);
    double v;
    try {
      v = f(t);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Infeasible) throw;
      v = std::numeric_limits<double>::infinity();
    }
    result.trace.push_back(
        {static_cast<int>(result.trace.size()) + 1, t, v});
    if (v < result.best_objective) {
      result.best_objective = v;
      result.best_params = t;
    }
    return v;
  }
};

struct Vertex {
  Point x;
  double fx;
};

void nelder_mead_pass(Evaluator& eval, const std::array<Bounds, 3>& bounds,
                      const Point& start) {
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;
  constexpr int kDim = 3;

  // Initial simplex: the start plus one vertex per coordinate, stepped by
  // 15% of that coordinate's range (stepping down when the top is too close).
  std::vector<Vertex> simplex;
  {
    Point x0 = start;
    const double f0 = eval(x0);
    simplex.push_back({x0, f0});
    for (int i = 0; i < kDim; ++i) {
      const double range = bounds[i].hi - bounds[i].lo;
      const double step = 0.15 * range;
      Point xi = x0;
      xi[i] = (x0[i] + step <= bounds[i].hi) ? x0[i] + step : x0[i] - step;
      const double fi = eval(xi);
      simplex.push_back({xi, fi});
    }
  }

  const auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) {
                       return a.fx < b.fx;
                     });
  };
  order();

  while (!eval.exhausted()) {
    // Convergence of this pass: simplex collapsed in both x and f.
    double spread_x = 0.0;
    for (int i = 0; i < kDim; ++i) {
      const double range = bounds[i].hi - bounds[i].lo;
      double lo = simplex[0].x[i], hi = simplex[0].x[i];
      for (const auto& v : simplex) {
        lo = std::min(lo, v.x[i]);
        hi = std::max(hi, v.x[i]);
      }
      spread_x = std::max(spread_x, (hi - lo) / range);
    }
    const double spread_f =
        std::abs(simplex.back().fx - simplex.front().fx) /
        (1.0 + std::abs(simplex.front().fx));
    if (spread_x < 1e-10 && spread_f < 1e-12) break;

    Point centroid{0.0, 0.0, 0.0};
    for (int v = 0; v < kDim; ++v) {
      for (int i = 0; i < kDim; ++i) centroid[i] += simplex[v].x[i] / kDim;
    }
    const Vertex& worst = simplex.back();

    Point xr;
    for (int i = 0; i < kDim; ++i) {
      xr[i] = centroid[i] + kReflect * (centroid[i] - worst.x[i]);
    }
    const double fr = eval(xr);

    if (fr < simplex.front().fx) {
      Point xe;
      for (int i = 0; i < kDim; ++i) {
        xe[i] = centroid[i] + kExpand * (centroid[i] - worst.x[i]);
      }
      const double fe = eval(xe);
      simplex.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr < simplex[kDim - 1].fx) {
      simplex.back() = {xr, fr};
    } else {
      Point xc;
      const bool outside = fr < worst.fx;
      const Point& toward = outside ? xr : worst.x;
      for (int i = 0; i < kDim; ++i) {
        xc[i] = centroid[i] + kContract * (toward[i] - centroid[i]);
      }
      const double fc = eval(xc);
      if (fc < std::min(fr, worst.fx)) {
        simplex.back() = {xc, fc};
      } else {
        for (int v = 1; v <= kDim; ++v) {
          for (int i = 0; i < kDim; ++i) {
            simplex[v].x[i] = simplex[0].x[i] +
                              kShrink * (simplex[v].x[i] - simplex[0].x[i]);
          }
          simplex[v].fx = eval(simplex[v].x);
        }
      }
    }
    order();
  }
}

}  // namespace

TuneResult minimize_nelder_mead(const Objective3& f,
                                const std::array<Bounds, 3>& bounds,
                                const ParamTriple& start, int budget) {
  TuneResult result;
  result.best_objective = std::numeric_limits<double>::infinity();
  Evaluator eval{f, bounds, budget, result};

  const Point x0 =
      project({start.sigma, start.lambda1, start.lambda2}, bounds);
  nelder_mead_pass(eval, bounds, x0);

  // Fixed restart scheme: +/-10% of each coordinate's range around the best
  // point so far, signs cycled per restart and coordinate.
  for (int restart = 1; restart <= 3 && !eval.exhausted(); ++restart) {
    Point xb{result.best_params.sigma, result.best_params.lambda1,
             result.best_params.lambda2};
    for (int i = 0; i < 3; ++i) {
      const double delta = 0.10 * (bounds[i].hi - bounds[i].lo);
      xb[i] += ((restart + i) % 2 == 0) ? delta : -delta;
    }
    nelder_mead_pass(eval, bounds, project(xb, bounds));
  }

  if (result.trace.empty() || !std::isfinite(result.best_objective)) {
    raise(ErrorKind::Infeasible, "tune: budget exhausted before any "
                                 "objective evaluation succeeded");
  }
  return result;
}

TuneResult tune(const TuneSpec& spec) {
  return minimize_nelder_mead(
      [&spec](const ParamTriple& p) { return objective(p, spec); },
      spec.bounds(), spec.start, spec.budget);
}

std::string trace_csv(const TuneResult& result) {
  std::string out = "iter,sigma,lambda1,lambda2,objective\n";
  for (const auto& e : result.trace) {
    out += std::to_string(e.iter) + "," + fmt_double(e.params.sigma) + "," +
           fmt_double(e.params.lambda1) + "," + fmt_double(e.params.lambda2) +
           "," + fmt_double(e.objective) + "\n";
  }
  return out;
}

}  // namespace stepbench
