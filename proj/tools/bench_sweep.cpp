// Compares the serial reference cell runner against the OpenMP kernel on a
// full two-controller sweep workload and checks that both produce identical
// results.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stepbench/workbench.hpp"

using namespace stepbench;

namespace {

std::vector<SweepCell> workload() {
  std::vector<SweepCell> cells;
  const auto grid = default_tau_grid();
  const ControllerConfig cfgs[] = {
      make_config(ControllerKind::New, named_param_set("new-opt")),
      make_config(ControllerKind::Standard, named_param_set("std-rec")),
  };
  for (const auto& id : resolve_suite("all")) {
    for (const auto& cfg : cfgs) {
      for (double tau : grid) cells.push_back({id, cfg, tau});
    }
  }
  return cells;
}

template <typename F>
double time_ms(F&& f, std::vector<CellResult>& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

bool identical(const std::vector<CellResult>& a,
               const std::vector<CellResult>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].ok != b[i].ok) return false;
    if (!a[i].ok) continue;
    const CurvePoint& p = a[i].point;
    const CurvePoint& q = b[i].point;
    if (p.tau != q.tau || p.global_error != q.global_error ||
        p.n_fevals != q.n_fevals || p.n_accepted != q.n_accepted ||
        p.n_rejected != q.n_rejected) {
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  const auto cells = workload();
  std::printf("workload: %zu cells\n", cells.size());

  std::vector<CellResult> serial;
  // Warm the reference cache outside the timed runs.
  run_cells_serial(cells);
  const double t_serial = time_ms([&] { return run_cells_serial(cells); },
                                  serial);
  std::printf("%-18s %9.1f ms\n", "serial reference", t_serial);

  int max_jobs = 1;
#ifdef _OPENMP
  max_jobs = omp_get_max_threads();
#endif
  bool all_match = true;
  for (int jobs = 2; jobs <= max_jobs * 2; jobs *= 2) {
    std::vector<CellResult> parallel;
    const double t_par =
        time_ms([&] { return run_cells(cells, jobs); }, parallel);
    const bool match = identical(serial, parallel);
    all_match = all_match && match;
    std::printf("openmp jobs=%-5d %9.1f ms   speedup %.2fx   results %s\n",
                jobs, t_par, t_serial / t_par,
                match ? "identical" : "DIFFER");
  }
  if (max_jobs == 1) {
    std::vector<CellResult> parallel;
    const double t_par =
        time_ms([&] { return run_cells(cells, 0); }, parallel);
    const bool match = identical(serial, parallel);
    all_match = all_match && match;
    std::printf("openmp jobs=auto  %9.1f ms   speedup %.2fx   results %s\n",
                t_par, t_serial / t_par, match ? "identical" : "DIFFER");
  }
  return all_match ? 0 : 1;
}
