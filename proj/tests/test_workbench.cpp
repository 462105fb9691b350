#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "stepbench/errors.hpp"
#include "stepbench/workbench.hpp"

using namespace stepbench;

namespace {

ControllerConfig cfg_new() {
  return make_config(ControllerKind::New, named_param_set("new-opt"));
}

ControllerConfig cfg_std() {
  return make_config(ControllerKind::Standard, named_param_set("std-rec"));
}

WorkPrecisionCurve two_point_curve() {
  WorkPrecisionCurve c;
  c.problem_id = "synthetic";
  c.controller = cfg_std();
  c.points = {{1e-3, 1e-4, 100, 16, 0}, {1e-5, 1e-6, 1000, 166, 0}};
  return c;
}

bool identical_points(const WorkPrecisionCurve& a,
                      const WorkPrecisionCurve& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const auto& p = a.points[i];
    const auto& q = b.points[i];
    if (p.tau != q.tau || p.global_error != q.global_error ||
        p.n_fevals != q.n_fevals || p.n_accepted != q.n_accepted ||
        p.n_rejected != q.n_rejected) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("workbench") {

TEST_CASE("grids") {
  const auto grid = default_tau_grid();
  REQUIRE(grid.size() == 21);
  CHECK(grid.front() == doctest::Approx(1e-2).epsilon(1e-12));
  CHECK(grid.back() == doctest::Approx(1e-12).epsilon(1e-12));
  const auto targets = default_targets();
  REQUIRE(targets.size() == 6);
  CHECK(targets[0] == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(targets[5] == doctest::Approx(1e-8).epsilon(1e-12));
  CHECK_THROWS_AS(log_grid(1e-3, 1e-2, 5), Error);
}

TEST_CASE("log-log interpolation on a synthetic curve") {
  const WorkPrecisionCurve c = two_point_curve();
  CHECK(fevals_at(c, 1e-5) ==
        doctest::Approx(std::pow(10.0, 2.5)).epsilon(1e-12));
  CHECK(fevals_at(c, 1e-4) == 100.0);
  CHECK(fevals_at(c, 1e-6) == 1000.0);
  CHECK_THROWS_AS(fevals_at(c, 1e-9), Error);
  try {
    fevals_at(c, 1e-9);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnbracketedTarget);
  }
}

TEST_CASE("envelope filtering drops dominated points") {
  WorkPrecisionCurve c = two_point_curve();
  // Dominated: same error as the first point but more work.
  c.points.push_back({5e-4, 1e-4, 400, 66, 0});
  // Dominated in both coordinates.
  c.points.push_back({2e-4, 5e-5, 2000, 333, 0});
  CHECK(fevals_at(c, 1e-4) == 100.0);
  CHECK(fevals_at(c, 1e-5) ==
        doctest::Approx(std::pow(10.0, 2.5)).epsilon(1e-12));
}

TEST_CASE("fevals_at is nonincreasing in the target error") {
  const auto curve = sweep(get_problem("A3"), cfg_std(), default_tau_grid());
  double prev = 0.0;  // tightening the target can only add work
  bool any = false;
  for (double target = 1e-3; target >= 1e-8; target /= 2.0) {
    try {
      const double f = fevals_at(curve, target);
      CHECK(f >= prev);
      prev = f;
      any = true;
    } catch (const Error&) {
      // unbracketed edges are fine
    }
  }
  CHECK(any);
}

TEST_CASE("sweep on A1 with half-decade grid") {
  const auto grid = log_grid(1e-3, 1e-11, 17);
  const auto curve = sweep(get_problem("A1"), cfg_std(), grid);
  CHECK(curve.points.size() + curve.gaps.size() == 17);
  CHECK(curve.points.size() == 17);  // every run succeeds on A1

  // tau descending; global error broadly nonincreasing (<= 2 inversions).
  int inversions = 0;
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    CHECK(curve.points[i].tau > curve.points[i + 1].tau);
    if (curve.points[i + 1].global_error > curve.points[i].global_error) {
      ++inversions;
    }
  }
  CHECK(inversions <= 2);
  for (const auto& p : curve.points) {
    CHECK(p.global_error > 0.0);
    CHECK(p.n_fevals >= 7);
  }
}

TEST_CASE("single-point sweep interpolates only at its node") {
  const auto curve = sweep(get_problem("A1"), cfg_new(), {1e-6});
  REQUIRE(curve.points.size() == 1);
  CHECK(fevals_at(curve, curve.points[0].global_error) ==
        static_cast<double>(curve.points[0].n_fevals));
  CHECK_THROWS_AS(fevals_at(curve, curve.points[0].global_error * 0.5), Error);
}

TEST_CASE("sweep grid validation") {
  const OdeProblem& a1 = get_problem("A1");
  CHECK_THROWS_AS(sweep(a1, cfg_new(), {}), Error);
  CHECK_THROWS_AS(sweep(a1, cfg_new(), {1e-4, 1e-3}), Error);
  CHECK_THROWS_AS(sweep(a1, cfg_new(), {1e-4, -1e-6}), Error);
}

TEST_CASE("sweep determinism and serial/parallel equivalence") {
  const auto grid = log_grid(1e-3, 1e-9, 7);
  const OdeProblem& b4 = get_problem("B4");
  const auto c1 = sweep(b4, cfg_new(), grid);
  const auto c2 = sweep(b4, cfg_new(), grid);
  CHECK(identical_points(c1, c2));

  const auto c_par = sweep(b4, cfg_new(), grid, 3);
  CHECK(identical_points(c1, c_par));
  const auto c_auto = sweep(b4, cfg_new(), grid, 0);
  CHECK(identical_points(c1, c_auto));
}

TEST_CASE("run_cells parallel kernel matches the serial reference") {
  std::vector<SweepCell> cells;
  for (const char* id : {"A2", "B1", "E3"}) {
    for (double tau : log_grid(1e-3, 1e-9, 5)) {
      cells.push_back({id, cfg_new(), tau});
      cells.push_back({id, cfg_std(), tau});
    }
  }
  const auto serial = run_cells_serial(cells);
  const auto parallel = run_cells(cells, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].ok == parallel[i].ok);
    if (!serial[i].ok) continue;
    CHECK(serial[i].point.global_error == parallel[i].point.global_error);
    CHECK(serial[i].point.n_fevals == parallel[i].point.n_fevals);
  }
}

TEST_CASE("self-comparison gives unit ratios and zero wins") {
  const auto grid = log_grid(1e-3, 1e-9, 7);
  const RatioTable t = compare({"A1", "B5"}, cfg_new(), cfg_new(),
                               {1e-4, 1e-6}, grid);
  for (const auto& cell : t.cells) {
    if (cell.defined) CHECK(cell.ratio() == 1.0);
  }
  for (const auto& row : t.rows) {
    if (row.defined_cells > 0) CHECK(row.mean_ratio == 1.0);
  }
  CHECK(t.win_fraction == 0.0);
}

TEST_CASE("swapping the controllers swaps the cells exactly") {
  const auto grid = log_grid(1e-3, 1e-9, 7);
  const std::vector<std::string> suite = {"A2", "E3"};
  const std::vector<double> targets = {1e-4, 1e-6};
  const RatioTable ab = compare(suite, cfg_new(), cfg_std(), targets, grid);
  const RatioTable ba = compare(suite, cfg_std(), cfg_new(), targets, grid);
  REQUIRE(ab.cells.size() == ba.cells.size());
  for (std::size_t i = 0; i < ab.cells.size(); ++i) {
    CHECK(ab.cells[i].defined == ba.cells[i].defined);
    if (!ab.cells[i].defined) continue;
    CHECK(ab.cells[i].fevals_a == ba.cells[i].fevals_b);
    CHECK(ab.cells[i].fevals_b == ba.cells[i].fevals_a);
    CHECK(ab.cells[i].ratio() * ba.cells[i].ratio() ==
          doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("mean ratio matches an independent recomputation") {
  const auto grid = log_grid(1e-3, 1e-10, 8);
  const std::vector<std::string> suite = {"A1", "A3", "B5"};
  const std::vector<double> targets = {1e-4, 1e-5, 1e-6};
  const RatioTable t = compare(suite, cfg_new(), cfg_std(), targets, grid);
  for (std::size_t r = 0; r < targets.size(); ++r) {
    double sum = 0.0;
    int n = 0;
    for (const auto& cell : t.cells) {
      if (cell.target == targets[r] && cell.defined) {
        sum += cell.fevals_a / cell.fevals_b;
        ++n;
      }
    }
    if (n > 0) {
      CHECK(t.rows[r].mean_ratio ==
            doctest::Approx(sum / n).epsilon(1e-12));
      CHECK(t.rows[r].defined_cells == n);
    }
  }
}

TEST_CASE("curve CSV uses the pinned header") {
  const auto grid = log_grid(1e-4, 1e-6, 2);
  const auto curve = sweep(get_problem("A1"), cfg_std(), grid);
  const std::string csv = curve_csv(curve);
  CHECK(csv.rfind(
            "problem,controller,tau,global_error,n_fevals,n_accepted,"
            "n_rejected\n",
            0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 points
  CHECK(csv.find("A1,standard(") != std::string::npos);
}

TEST_CASE("ratio table round-trips through CSV and JSON") {
  const auto grid = log_grid(1e-3, 1e-9, 7);
  const RatioTable t =
      compare({"A1", "E3"}, cfg_new(), cfg_std(), {1e-4, 1e-6, 1e-12}, grid);
  CHECK(t.excluded_cells > 0);  // the 1e-12 row cannot be bracketed

  const std::string csv = ratio_table_csv(t);
  const RatioTable t_csv = ratio_table_from_csv(csv);
  CHECK(ratio_table_csv(t_csv) == csv);

  const std::string json = ratio_table_json(t);
  const RatioTable t_json = ratio_table_from_json(json);
  CHECK(ratio_table_json(t_json) == json);
  CHECK(ratio_table_csv(t_json) == csv);

  CHECK_THROWS_AS(ratio_table_from_csv("not,a,table\n"), Error);
}

TEST_CASE("compare output is deterministic") {
  const auto grid = log_grid(1e-3, 1e-9, 7);
  const RatioTable t1 =
      compare({"A2", "B3"}, cfg_new(), cfg_std(), {1e-4, 1e-6}, grid, 2);
  const RatioTable t2 =
      compare({"A2", "B3"}, cfg_new(), cfg_std(), {1e-4, 1e-6}, grid, 1);
  CHECK(ratio_table_csv(t1) == ratio_table_csv(t2));
}

}  // TEST_SUITE
