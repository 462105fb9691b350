#include "stepbench/workbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stepbench/errors.hpp"
#include "stepbench/integrator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stepbench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CellResult run_one_cell(const SweepCell& cell) {
  CellResult res;
  try {
    const OdeProblem& problem = get_problem(cell.problem_id);
    const ControllerParams params = cell.controller.with_tau(cell.tau);
    const IntegrationStats stats = integrate(problem, params);
    res.point = {cell.tau, global_error(problem, stats), stats.n_fevals,
                 stats.n_accepted, stats.n_rejected};
    res.ok = true;
  } catch (const Error& e) {
    res.fail_reason = e.what();
  }
  return res;
}

void prime_references(const std::vector<SweepCell>& cells) {
  std::set<std::string> ids;
  for (const auto& c : cells) ids.insert(c.problem_id);
  for (const auto& id : ids) {
    get_problem(id);  // validates the id up front
    reference_endpoint(id);
  }
}

}  // namespace

std::vector<CellResult> run_cells_serial(const std::vector<SweepCell>& cells) {
  prime_references(cells);
  std::vector<CellResult> results(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    results[i] = run_one_cell(cells[i]);
  }
  return results;
}

std::vector<CellResult> run_cells(const std::vector<SweepCell>& cells,
                                  int jobs) {
  if (jobs == 1) return run_cells_serial(cells);
  prime_references(cells);
  std::vector<CellResult> results(cells.size());
#ifdef _OPENMP
  const int n = static_cast<int>(cells.size());
  if (jobs > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (int i = 0; i < n; ++i) results[i] = run_one_cell(cells[i]);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) results[i] = run_one_cell(cells[i]);
  }
#else
  for (std::size_t i = 0; i < cells.size(); ++i) {
    results[i] = run_one_cell(cells[i]);
  }
#endif
  return results;
}

std::vector<double> default_tau_grid() { return log_grid(1e-2, 1e-12, 21); }

std::vector<double> default_targets() { return log_grid(1e-3, 1e-8, 6); }

std::vector<double> log_grid(double hi, double lo, int n) {
  if (!(hi > 0.0) || !(lo > 0.0) || hi <= lo || n < 1) {
    raise(ErrorKind::Structural, "log_grid requires hi > lo > 0 and n >= 1");
  }
  std::vector<double> g(static_cast<std::size_t>(n));
  if (n == 1) {
    g[0] = hi;
    return g;
  }
  const double e0 = std::log10(hi);
  const double e1 = std::log10(lo);
  for (int i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] =
        std::pow(10.0, e0 + (e1 - e0) * static_cast<double>(i) /
                                static_cast<double>(n - 1));
  }
  return g;
}

WorkPrecisionCurve sweep(const OdeProblem& problem,
                         const ControllerConfig& controller,
                         const std::vector<double>& tau_grid, int jobs) {
  if (tau_grid.empty()) {
    raise(ErrorKind::Structural, "sweep: empty tau grid");
  }
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    if (!(tau_grid[i] > 0.0)) {
      raise(ErrorKind::Structural, "sweep: tau grid must be positive");
    }
    if (i > 0 && tau_grid[i] >= tau_grid[i - 1]) {
      raise(ErrorKind::Structural, "sweep: tau grid must be descending");
    }
  }

  std::vector<SweepCell> cells;
  cells.reserve(tau_grid.size());
  for (double tau : tau_grid) cells.push_back({problem.id, controller, tau});
  const std::vector<CellResult> results = run_cells(cells, jobs);

  WorkPrecisionCurve curve;
  curve.problem_id = problem.id;
  curve.controller = controller;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].ok) {
      curve.points.push_back(results[i].point);
    } else {
      curve.gaps.push_back({tau_grid[i], results[i].fail_reason});
    }
  }
  if (curve.points.empty()) {
    raise(ErrorKind::EmptyCurve,
          problem.id + ": every run in the sweep failed");
  }
  return curve;
}

double fevals_at(const WorkPrecisionCurve& curve, double target) {
  if (!(target > 0.0)) {
    raise(ErrorKind::UnbracketedTarget, "target must be positive");
  }
  // Lower-left Pareto envelope: sorted by global error ascending, keep points
  // that strictly improve on every cheaper error level.
  struct Node {
    double g, f;
  };
  std::vector<Node> pts;
  pts.reserve(curve.points.size());
  for (const auto& p : curve.points) {
    if (p.global_error > 0.0) {
      pts.push_back({p.global_error, static_cast<double>(p.n_fevals)});
    }
  }
  std::sort(pts.begin(), pts.end(), [](const Node& a, const Node& b) {
    return a.g != b.g ? a.g < b.g : a.f < b.f;
  });
  std::vector<Node> env;
  double min_f = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    if (p.f < min_f) {
      env.push_back(p);
      min_f = p.f;
    }
  }

  if (env.empty() || target < env.front().g || target > env.back().g) {
    std::ostringstream os;
    os << curve.problem_id << ": target " << target
       << " not bracketed by the curve envelope";
    if (!env.empty()) {
      os << " [" << env.front().g << ", " << env.back().g << "]";
    }
    raise(ErrorKind::UnbracketedTarget, os.str());
  }
  for (const auto& p : env) {
    if (p.g == target) return p.f;
  }
  auto hi = std::lower_bound(
      env.begin(), env.end(), target,
      [](const Node& n, double t) { return n.g < t; });
  const Node& b = *hi;
  const Node& a = *(hi - 1);
  const double w = (std::log(target) - std::log(a.g)) /
                   (std::log(b.g) - std::log(a.g));
  return std::exp(std::log(a.f) + w * (std::log(b.f) - std::log(a.f)));
}

RatioTable compare(const std::vector<std::string>& suite,
                   const ControllerConfig& a, const ControllerConfig& b,
                   const std::vector<double>& targets,
                   const std::vector<double>& tau_grid, int jobs) {
  if (suite.empty()) raise(ErrorKind::Structural, "compare: empty suite");

  // One flat cell list over (problem x controller x tau): a single parallel
  // region covers the whole comparison.
  std::vector<SweepCell> cells;
  cells.reserve(suite.size() * 2 * tau_grid.size());
  for (const auto& id : suite) {
    for (const ControllerConfig* cfg : {&a, &b}) {
      for (double tau : tau_grid) cells.push_back({id, *cfg, tau});
    }
  }
  const std::vector<CellResult> results = run_cells(cells, jobs);

  const std::size_t stride = tau_grid.size();
  const auto curve_of = [&](std::size_t problem_idx,
                            int which) -> WorkPrecisionCurve {
    WorkPrecisionCurve c;
    c.problem_id = suite[problem_idx];
    c.controller = which == 0 ? a : b;
    const std::size_t base =
        problem_idx * 2 * stride + static_cast<std::size_t>(which) * stride;
    for (std::size_t k = 0; k < stride; ++k) {
      const CellResult& r = results[base + k];
      if (r.ok) {
        c.points.push_back(r.point);
      } else {
        c.gaps.push_back({tau_grid[k], r.fail_reason});
      }
    }
    return c;
  };

  std::vector<WorkPrecisionCurve> curves_a, curves_b;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    curves_a.push_back(curve_of(i, 0));
    curves_b.push_back(curve_of(i, 1));
  }

  RatioTable table;
  table.suite = suite;
  table.controller_a = a;
  table.controller_b = b;
  table.targets = targets;

  int wins = 0;
  for (double target : targets) {
    RatioRow row;
    row.target = target;
    double ratio_sum = 0.0;
    for (std::size_t i = 0; i < suite.size(); ++i) {
      RatioCell cell;
      cell.problem = suite[i];
      cell.target = target;
      try {
        cell.fevals_a = fevals_at(curves_a[i], target);
        cell.fevals_b = fevals_at(curves_b[i], target);
        cell.defined = true;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::UnbracketedTarget &&
            e.kind() != ErrorKind::EmptyCurve) {
          throw;
        }
        cell.fevals_a = kNaN;
        cell.fevals_b = kNaN;
        cell.defined = false;
      }
      if (cell.defined) {
        ++row.defined_cells;
        ratio_sum += cell.ratio();
        if (cell.fevals_a < cell.fevals_b) ++wins;
      } else {
        ++row.excluded_cells;
      }
      table.cells.push_back(cell);
    }
    row.mean_ratio = row.defined_cells > 0
                         ? ratio_sum / static_cast<double>(row.defined_cells)
                         : kNaN;
    table.defined_cells += row.defined_cells;
    table.excluded_cells += row.excluded_cells;
    table.rows.push_back(row);
  }
  table.win_fraction =
      table.defined_cells > 0
          ? static_cast<double>(wins) / static_cast<double>(table.defined_cells)
          : 0.0;
  return table;
}

double grand_mean_ratio(const RatioTable& table) {
  double sum = 0.0;
  int n = 0;
  for (const auto& row : table.rows) {
    if (row.defined_cells > 0) {
      sum += row.mean_ratio;
      ++n;
    }
  }
  return n > 0 ? sum / static_cast<double>(n) : kNaN;
}

// ---- export / import --------------------------------------------------------

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

const char* kCurveHeader =
    "problem,controller,tau,global_error,n_fevals,n_accepted,n_rejected\n";

void append_curve_rows(std::string& out, const WorkPrecisionCurve& c) {
  for (const auto& p : c.points) {
    out += c.problem_id;
    out += ',';
    out += c.controller.label();
    out += ',';
    out += fmt_double(p.tau);
    out += ',';
    out += fmt_double(p.global_error);
    out += ',';
    out += std::to_string(p.n_fevals);
    out += ',';
    out += std::to_string(p.n_accepted);
    out += ',';
    out += std::to_string(p.n_rejected);
    out += '\n';
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

ControllerConfig parse_config_label(const std::string& label) {
  // "<kind>(sigma=<v> lambda1=<v> lambda2=<v>)"
  ControllerConfig cfg;
  const auto paren = label.find('(');
  if (paren == std::string::npos || label.back() != ')') {
    raise(ErrorKind::Io, "malformed controller label: " + label);
  }
  cfg.kind = controller_kind_from_string(label.substr(0, paren));
  std::istringstream body(label.substr(paren + 1, label.size() - paren - 2));
  std::string item;
  while (body >> item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      raise(ErrorKind::Io, "malformed controller label: " + label);
    }
    const std::string key = item.substr(0, eq);
    const double value = std::strtod(item.c_str() + eq + 1, nullptr);
    if (key == "sigma") {
      cfg.sigma = value;
    } else if (key == "lambda1") {
      cfg.lambda1 = value;
    } else if (key == "lambda2") {
      cfg.lambda2 = value;
    } else {
      raise(ErrorKind::Io, "unknown controller field: " + key);
    }
  }
  return cfg;
}

}  // namespace

std::string curve_csv(const WorkPrecisionCurve& curve) {
  std::string out = kCurveHeader;
  append_curve_rows(out, curve);
  return out;
}

std::string curves_csv(const std::vector<WorkPrecisionCurve>& curves) {
  std::string out = kCurveHeader;
  for (const auto& c : curves) append_curve_rows(out, c);
  return out;
}

std::string ratio_table_csv(const RatioTable& t) {
  std::string out = "table,ratio-table,v1\n";
  out += "controller_a," + t.controller_a.label() + "\n";
  out += "controller_b," + t.controller_b.label() + "\n";
  out += "suite";
  for (const auto& id : t.suite) out += "," + id;
  out += "\n";
  for (const auto& c : t.cells) {
    out += "cell," + c.problem + "," + fmt_double(c.target) + "," +
           fmt_double(c.fevals_a) + "," + fmt_double(c.fevals_b) + "," +
           (c.defined ? "1" : "0") + "\n";
  }
  for (const auto& r : t.rows) {
    out += "row," + fmt_double(r.target) + "," + fmt_double(r.mean_ratio) +
           "," + std::to_string(r.defined_cells) + "," +
           std::to_string(r.excluded_cells) + "\n";
  }
  out += "summary,win_fraction," + fmt_double(t.win_fraction) + "\n";
  out += "summary,defined_cells," + std::to_string(t.defined_cells) + "\n";
  out += "summary,excluded_cells," + std::to_string(t.excluded_cells) + "\n";
  return out;
}

RatioTable ratio_table_from_csv(const std::string& text) {
  RatioTable t;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f[0] == "table") {
      if (f.size() != 3 || f[1] != "ratio-table" || f[2] != "v1") {
        raise(ErrorKind::Io, "not a ratio-table v1 CSV");
      }
      header_seen = true;
    } else if (f[0] == "controller_a" && f.size() == 2) {
      t.controller_a = parse_config_label(f[1]);
    } else if (f[0] == "controller_b" && f.size() == 2) {
      t.controller_b = parse_config_label(f[1]);
    } else if (f[0] == "suite") {
      t.suite.assign(f.begin() + 1, f.end());
    } else if (f[0] == "cell" && f.size() == 6) {
      RatioCell c;
      c.problem = f[1];
      c.target = std::strtod(f[2].c_str(), nullptr);
      c.fevals_a = std::strtod(f[3].c_str(), nullptr);
      c.fevals_b = std::strtod(f[4].c_str(), nullptr);
      c.defined = f[5] == "1";
      t.cells.push_back(c);
    } else if (f[0] == "row" && f.size() == 5) {
      RatioRow r;
      r.target = std::strtod(f[1].c_str(), nullptr);
      r.mean_ratio = std::strtod(f[2].c_str(), nullptr);
      r.defined_cells = std::atoi(f[3].c_str());
      r.excluded_cells = std::atoi(f[4].c_str());
      t.targets.push_back(r.target);
      t.rows.push_back(r);
    } else if (f[0] == "summary" && f.size() == 3) {
      if (f[1] == "win_fraction") {
        t.win_fraction = std::strtod(f[2].c_str(), nullptr);
      } else if (f[1] == "defined_cells") {
        t.defined_cells = std::atoi(f[2].c_str());
      } else if (f[1] == "excluded_cells") {
        t.excluded_cells = std::atoi(f[2].c_str());
      }
    } else {
      raise(ErrorKind::Io, "unrecognized ratio-table CSV line: " + line);
    }
  }
  if (!header_seen) raise(ErrorKind::Io, "missing ratio-table CSV header");
  return t;
}

namespace {

nlohmann::json config_json(const ControllerConfig& c) {
  return {{"kind", to_string(c.kind)},
          {"sigma", c.sigma},
          {"lambda1", c.lambda1},
          {"lambda2", c.lambda2},
          {"order", c.order}};
}

ControllerConfig config_from_json(const nlohmann::json& j) {
  ControllerConfig c;
  c.kind = controller_kind_from_string(j.at("kind").get<std::string>());
  c.sigma = j.at("sigma").get<double>();
  c.lambda1 = j.at("lambda1").get<double>();
  c.lambda2 = j.at("lambda2").get<double>();
  c.order = j.at("order").get<int>();
  return c;
}

}  // namespace

std::string ratio_table_json(const RatioTable& t) {
  nlohmann::json j;
  j["type"] = "ratio-table";
  j["controller_a"] = config_json(t.controller_a);
  j["controller_b"] = config_json(t.controller_b);
  j["suite"] = t.suite;
  j["targets"] = t.targets;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : t.cells) {
    nlohmann::json jc = {{"problem", c.problem},
                         {"target", c.target},
                         {"defined", c.defined}};
    if (c.defined) {
      jc["fevals_a"] = c.fevals_a;
      jc["fevals_b"] = c.fevals_b;
    }
    j["cells"].push_back(jc);
  }
  j["rows"] = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json jr = {{"target", r.target},
                         {"defined_cells", r.defined_cells},
                         {"excluded_cells", r.excluded_cells}};
    if (r.defined_cells > 0) jr["mean_ratio"] = r.mean_ratio;
    j["rows"].push_back(jr);
  }
  j["win_fraction"] = t.win_fraction;
  j["defined_cells"] = t.defined_cells;
  j["excluded_cells"] = t.excluded_cells;
  return j.dump(2) + "\n";
}

RatioTable ratio_table_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  RatioTable t;
  t.controller_a = config_from_json(j.at("controller_a"));
  t.controller_b = config_from_json(j.at("controller_b"));
  t.suite = j.at("suite").get<std::vector<std::string>>();
  t.targets = j.at("targets").get<std::vector<double>>();
  for (const auto& jc : j.at("cells")) {
    RatioCell c;
    c.problem = jc.at("problem").get<std::string>();
    c.target = jc.at("target").get<double>();
    c.defined = jc.at("defined").get<bool>();
    c.fevals_a = c.defined ? jc.at("fevals_a").get<double>() : kNaN;
    c.fevals_b = c.defined ? jc.at("fevals_b").get<double>() : kNaN;
    t.cells.push_back(c);
  }
  for (const auto& jr : j.at("rows")) {
    RatioRow r;
    r.target = jr.at("target").get<double>();
    r.defined_cells = jr.at("defined_cells").get<int>();
    r.excluded_cells = jr.at("excluded_cells").get<int>();
    r.mean_ratio =
        r.defined_cells > 0 ? jr.at("mean_ratio").get<double>() : kNaN;
    t.rows.push_back(r);
  }
  t.win_fraction = j.at("win_fraction").get<double>();
  t.defined_cells = j.at("defined_cells").get<int>();
  t.excluded_cells = j.at("excluded_cells").get<int>();
  return t;
}

std::string ratio_table_text(const RatioTable& t) {
  std::ostringstream os;
  os << "Expected        Mean ratio of function evaluations\n";
  os << "global error    " << t.controller_a.label() << " / "
     << t.controller_b.label() << "\n";
  char buf[128];
  for (const auto& r : t.rows) {
    if (r.defined_cells > 0) {
      std::snprintf(buf, sizeof(buf), "%-15.0e %.4f  (%d cells, %d excluded)\n",
                    r.target, r.mean_ratio, r.defined_cells, r.excluded_cells);
    } else {
      std::snprintf(buf, sizeof(buf), "%-15.0e n/a     (0 cells, %d excluded)\n",
                    r.target, r.excluded_cells);
    }
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "grand mean      %.4f\n",
                grand_mean_ratio(t));
  os << buf;
  std::snprintf(buf, sizeof(buf),
                "win fraction    %.4f  (%d defined cells, %d excluded)\n",
                t.win_fraction, t.defined_cells, t.excluded_cells);
  os << buf;
  return os.str();
}

}  // namespace stepbench
