#include "stepbench/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stepbench/errors.hpp"
#include "stepbench/integrator.hpp"
#include "stepbench/tuner.hpp"
#include "stepbench/workbench.hpp"

namespace stepbench {

namespace {

// "1e-3,1e-4,..." | "hi..lo" | "hi..lo:N". The range form without a count
// uses `per_decade` points per decade (1 = decades, 2 = half decades).
std::vector<double> parse_grid(const std::string& spec, int per_decade) {
  const auto fail = [&spec]() -> std::vector<double> {
    raise(ErrorKind::Structural, "malformed grid spec '" + spec +
                                     "' (use hi..lo, hi..lo:N or a comma "
                                     "list)");
  };
  const auto to_double = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      fail();
    }
    if (pos != s.size()) fail();
    return v;
  };

  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    std::string rest = spec.substr(dots + 2);
    int count = -1;
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
      count = std::atoi(rest.substr(colon + 1).c_str());
      rest = rest.substr(0, colon);
    }
    const double hi = to_double(spec.substr(0, dots));
    const double lo = to_double(rest);
    if (count < 0) {
      const double decades = std::log10(hi) - std::log10(lo);
      count = static_cast<int>(std::lround(per_decade * decades)) + 1;
    }
    return log_grid(hi, lo, count);
  }

  std::vector<double> values;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) values.push_back(to_double(item));
  if (values.empty()) fail();
  return values;
}

// "new:new-opt" or "standard:6.7,0.67,5.0"
ControllerConfig parse_combo(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    raise(ErrorKind::Structural,
          "expected <controller>:<param-set|sigma,lambda1,lambda2>, got '" +
              spec + "'");
  }
  const ControllerKind kind =
      controller_kind_from_string(spec.substr(0, colon));
  const std::string rest = spec.substr(colon + 1);
  if (rest.find(',') == std::string::npos) {
    return make_config(kind, named_param_set(rest));
  }
  const auto values = parse_grid(rest, 1);
  if (values.size() != 3) {
    raise(ErrorKind::Structural,
          "explicit parameters need exactly sigma,lambda1,lambda2");
  }
  return make_config(kind, {values[0], values[1], values[2]});
}

struct ParamFlags {
  std::string controller = "standard";
  std::string param_set;
  double sigma = -1.0, lambda1 = -1.0, lambda2 = -1.0;

  ControllerConfig resolve() const {
    const ControllerKind kind = controller_kind_from_string(controller);
    const bool has_explicit = sigma >= 0.0 || lambda1 >= 0.0 || lambda2 >= 0.0;
    if (!param_set.empty() && has_explicit) {
      raise(ErrorKind::Structural,
            "--params and --sigma/--lambda1/--lambda2 are mutually exclusive");
    }
    if (!param_set.empty()) return make_config(kind, named_param_set(param_set));
    if (sigma > 0.0 && lambda1 > 0.0 && lambda2 > 0.0) {
      return make_config(kind, {sigma, lambda1, lambda2});
    }
    raise(ErrorKind::Structural,
          "provide --params <new-opt|std-opt|std-rec> or all of "
          "--sigma --lambda1 --lambda2");
  }
};

void write_output(const std::string& payload, const std::string& path,
                  std::ostream& out) {
  if (path.empty()) {
    out << payload;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(ErrorKind::Io, "cannot open output file: " + path);
  f << payload;
}

std::vector<std::string> resolve_suite_arg(const std::string& arg,
                                           std::ostream& err) {
  std::string footnote;
  std::vector<std::string> ids;
  if (arg.find(',') != std::string::npos) {
    std::istringstream in(arg);
    std::string item;
    while (std::getline(in, item, ',')) {
      ids.push_back(get_problem(item).id);
    }
  } else {
    ids = resolve_suite(arg, &footnote);
  }
  if (!footnote.empty()) err << footnote << "\n";
  return ids;
}

int do_list(std::ostream& out) {
  const auto& g = groups();
  out << "id    dim  group  exact\n";
  for (const auto& id : all_problem_ids()) {
    const bool in_g1 =
        std::find(g.group1.begin(), g.group1.end(), id) != g.group1.end();
    std::string note;
    int dim = 0;
    bool exact = false;
    if (id == "C5" && !c5_available()) {
      dim = 30;
      note = "  (unavailable: data file missing or failed checksum)";
    } else {
      const OdeProblem& p = get_problem(id);
      dim = p.dim;
      exact = p.has_exact();
      if (id == "C5" && !c5_verified()) {
        note = "  (excluded from default suites: data unverified)";
      }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-5s %-4d %-6s %-5s", id.c_str(), dim,
                  in_g1 ? "I" : "II", exact ? "yes" : "no");
    out << buf << note << "\n";
  }
  out << "group1:";
  for (const auto& id : g.group1) out << " " << id;
  out << "\ngroup2:";
  for (const auto& id : g.group2) out << " " << id;
  out << "\n";
  return 0;
}

int do_integrate(const std::string& problem_id, const ParamFlags& flags,
                 double tau, const std::string& format,
                 const std::string& output, std::ostream& out) {
  const OdeProblem& problem = get_problem(problem_id);
  const ControllerConfig cfg = flags.resolve();
  const ControllerParams params = cfg.with_tau(tau);
  const IntegrationStats stats = integrate(problem, params);
  const double gerr = global_error(problem, stats);

  std::string payload;
  if (format == "table") {
    std::ostringstream os;
    os << "problem: " << problem.id << "\n"
       << "controller: " << cfg.label() << "\n"
       << "tau: " << fmt_double(tau) << "\n"
       << "n_accepted: " << stats.n_accepted << "\n"
       << "n_rejected: " << stats.n_rejected << "\n"
       << "n_fevals: " << stats.n_fevals << "\n"
       << "t_final: " << fmt_double(stats.t_final) << "\n"
       << "y_final:";
    for (double v : stats.y_final) os << " " << fmt_double(v);
    os << "\n"
       << "global_error: " << fmt_double(gerr) << "\n";
    payload = os.str();
  } else if (format == "csv") {
    payload =
        "problem,controller,tau,n_accepted,n_rejected,n_fevals,global_error\n" +
        problem.id + "," + cfg.label() + "," + fmt_double(tau) + "," +
        std::to_string(stats.n_accepted) + "," +
        std::to_string(stats.n_rejected) + "," +
        std::to_string(stats.n_fevals) + "," + fmt_double(gerr) + "\n";
  } else {
    nlohmann::json j;
    j["problem"] = problem.id;
    j["controller"] = cfg.label();
    j["tau"] = tau;
    j["n_accepted"] = stats.n_accepted;
    j["n_rejected"] = stats.n_rejected;
    j["n_fevals"] = stats.n_fevals;
    j["t_final"] = stats.t_final;
    j["y_final"] = stats.y_final;
    j["global_error"] = gerr;
    payload = j.dump(2) + "\n";
  }
  write_output(payload, output, out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Embedded Runge-Kutta step-size controller workbench"};
  app.require_subcommand(1);

  // list
  app.add_subcommand("list", "List the problems and groups");

  // integrate
  auto* integ = app.add_subcommand("integrate", "Run one adaptive integration");
  std::string problem_id, output, format = "table";
  double tau = 1e-6;
  ParamFlags flags;
  integ->add_option("--problem", problem_id, "Problem id (A1..E5)")
      ->required();
  integ->add_option("--controller", flags.controller, "new | standard");
  integ->add_option("--params", flags.param_set, "new-opt | std-opt | std-rec");
  integ->add_option("--sigma", flags.sigma, "Acceptance slack");
  integ->add_option("--lambda1", flags.lambda1, "Minimum step ratio");
  integ->add_option("--lambda2", flags.lambda2, "Maximum step ratio");
  integ->add_option("--tau", tau, "Tolerance")->required();
  integ->add_option("--format", format, "table | csv | json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  integ->add_option("-o,--output", output, "Write data to a file");

  // wp
  auto* wp = app.add_subcommand("wp", "Work-precision sweep, CSV output");
  std::string wp_suite, wp_grid_spec, wp_output;
  ParamFlags wp_flags;
  int wp_jobs = 1;
  wp->add_option("--suite", wp_suite,
                 "group1 | group2 | all | id | comma list")
      ->required();
  wp->add_option("--controller", wp_flags.controller, "new | standard");
  wp->add_option("--params", wp_flags.param_set, "Named parameter set");
  wp->add_option("--sigma", wp_flags.sigma, "Acceptance slack");
  wp->add_option("--lambda1", wp_flags.lambda1, "Minimum step ratio");
  wp->add_option("--lambda2", wp_flags.lambda2, "Maximum step ratio");
  wp->add_option("--tau-grid", wp_grid_spec,
                 "hi..lo[:N] or comma list (default 1e-2..1e-12:21)");
  wp->add_option("--jobs", wp_jobs, "Parallel sweep cells (0 = all cores)");
  wp->add_option("-o,--output", wp_output, "Write CSV to a file");

  // compare
  auto* cmp = app.add_subcommand(
      "compare", "Fixed-target feval comparison of two controllers");
  std::string cmp_suite, cmp_a, cmp_b, cmp_targets_spec, cmp_grid_spec;
  std::string cmp_format = "table", cmp_output;
  int cmp_jobs = 1;
  cmp->add_option("--suite", cmp_suite, "group1 | group2 | all | comma list")
      ->required();
  cmp->add_option("--a", cmp_a, "<controller>:<params>, e.g. new:new-opt")
      ->required();
  cmp->add_option("--b", cmp_b, "<controller>:<params>, e.g. standard:std-rec")
      ->required();
  cmp->add_option("--targets", cmp_targets_spec,
                  "hi..lo[:N] or comma list (default 1e-3..1e-8)");
  cmp->add_option("--tau-grid", cmp_grid_spec, "hi..lo[:N] or comma list");
  cmp->add_option("--format", cmp_format, "table | csv | json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  cmp->add_option("--jobs", cmp_jobs, "Parallel sweep cells (0 = all cores)");
  cmp->add_option("-o,--output", cmp_output, "Write data to a file");

  // tune
  auto* tn = app.add_subcommand("tune",
                                "Optimize (sigma, lambda1, lambda2)");
  std::string tn_kind = "standard", tn_suite, tn_targets_spec, tn_grid_spec;
  std::string tn_start_spec, tn_output;
  int tn_budget = 200, tn_jobs = 1;
  tn->add_option("--kind", tn_kind, "new | standard");
  tn->add_option("--suite", tn_suite, "Defaults to group1");
  tn->add_option("--targets", tn_targets_spec,
                 "Defaults to 1e-4..1e-7 decades");
  tn->add_option("--tau-grid", tn_grid_spec, "Defaults to 1e-2..1e-12:21");
  tn->add_option("--start", tn_start_spec,
                 "sigma,lambda1,lambda2 start point (default 1.2,0.5,2.0)");
  tn->add_option("--budget", tn_budget, "Max objective evaluations");
  tn->add_option("--jobs", tn_jobs, "Parallel sweep cells inside objective");
  tn->add_option("-o,--output", tn_output, "Write the trace CSV to a file");

  std::vector<const char*> argv;
  argv.push_back("stepbench");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
      out << app.help();
      return 0;
    } catch (const CLI::ParseError& e) {
      err << "usage error: " << e.what() << "\n";
      return 1;
    }

    if (app.got_subcommand("list")) return do_list(out);

    if (app.got_subcommand("integrate")) {
      return do_integrate(problem_id, flags, tau, format, output, out);
    }

    if (app.got_subcommand("wp")) {
      const auto ids = resolve_suite_arg(wp_suite, err);
      const ControllerConfig cfg = wp_flags.resolve();
      const auto grid = wp_grid_spec.empty() ? default_tau_grid()
                                             : parse_grid(wp_grid_spec, 2);
      std::vector<WorkPrecisionCurve> curves;
      for (const auto& id : ids) {
        curves.push_back(sweep(get_problem(id), cfg, grid, wp_jobs));
        for (const auto& gap : curves.back().gaps) {
          err << id << ": gap at tau=" << fmt_double(gap.tau) << " ("
              << gap.reason << ")\n";
        }
      }
      write_output(curves_csv(curves), wp_output, out);
      return 0;
    }

    if (app.got_subcommand("compare")) {
      const auto ids = resolve_suite_arg(cmp_suite, err);
      const ControllerConfig a = parse_combo(cmp_a);
      const ControllerConfig b = parse_combo(cmp_b);
      const auto targets = cmp_targets_spec.empty()
                               ? default_targets()
                               : parse_grid(cmp_targets_spec, 1);
      const auto grid = cmp_grid_spec.empty() ? default_tau_grid()
                                              : parse_grid(cmp_grid_spec, 2);
      const RatioTable table = compare(ids, a, b, targets, grid, cmp_jobs);
      std::string payload;
      if (cmp_format == "table") {
        payload = ratio_table_text(table);
      } else if (cmp_format == "csv") {
        payload = ratio_table_csv(table);
      } else {
        payload = ratio_table_json(table);
      }
      write_output(payload, cmp_output, out);
      return 0;
    }

    // tune
    TuneSpec spec;
    spec.kind = controller_kind_from_string(tn_kind);
    if (!tn_suite.empty()) spec.suite = resolve_suite_arg(tn_suite, err);
    if (!tn_targets_spec.empty()) spec.targets = parse_grid(tn_targets_spec, 1);
    if (!tn_grid_spec.empty()) spec.tau_grid = parse_grid(tn_grid_spec, 2);
    if (!tn_start_spec.empty()) {
      const auto v = parse_grid(tn_start_spec, 1);
      if (v.size() != 3) {
        raise(ErrorKind::Structural,
              "--start needs exactly sigma,lambda1,lambda2");
      }
      spec.start = {v[0], v[1], v[2]};
    }
    spec.budget = tn_budget;
    spec.jobs = tn_jobs;
    const TuneResult result = tune(spec);
    std::ostringstream os;
    os << "best_sigma: " << fmt_double(result.best_params.sigma) << "\n"
       << "best_lambda1: " << fmt_double(result.best_params.lambda1) << "\n"
       << "best_lambda2: " << fmt_double(result.best_params.lambda2) << "\n"
       << "best_objective: " << fmt_double(result.best_objective) << "\n"
       << "evaluations: " << result.trace.size() << "\n";
    if (tn_output.empty()) {
      out << os.str() << trace_csv(result);
    } else {
      out << os.str();
      write_output(trace_csv(result), tn_output, out);
    }
    return 0;
  } catch (const Error& e) {
    const bool usage = e.kind() == ErrorKind::UnknownId ||
                       e.kind() == ErrorKind::Structural;
    err << (usage ? "usage error: " : "error: ") << e.what() << "\n";
    return usage ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace stepbench
