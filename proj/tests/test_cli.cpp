#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stepbench/cli.hpp"
#include "stepbench/workbench.hpp"

using namespace stepbench;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("list prints the registry and groups") {
  const CliRun r = run({"list"});
  CHECK(r.code == 0);
  CHECK(r.out.find("A1") != std::string::npos);
  CHECK(r.out.find("group1:") != std::string::npos);
  CHECK(r.out.find("group2:") != std::string::npos);
  CHECK(r.out.find("C5") != std::string::npos);
}

TEST_CASE("integrate happy path") {
  const CliRun r = run({"integrate", "--problem", "A1", "--controller", "new",
                        "--params", "new-opt", "--tau", "1e-6"});
  CHECK(r.code == 0);
  CHECK(r.out.find("n_fevals:") != std::string::npos);
  CHECK(r.out.find("n_accepted:") != std::string::npos);
  CHECK(r.out.find("n_rejected:") != std::string::npos);
  CHECK(r.out.find("global_error:") != std::string::npos);
}

TEST_CASE("unknown problem id is a usage error listing the valid set") {
  const CliRun r = run({"integrate", "--problem", "Z9", "--controller", "new",
                        "--params", "new-opt", "--tau", "1e-6"});
  CHECK(r.code == 1);
  CHECK(r.err.find("A1") != std::string::npos);
  CHECK(r.err.find("E5") != std::string::npos);
}

TEST_CASE("param-set and explicit parameters are mutually exclusive") {
  const CliRun r = run({"integrate", "--problem", "A1", "--controller", "new",
                        "--params", "new-opt", "--sigma", "2.0", "--tau",
                        "1e-6"});
  CHECK(r.code == 1);

  const CliRun miss = run({"integrate", "--problem", "A1", "--controller",
                           "new", "--tau", "1e-6"});
  CHECK(miss.code == 1);

  const CliRun expl = run({"integrate", "--problem", "A1", "--controller",
                           "new", "--sigma", "6.7", "--lambda1", "0.67",
                           "--lambda2", "5.0", "--tau", "1e-6"});
  CHECK(expl.code == 0);
}

TEST_CASE("identical argv yields byte-identical output") {
  const std::vector<std::string> args = {
      "wp", "--suite", "A3", "--controller", "standard",
      "--params", "std-rec", "--tau-grid", "1e-3..1e-9:7"};
  const CliRun r1 = run(args);
  const CliRun r2 = run(args);
  CHECK(r1.code == 0);
  CHECK(r1.out == r2.out);
  CHECK(r1.out.rfind("problem,controller,tau,global_error,n_fevals,"
                     "n_accepted,n_rejected\n",
                     0) == 0);
}

TEST_CASE("wp on group1 notes the C5 exclusion on the error stream") {
  const CliRun r = run({"wp", "--suite", "group1", "--controller", "new",
                        "--params", "new-opt", "--tau-grid", "1e-4,1e-5"});
  CHECK(r.code == 0);
  CHECK(r.err.find("C5") != std::string::npos);
}

TEST_CASE("compare output round-trips losslessly") {
  const std::vector<std::string> base = {
      "compare", "--suite",  "A2,E3",       "--a",
      "new:new-opt",         "--b",         "standard:std-rec",
      "--targets", "1e-4,1e-6", "--tau-grid", "1e-3..1e-9:7"};

  std::vector<std::string> csv_args = base;
  csv_args.push_back("--format");
  csv_args.push_back("csv");
  const CliRun rc = run(csv_args);
  CHECK(rc.code == 0);
  const RatioTable from_csv = ratio_table_from_csv(rc.out);
  CHECK(ratio_table_csv(from_csv) == rc.out);

  std::vector<std::string> json_args = base;
  json_args.push_back("--format");
  json_args.push_back("json");
  const CliRun rj = run(json_args);
  CHECK(rj.code == 0);
  const RatioTable from_json = ratio_table_from_json(rj.out);
  CHECK(ratio_table_json(from_json) == rj.out);
  CHECK(ratio_table_csv(from_json) == rc.out);
}

TEST_CASE("compare table format reports rows and the win fraction") {
  const CliRun r = run({"compare", "--suite", "A1", "--a", "new:new-opt",
                        "--b", "standard:std-rec", "--targets", "1e-4..1e-6",
                        "--tau-grid", "1e-3..1e-9:7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("win fraction") != std::string::npos);
  CHECK(r.out.find("grand mean") != std::string::npos);
}

TEST_CASE("explicit controller param combos parse") {
  const CliRun r = run({"compare", "--suite", "A1", "--a",
                        "new:6.7,0.67,5.0", "--b", "standard:1.2,0.5,2.0",
                        "--targets", "1e-4,1e-5", "--tau-grid",
                        "1e-3..1e-8:6"});
  CHECK(r.code == 0);

  const CliRun bad = run({"compare", "--suite", "A1", "--a", "new-opt", "--b",
                          "standard:std-rec"});
  CHECK(bad.code == 1);
}

TEST_CASE("malformed grid specs are usage errors") {
  const CliRun r = run({"wp", "--suite", "A1", "--controller", "new",
                        "--params", "new-opt", "--tau-grid", "abc"});
  CHECK(r.code == 1);
}

TEST_CASE("output file writing") {
  namespace fs = std::filesystem;
  const fs::path tmp = fs::temp_directory_path() / "stepbench_cli_out.csv";
  const CliRun r = run({"wp", "--suite", "A1", "--controller", "standard",
                        "--params", "std-rec", "--tau-grid", "1e-4,1e-6",
                        "-o", tmp.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(tmp);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "problem,controller,tau,global_error,n_fevals,n_accepted,n_rejected");
  fs::remove(tmp);
}

TEST_CASE("tune subcommand with a tiny budget") {
  const CliRun r = run({"tune", "--kind", "standard", "--suite", "A1",
                        "--targets", "1e-4,1e-6", "--tau-grid", "1e-3..1e-9:7",
                        "--budget", "15"});
  CHECK(r.code == 0);
  CHECK(r.out.find("best_objective:") != std::string::npos);
  CHECK(r.out.find("iter,sigma,lambda1,lambda2,objective") !=
        std::string::npos);
}

TEST_CASE("missing subcommand is a usage error") {
  const CliRun r = run({});
  CHECK(r.code == 1);
}

}  // TEST_SUITE
