#define DOCTEST_CONFIG_IMPLEMENT
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "candual/grid.hpp"
#include "doctest.h"
#include "json.hpp"

namespace {

std::string cli_path;  // set from argv[1] by main below

struct RunResult {
  int exit_code = -1;
  std::string out;
};

// Runs the CLI with the given argument string, capturing stdout; stderr is
// dropped so expected failure messages stay out of the test log.
RunResult run_cli(const std::string& args) {
  RunResult res;
  const std::string cmd = cli_path + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) {
    res.out.append(buf, got);
  }
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(cell);
  return cells;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Scoped output directory for --out runs.
struct OutDir {
  std::filesystem::path path;
  explicit OutDir(const std::string& name) : path(name) {
    std::filesystem::remove_all(path);
  }
  ~OutDir() { std::filesystem::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

// ---------------------------------------------------------------------------
// Exit-code contract
// ---------------------------------------------------------------------------

TEST_CASE("exit codes follow the contract") {
  // 0: clean run.
  CHECK(run_cli("solve-scalar --tau 1").exit_code == 0);
  // 2: no double-well structure (nu*alpha^2 <= 2*mu).
  CHECK(run_cli("solve-scalar --alpha 1 --mu 1 --nu 1").exit_code == 2);
  // 3: mixed radial regime (beta vanishes inside the ring).
  CHECK(run_cli("solve-radial --tau-theta 2 --b 2").exit_code == 3);
  // 3: mix perturbation needs the three-branch regime.
  CHECK(run_cli("counterexample mix --tau-theta 5 --b 2").exit_code == 3);
  // 2: malformed invocations.
  CHECK(run_cli("counterexample nosuch").exit_code == 2);
  CHECK(run_cli("solve-scalar --no-such-flag 1").exit_code == 2);
  CHECK(run_cli("sweep --tau-step 0").exit_code == 2);
  CHECK(run_cli("counterexample blowup --tau-theta 5 --b 2 --gamma 5")
            .exit_code == 2);
}

// ---------------------------------------------------------------------------
// solve-scalar output
// ---------------------------------------------------------------------------

TEST_CASE("zero-load solve emits the closed-form minima as JSON") {
  const RunResult res = run_cli("solve-scalar --tau 0");
  REQUIRE(res.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(res.out);
  CHECK(doc.at("kind") == "solve-scalar");
  CHECK(doc.at("regime").at("name") == "ZeroLoad");
  CHECK(doc.at("all_pass").get<bool>());
  const auto& cps = doc.at("critical_points");
  REQUIRE(cps.size() == 3);
  const double r2 = std::sqrt(2.0);
  CHECK(cps[0].at("u").get<double>() == doctest::Approx(2.0 + r2).epsilon(1e-12));
  CHECK(cps[1].at("u").get<double>() == doctest::Approx(2.0 - r2).epsilon(1e-12));
  CHECK(cps[0].at("p_value").get<double>() == doctest::Approx(-0.5));
  CHECK(cps[1].at("p_value").get<double>() == doctest::Approx(-0.5));
  CHECK(cps[0].at("label") == "GlobalMin");
  CHECK(cps[1].at("label") == "GlobalMin");
  CHECK(cps[2].at("label") == "LocalMax");
  for (const auto& cp : cps) {
    CHECK(cp.at("residuals").at("pass").get<bool>());
  }
}

TEST_CASE("scalar roots csv carries one row per critical point") {
  const RunResult res = run_cli("solve-scalar --tau 0.5 --format csv");
  REQUIRE(res.exit_code == 0);
  std::istringstream in(res.out);
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header == "index,branch,label,sigma,u,p_value,h_value,p_second");
  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  REQUIRE(rows.size() == 3);  // subcritical: three critical points
  CHECK(split(rows[0], ',')[1] == "Upper");
  CHECK(split(rows[1], ',')[1] == "Middle");
  CHECK(split(rows[2], ',')[1] == "Lower");
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

TEST_CASE("sweep root counts step 2 -> 3 -> 1 at the critical load") {
  const RunResult res =
      run_cli("sweep --tau-min 0 --tau-max 1 --tau-step 0.01 --format csv");
  REQUIRE(res.exit_code == 0);
  std::istringstream in(res.out);
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(split(header, ',')[0] == "tau");

  std::vector<double> taus;
  std::vector<int> counts;
  std::vector<std::string> regimes, orderings;
  for (std::string line; std::getline(in, line);) {
    const std::vector<std::string> cells = split(line, ',');
    REQUIRE(cells.size() >= 4);
    taus.push_back(std::strtod(cells[0].c_str(), nullptr));
    regimes.push_back(cells[1]);
    counts.push_back(std::atoi(cells[2].c_str()));
    orderings.push_back(cells[3]);
  }
  REQUIRE(taus.size() == 101);

  CHECK(counts.front() == 2);  // tau = 0: double root + simple root
  CHECK(counts.back() == 1);   // tau = 1 > sqrt(eta): single root
  // Counts must be a clean 2, 3...3, 1...1 staircase.
  for (std::size_t i = 1; i < counts.size(); ++i) {
    CHECK(counts[i] <= counts[i - 1] + 1);
    if (counts[i - 1] == 1) CHECK(counts[i] == 1);
  }
  // The 3 -> 1 transition happens within one step of sqrt(8/27).
  const double tau_crit = std::sqrt(8.0 / 27.0);
  std::size_t first_one = counts.size();
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] == 1 && counts[i - 1] == 3) {
      first_one = i;
      break;
    }
  }
  REQUIRE(first_one < counts.size());
  CHECK(std::abs(taus[first_one] - tau_crit) <= 0.01 + 1e-12);

  // Every three-root row is SubCritical with the value ordering confirmed.
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 3) {
      CHECK(regimes[i] == "SubCritical");
      CHECK(orderings[i] == "p3>p2>p1");
    }
  }
}

TEST_CASE("empty sweep range yields a bare header") {
  const RunResult res =
      run_cli("sweep --tau-min 1 --tau-max 0 --tau-step 0.01 --format csv");
  REQUIRE(res.exit_code == 0);
  std::istringstream in(res.out);
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(split(header, ',')[0] == "tau");
  std::string extra;
  CHECK_FALSE(std::getline(in, extra));
}

// ---------------------------------------------------------------------------
// solve-radial
// ---------------------------------------------------------------------------

TEST_CASE("radial solve reports three verified branch pairs in the narrow "
          "ring") {
  OutDir dir("test_cli_radial_out");
  const RunResult res = run_cli(
      "solve-radial --tau-theta 2.05 --b 1.1 --grid-nodes 257 --out " +
      dir.str());
  REQUIRE(res.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(res.out);
  CHECK(doc.at("regime") == "CaseB");
  CHECK(doc.at("all_pass").get<bool>());
  REQUIRE(doc.at("branches").size() == 3);
  for (const auto& branch : doc.at("branches")) {
    CHECK(branch.at("pass").get<bool>());
    CHECK(branch.at("residual").get<double>() <=
          branch.at("tolerance").get<double>());
  }

  // The advertised field files exist and parse back to 257 nodes.
  for (const char* name :
       {"fields_zeta_upper.csv", "fields_v_upper.csv",
        "fields_zeta_middle.csv", "fields_v_middle.csv",
        "fields_zeta_lower.csv", "fields_v_lower.csv"}) {
    const candual::FieldCsv csv =
        candual::read_field_csv((dir.path / name).string());
    CHECK(csv.r.size() == 257);
    CHECK(csv.field.values.size() == 257);
  }
  CHECK(std::filesystem::exists(dir.path / "report.json"));
  CHECK(std::filesystem::exists(dir.path / "params.cfg"));
  CHECK(std::filesystem::exists(dir.path / "duality.csv"));
}

TEST_CASE("wide-ring radial solve has the single upper branch") {
  const RunResult res = run_cli("solve-radial --tau-theta 5 --b 2");
  REQUIRE(res.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(res.out);
  CHECK(doc.at("regime") == "CaseA");
  REQUIRE(doc.at("branches").size() == 1);
  CHECK(doc.at("branches")[0].at("branch") == "Upper");
  CHECK(doc.at("all_pass").get<bool>());
}

// ---------------------------------------------------------------------------
// counterexample reports through the CLI
// ---------------------------------------------------------------------------

TEST_CASE("blowup subcommand emits an increasing ladder") {
  const RunResult res =
      run_cli("counterexample blowup --tau-theta 5 --b 2 --n-list 4,16,64");
  REQUIRE(res.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(res.out);
  CHECK(doc.at("which") == "blowup");
  CHECK(doc.at("pass").get<bool>());
  const auto& pd = doc.at("report").at("pd_values");
  REQUIRE(pd.size() == 3);
  CHECK(pd[1].get<double>() > pd[0].get<double>());
  CHECK(pd[2].get<double>() > pd[1].get<double>());
  CHECK(doc.at("report").at("slope_vs_log_n").get<double>() > 0.0);
}

TEST_CASE("mix and spike subcommands certify their gap signs") {
  const RunResult mix = run_cli(
      "counterexample mix --tau-theta 2.05 --b 1.1 --eps-list 0.1,0.05,0.025");
  REQUIRE(mix.exit_code == 0);
  const nlohmann::json mdoc = nlohmann::json::parse(mix.out);
  for (const auto& row : mdoc.at("report").at("rows")) {
    CHECK(row.at("gap").get<double>() > 0.0);
  }

  const RunResult spike = run_cli(
      "counterexample spike --tau-theta 2.05 --b 1.1 --eps-list 0.1,0.05");
  REQUIRE(spike.exit_code == 0);
  const nlohmann::json sdoc = nlohmann::json::parse(spike.out);
  for (const auto& row : sdoc.at("report").at("rows")) {
    CHECK(row.at("gap").get<double>() < 0.0);
  }
}

TEST_CASE("domgresit subcommand pairs a divergent witness with a convergent "
          "control") {
  const RunResult res =
      run_cli("counterexample domgresit --tau-theta 5 --b 2");
  REQUIRE(res.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(res.out);
  CHECK(doc.at("pass").get<bool>());
  CHECK_FALSE(doc.at("report").at("witness").at("converges").get<bool>());
  CHECK(doc.at("report").at("control").at("converges").get<bool>());
}

// ---------------------------------------------------------------------------
// Reproducibility: the echoed params.cfg reproduces the run bit-for-bit
// ---------------------------------------------------------------------------

TEST_CASE("params.cfg round trip reproduces report.json byte for byte") {
  OutDir dir1("test_cli_rt1");
  OutDir dir2("test_cli_rt2");

  const RunResult first = run_cli(
      "counterexample blowup --tau-theta 5 --b 2 --n-list 4,16 --out " +
      dir1.str());
  REQUIRE(first.exit_code == 0);
  const RunResult second =
      run_cli("counterexample blowup --config " +
              (dir1.path / "params.cfg").string() + " --out " + dir2.str());
  REQUIRE(second.exit_code == 0);

  CHECK(slurp(dir1.path / "report.json") == slurp(dir2.path / "report.json"));
  CHECK(slurp(dir1.path / "params.cfg") == slurp(dir2.path / "params.cfg"));
  CHECK(slurp(dir1.path / "ladder.csv") == slurp(dir2.path / "ladder.csv"));
  CHECK(first.out == second.out);
}

TEST_CASE("scalar solve round trips through its config echo") {
  OutDir dir1("test_cli_rt3");
  OutDir dir2("test_cli_rt4");
  const RunResult first = run_cli(
      "solve-scalar --alpha 2.5 --mu 1.25 --nu 0.75 --tau 0.375 --out " +
      dir1.str());
  REQUIRE(first.exit_code == 0);
  const RunResult second =
      run_cli("solve-scalar --config " + (dir1.path / "params.cfg").string() +
              " --out " + dir2.str());
  REQUIRE(second.exit_code == 0);
  CHECK(slurp(dir1.path / "report.json") == slurp(dir2.path / "report.json"));
  CHECK(slurp(dir1.path / "roots.csv") == slurp(dir2.path / "roots.csv"));
}

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  // The harness passes the CLI binary path as the first argument; everything
  // after it belongs to doctest.
  int shift = 0;
  if (argc >= 2 && argv[1][0] != '-') {
    cli_path = argv[1];
    shift = 1;
  } else {
    std::fprintf(stderr, "usage: test_cli <path-to-candual-binary> [doctest "
                         "options]\n");
    return 1;
  }
  std::vector<char*> args;
  args.push_back(argv[0]);
  for (int i = 1 + shift; i < argc; ++i) args.push_back(argv[i]);
  doctest::Context ctx(static_cast<int>(args.size()), args.data());
  return ctx.run();
}
