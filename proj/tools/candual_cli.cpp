// candual -- command-line front end for the canonical-duality library.
//
// Subcommands:
//   solve-scalar           critical points + extremality residuals for one load
//   sweep                  per-load root table over a range of loads (CSV)
//   solve-radial           pointwise dual solve of the annulus problem
//   counterexample <which> blowup | domgresit | mix | spike reports
//
// Every numeric value is emitted with 17 significant digits, so reports and
// the echoed params.cfg reproduce bit-for-bit when re-ingested on the same
// build.  Exit codes: 0 success, 1 verification failure, 2 invalid
// parameters, 3 regime mismatch.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "candual/counterexamples.hpp"
#include "candual/dual_solver.hpp"
#include "candual/errors.hpp"
#include "candual/grid.hpp"
#include "candual/json_writer.hpp"
#include "candual/radial.hpp"
#include "candual/scalar.hpp"

namespace {

using namespace candual;

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitInvalidParams = 2;
constexpr int kExitRegimeMismatch = 3;

// ---------------------------------------------------------------------------
// Options
// ---------------------------------------------------------------------------

struct CliOptions {
  double alpha = 2.0;
  double mu = 1.0;
  double nu = 1.0;
  double tau = 0.0;
  double tau_theta = 5.0;
  double a = 1.0;
  double b = 2.0;
  int grid_nodes = 2049;
  std::int64_t seed = 0;
  std::string out;            // output directory; empty = stdout only
  std::string format = "json";
  double tau_min = 0.0;
  double tau_max = 1.0;
  double tau_step = 0.01;
  double gamma = 0.0;         // 0 = half the admissible bound
  std::vector<std::int64_t> n_list;   // empty = {4,16,64,256,1024}
  std::vector<double> eps_list;       // empty = 6-step geometric ladder
  double y_scale = 1.0;
  int levels = 11;
  std::string which;          // counterexample selector

  [[nodiscard]] ScalarParams scalar() const {
    return ScalarParams{alpha, mu, nu, tau};
  }
  [[nodiscard]] MaterialParams material() const {
    return MaterialParams{alpha, mu, nu, tau_theta, a, b};
  }
};

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// The tabulated edge range where middle-branch dual values change sign.
void warn_edge_range(const CliOptions& opt) {
  if (opt.nu * opt.alpha * opt.alpha >= 8.0 * opt.mu) {
    std::cerr << "note: nu*alpha^2 >= 8*mu; middle-branch dual values can "
                 "change sign in this range\n";
  }
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot open output file: " + path.string());
  }
  out << content;
}

// Resolved-parameter echo.  Keys match the long option names, so the file
// feeds straight back through --config and reproduces the run bit-for-bit.
std::string params_cfg_text(const CliOptions& opt) {
  std::string cfg;
  cfg += "# candual " + (opt.which.empty() ? std::string("run")
                                           : "counterexample " + opt.which) +
         " parameter echo; reuse via --config\n";
  cfg += "alpha=" + fmt17(opt.alpha) + "\n";
  cfg += "mu=" + fmt17(opt.mu) + "\n";
  cfg += "nu=" + fmt17(opt.nu) + "\n";
  cfg += "tau=" + fmt17(opt.tau) + "\n";
  cfg += "tau-theta=" + fmt17(opt.tau_theta) + "\n";
  cfg += "a=" + fmt17(opt.a) + "\n";
  cfg += "b=" + fmt17(opt.b) + "\n";
  cfg += "grid-nodes=" + std::to_string(opt.grid_nodes) + "\n";
  cfg += "seed=" + std::to_string(opt.seed) + "\n";
  cfg += "format=" + opt.format + "\n";
  cfg += "tau-min=" + fmt17(opt.tau_min) + "\n";
  cfg += "tau-max=" + fmt17(opt.tau_max) + "\n";
  cfg += "tau-step=" + fmt17(opt.tau_step) + "\n";
  cfg += "gamma=" + fmt17(opt.gamma) + "\n";
  std::string ns;
  for (std::int64_t n : opt.n_list) {
    if (!ns.empty()) ns += ',';
    ns += std::to_string(n);
  }
  cfg += "n-list=" + ns + "\n";
  std::string es;
  for (double e : opt.eps_list) {
    if (!es.empty()) es += ',';
    es += fmt17(e);
  }
  cfg += "eps-list=" + es + "\n";
  cfg += "y-scale=" + fmt17(opt.y_scale) + "\n";
  cfg += "levels=" + std::to_string(opt.levels) + "\n";
  return cfg;
}

// Writes report.json + params.cfg + any extra CSVs into --out (if given) and
// prints the payload picked by --format.
void emit(const CliOptions& opt, const std::string& report_json,
          const std::string& primary_csv_name, const std::string& primary_csv,
          const std::vector<std::pair<std::string, std::string>>& extra =
              {}) {
  if (!opt.out.empty()) {
    const std::filesystem::path dir(opt.out);
    std::filesystem::create_directories(dir);
    write_text_file(dir / "report.json", report_json + "\n");
    write_text_file(dir / "params.cfg", params_cfg_text(opt));
    if (!primary_csv_name.empty()) {
      write_text_file(dir / primary_csv_name, primary_csv);
    }
    for (const auto& [name, content] : extra) {
      write_text_file(dir / name, content);
    }
  }
  if (opt.format == "csv" && !primary_csv.empty()) {
    std::cout << primary_csv;
  } else {
    std::cout << report_json << "\n";
  }
}

void append_params(JsonWriter& w, const CliOptions& opt, bool radial) {
  w.key("params");
  w.begin_object();
  w.field("alpha", opt.alpha);
  w.field("mu", opt.mu);
  w.field("nu", opt.nu);
  if (radial) {
    w.field("tau_theta", opt.tau_theta);
    w.field("a", opt.a);
    w.field("b", opt.b);
  } else {
    w.field("tau", opt.tau);
  }
  w.end_object();
}

// ---------------------------------------------------------------------------
// solve-scalar
// ---------------------------------------------------------------------------

void append_critical_point(JsonWriter& w, const CriticalPoint& cp,
                           const DualityReport& rep) {
  w.begin_object();
  w.field("branch", branch_name(cp.branch));
  w.field("label", label_name(cp.label));
  w.field("sigma", cp.sigma_bar);
  w.field("u", cp.u_bar);
  w.field("p_value", cp.p_value);
  w.field("h_value", cp.h_value);
  w.field("p_second", cp.p_second);
  w.key("residuals");
  w.begin_object();
  w.field("gap_p_h", rep.gap_p_h);
  w.field("gap_p_xi", rep.gap_p_xi);
  w.field("stationarity", rep.stationarity);
  w.field("dual_residual", rep.dual_residual);
  w.field("curvature_gap", rep.curvature_gap);
  w.field("max", rep.max_residual());
  w.field("tolerance", DualityReport::tol);
  w.field("pass", rep.pass());
  w.end_object();
  w.end_object();
}

int run_solve_scalar(const CliOptions& opt) {
  warn_edge_range(opt);
  const ScalarParams P = opt.scalar();
  const RegimeInfo info = regime_info(P);
  const std::vector<CriticalPoint> cps = critical_points(P);

  bool all_pass = true;
  std::vector<DualityReport> reports(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    reports[i] = verify_duality(P, cps[i]);
    all_pass = all_pass && reports[i].pass();
  }

  JsonWriter w;
  w.begin_object();
  w.field("kind", "solve-scalar");
  w.field("seed", opt.seed);
  append_params(w, opt, false);
  w.key("regime");
  w.begin_object();
  w.field("name", regime_name(info.regime));
  w.field("rho", info.rho);
  w.field("eta", info.eta);
  w.end_object();
  w.key("critical_points");
  w.begin_array();
  for (std::size_t i = 0; i < cps.size(); ++i) {
    append_critical_point(w, cps[i], reports[i]);
  }
  w.end_array();
  w.field("all_pass", all_pass);
  w.end_object();

  std::string csv = "index,branch,label,sigma,u,p_value,h_value,p_second\n";
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const CriticalPoint& cp = cps[i];
    csv += std::to_string(i) + ',' + branch_name(cp.branch) + ',' +
           label_name(cp.label) + ',' + fmt17(cp.sigma_bar) + ',' +
           fmt17(cp.u_bar) + ',' + fmt17(cp.p_value) + ',' +
           fmt17(cp.h_value) + ',' + fmt17(cp.p_second) + '\n';
  }

  emit(opt, w.str(), "roots.csv", csv);
  if (!all_pass) {
    std::cerr << "verification failed: extremality residual above tolerance\n";
    return kExitVerification;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

int run_sweep(const CliOptions& opt) {
  warn_edge_range(opt);
  if (!(opt.tau_step > 0.0)) {
    throw std::invalid_argument("sweep: tau-step must be > 0");
  }
  std::vector<double> taus;
  for (std::int64_t k = 0;; ++k) {
    const double t = opt.tau_min + static_cast<double>(k) * opt.tau_step;
    if (t > opt.tau_max + 0.5 * opt.tau_step) break;
    taus.push_back(t);
  }

  std::string csv =
      "tau,regime,root_count,ordering,"
      "branch1,label1,sigma1,u1,p1,h1,"
      "branch2,label2,sigma2,u2,p2,h2,"
      "branch3,label3,sigma3,u3,p3,h3\n";

  JsonWriter w;
  w.begin_object();
  w.field("kind", "sweep");
  w.field("seed", opt.seed);
  append_params(w, opt, false);
  w.field("tau_min", opt.tau_min);
  w.field("tau_max", opt.tau_max);
  w.field("tau_step", opt.tau_step);
  w.key("rows");
  w.begin_array();

  bool all_pass = true;
  for (double t : taus) {
    ScalarParams P = opt.scalar();
    P.tau = t;
    const RegimeInfo info = regime_info(P);
    const std::vector<DualRoot> roots = solve_dual_equation(P);
    const std::vector<CriticalPoint> cps = critical_points(P);

    bool row_pass = true;
    for (const CriticalPoint& cp : cps) {
      row_pass = row_pass && verify_duality(P, cp).pass();
    }
    // In the three-root regime the stationary values must come out ordered
    // lower > middle > upper.
    std::string ordering;
    if (info.regime == Regime::SubCritical && cps.size() == 3) {
      const bool ordered =
          cps[2].p_value > cps[1].p_value && cps[1].p_value > cps[0].p_value;
      ordering = ordered ? "p3>p2>p1" : "VIOLATED";
      row_pass = row_pass && ordered;
    }
    all_pass = all_pass && row_pass;

    csv += fmt17(t) + ',' + regime_name(info.regime) + ',' +
           std::to_string(roots.size()) + ',' + ordering;
    for (std::size_t i = 0; i < 3; ++i) {
      if (i < cps.size()) {
        csv += std::string(",") + branch_name(cps[i].branch) + ',' +
               label_name(cps[i].label) + ',' + fmt17(cps[i].sigma_bar) +
               ',' + fmt17(cps[i].u_bar) + ',' + fmt17(cps[i].p_value) + ',' +
               fmt17(cps[i].h_value);
      } else {
        csv += ",,,,,,";
      }
    }
    csv += '\n';

    w.begin_object();
    w.field("tau", t);
    w.field("regime", regime_name(info.regime));
    w.field("root_count", roots.size());
    w.field("ordering", ordering);
    w.field("pass", row_pass);
    w.key("critical_points");
    w.begin_array();
    for (const CriticalPoint& cp : cps) {
      w.begin_object();
      w.field("branch", branch_name(cp.branch));
      w.field("label", label_name(cp.label));
      w.field("sigma", cp.sigma_bar);
      w.field("u", cp.u_bar);
      w.field("p_value", cp.p_value);
      w.field("h_value", cp.h_value);
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.field("all_pass", all_pass);
  w.end_object();

  emit(opt, w.str(), "roots.csv", csv);
  if (!all_pass) {
    std::cerr << "verification failed: a sweep row violated the extremality "
                 "identities\n";
    return kExitVerification;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// solve-radial
// ---------------------------------------------------------------------------

int run_solve_radial(const CliOptions& opt) {
  warn_edge_range(opt);
  const MaterialParams mp = opt.material();
  const RadialRegime regime = regime_check(mp);
  if (regime == RadialRegime::Mixed) {
    throw WrongRegime(
        "solve-radial: beta changes regime inside [a,b] (Mixed); no single "
        "pointwise branch applies");
  }
  const RadialGrid grid = RadialGrid::simpson(mp.a, mp.b, opt.grid_nodes);
  const std::vector<Branch> branches =
      regime == RadialRegime::CaseA
          ? std::vector<Branch>{Branch::Upper}
          : std::vector<Branch>{Branch::Upper, Branch::Middle, Branch::Lower};

  JsonWriter w;
  w.begin_object();
  w.field("kind", "solve-radial");
  w.field("seed", opt.seed);
  append_params(w, opt, true);
  w.field("grid_nodes", opt.grid_nodes);
  w.field("regime", radial_regime_name(regime));
  w.key("branches");
  w.begin_array();

  std::string csv =
      "branch,p_hat,p_hat_error,p_dual,p_dual_error,residual,tolerance,"
      "pass\n";
  std::vector<std::pair<std::string, std::string>> fields;
  bool all_pass = true;

  for (Branch branch : branches) {
    const PointwiseSolution sol = solve_pointwise(mp, grid, branch);
    const QuadResult hat = p_hat(mp, grid, sol.v);
    const QuadResult dual = p_dual(mp, grid, sol.zeta);
    const double residual = std::abs(hat.value - dual.value);
    const double tol =
        10.0 * (hat.error_estimate + dual.error_estimate) +
        1e-12 * std::max({1.0, std::abs(hat.value), std::abs(dual.value)});
    const bool pass = residual <= tol;
    all_pass = all_pass && pass;

    std::string lc = branch_name(branch);
    for (char& c : lc) c = static_cast<char>(std::tolower(c));

    w.begin_object();
    w.field("branch", branch_name(branch));
    w.field("p_hat", hat.value);
    w.field("p_hat_error", hat.error_estimate);
    w.field("p_dual", dual.value);
    w.field("p_dual_error", dual.error_estimate);
    w.field("residual", residual);
    w.field("tolerance", tol);
    w.field("pass", pass);
    w.field("zeta_csv", "fields_zeta_" + lc + ".csv");
    w.field("v_csv", "fields_v_" + lc + ".csv");
    w.end_object();

    csv += std::string(branch_name(branch)) + ',' + fmt17(hat.value) + ',' +
           fmt17(hat.error_estimate) + ',' + fmt17(dual.value) + ',' +
           fmt17(dual.error_estimate) + ',' + fmt17(residual) + ',' +
           fmt17(tol) + ',' + (pass ? "true" : "false") + '\n';

    if (!opt.out.empty()) {
      const std::filesystem::path dir(opt.out);
      std::filesystem::create_directories(dir);
      write_field_csv((dir / ("fields_zeta_" + lc + ".csv")).string(), grid,
                      sol.zeta);
      write_field_csv((dir / ("fields_v_" + lc + ".csv")).string(), grid,
                      sol.v);
    }
  }
  w.end_array();
  w.field("all_pass", all_pass);
  w.end_object();

  emit(opt, w.str(), "duality.csv", csv, fields);
  if (!all_pass) {
    std::cerr << "verification failed: primal and dual functional values "
                 "disagree beyond the quadrature tolerance\n";
    return kExitVerification;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// counterexample
// ---------------------------------------------------------------------------

std::string ladder_csv_text(const std::vector<LadderRow>& rows) {
  std::string csv = "parameter,gap,norm\n";
  for (const LadderRow& row : rows) {
    csv += fmt17(row.parameter) + ',' + fmt17(row.gap) + ',' +
           fmt17(row.norm) + '\n';
  }
  return csv;
}

int run_counterexample(CliOptions& opt) {
  const MaterialParams mp = opt.material();
  if (opt.n_list.empty()) opt.n_list = {4, 16, 64, 256, 1024};
  if (opt.eps_list.empty()) {
    double eps = mp.b - mp.a;
    for (int k = 0; k < 6; ++k, eps *= 0.5) opt.eps_list.push_back(eps);
  }
  if (opt.gamma == 0.0 && opt.which == "blowup") {
    opt.gamma = default_blowup_gamma(mp);
  }

  std::string report_json;
  std::string csv;
  bool pass = true;
  std::string why;

  if (opt.which == "blowup") {
    const BlowupReport rep = blowup_report(mp, opt.gamma, opt.n_list);
    for (std::size_t k = 1; k < rep.pd_values.size(); ++k) {
      pass = pass && rep.pd_values[k] > rep.pd_values[k - 1];
    }
    pass = pass && rep.slope_vs_log_n > 0.0;
    why = "dual ladder failed to increase";
    report_json = to_json(rep);
    csv = ladder_csv_text(ladder_rows(rep));
  } else if (opt.which == "mix") {
    const PerturbationReport rep = mix_perturbation_report(mp, opt.eps_list);
    for (const PerturbationRow& row : rep.rows) {
      pass = pass && row.gap > 0.0 && row.gap >= 10.0 * row.gap_error &&
             row.norm <= row.norm_bound;
    }
    why = "a mix gap was not decisively positive";
    report_json = to_json(rep);
    csv = ladder_csv_text(ladder_rows(rep));
  } else if (opt.which == "spike") {
    const PerturbationReport rep =
        spike_perturbation_report(mp, opt.eps_list, opt.y_scale);
    for (const PerturbationRow& row : rep.rows) {
      pass = pass && row.gap < 0.0 && -row.gap >= 10.0 * row.gap_error &&
             row.norm <= row.norm_bound;
    }
    why = "a spike gap was not decisively negative";
    report_json = to_json(rep);
    csv = ladder_csv_text(ladder_rows(rep));
  } else {  // domgresit
    const DomgresitReport rep = domgresit_witness(mp, opt.levels);
    pass = !rep.witness.converges && rep.control.converges;
    why = "witness/control verdicts inverted";
    report_json = to_json(rep);
    csv = "level,witness_estimate,control_estimate\n";
    for (std::size_t k = 0; k < rep.witness.estimates.size(); ++k) {
      csv += std::to_string(k) + ',' + fmt17(rep.witness.estimates[k]) + ',' +
             fmt17(rep.control.estimates[k]) + '\n';
    }
  }

  JsonWriter w;
  w.begin_object();
  w.field("kind", "counterexample");
  w.field("which", opt.which);
  w.field("seed", opt.seed);
  append_params(w, opt, true);
  w.key("report");
  w.raw_value(report_json);
  w.field("pass", pass);
  w.end_object();

  emit(opt, w.str(), "ladder.csv", csv);
  if (!pass) {
    std::cerr << "verification failed: " << why << "\n";
    return kExitVerification;
  }
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------
// main
// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CliOptions opt;
  CLI::App app{
      "closed-form extrema of the quartic shear energy, its canonical dual, "
      "and the counterexample reports"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags win");

  app.add_option("--alpha", opt.alpha, "geometric offset (> 0)")
      ->capture_default_str();
  app.add_option("--mu", opt.mu, "shear modulus (> 0)")->capture_default_str();
  app.add_option("--nu", opt.nu, "hardening modulus (> 0)")
      ->capture_default_str();
  app.add_option("--tau", opt.tau, "dead load (scalar problem)")
      ->capture_default_str();
  app.add_option("--tau-theta", opt.tau_theta, "boundary shear (radial)")
      ->capture_default_str();
  app.add_option("--a", opt.a, "inner radius")->capture_default_str();
  app.add_option("--b", opt.b, "outer radius")->capture_default_str();
  app.add_option("--grid-nodes", opt.grid_nodes, "radial grid nodes (odd)")
      ->capture_default_str();
  app.add_option("--seed", opt.seed, "seed recorded in reports")
      ->capture_default_str();
  app.add_option("--out", opt.out, "output directory for report files");
  app.add_option("--format", opt.format, "stdout payload")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--tau-min", opt.tau_min, "sweep start")
      ->capture_default_str();
  app.add_option("--tau-max", opt.tau_max, "sweep end (inclusive)")
      ->capture_default_str();
  app.add_option("--tau-step", opt.tau_step, "sweep step (> 0)")
      ->capture_default_str();
  app.add_option("--gamma", opt.gamma,
                 "blow-up ramp slope; 0 = half the admissible bound")
      ->capture_default_str();
  app.add_option("--n-list", opt.n_list,
                 "blow-up sequence indices (comma separated)")
      ->delimiter(',');
  app.add_option("--eps-list", opt.eps_list,
                 "perturbation widths (comma separated)")
      ->delimiter(',');
  app.add_option("--y-scale", opt.y_scale, "spike height multiplier (>= 1)")
      ->capture_default_str();
  app.add_option("--levels", opt.levels, "membership probe refinement levels")
      ->capture_default_str();

  CLI::App* solve_scalar = app.add_subcommand(
      "solve-scalar", "critical points and extremality residuals");
  CLI::App* sweep =
      app.add_subcommand("sweep", "root table over a range of loads");
  CLI::App* solve_radial =
      app.add_subcommand("solve-radial", "pointwise dual solve on the ring");
  CLI::App* counterexample = app.add_subcommand(
      "counterexample", "extremality-refuting constructions");
  counterexample->add_option("which", opt.which, "report to build")
      ->required()
      ->check(CLI::IsMember({"blowup", "domgresit", "mix", "spike"}));
  for (CLI::App* sub : {solve_scalar, sweep, solve_radial, counterexample}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidParams;
  }

  try {
    if (solve_scalar->parsed()) return run_solve_scalar(opt);
    if (sweep->parsed()) return run_sweep(opt);
    if (solve_radial->parsed()) return run_solve_radial(opt);
    return run_counterexample(opt);
  } catch (const WrongRegime& e) {
    std::cerr << "regime mismatch: " << e.what() << "\n";
    return kExitRegimeMismatch;
  } catch (const BranchUnavailable& e) {
    std::cerr << "regime mismatch: " << e.what() << "\n";
    return kExitRegimeMismatch;
  } catch (const NotDoubleWell& e) {
    std::cerr << "invalid parameters (NotDoubleWell): " << e.what() << "\n";
    return kExitInvalidParams;
  } catch (const Error& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return kExitInvalidParams;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return kExitInvalidParams;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  }
}
