#include "candual/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "candual/detail/gauss.hpp"
#include "candual/dual_solver.hpp"
#include "candual/errors.hpp"
#include "candual/json_writer.hpp"
#include "candual/parallel.hpp"
#include "candual/scalar.hpp"

namespace candual {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr int kFieldNodes = 2049;   // full-interval scan grid
constexpr int kSubgridNodes = 257;  // per-eps gap quadrature on [a, a+eps]

// Parallel map over list indices; results land at their own index, so the
// assembly order matches the input list no matter how iterations are
// scheduled.  The first thrown exception is rethrown on the calling thread.
template <class F>
void parallel_map(std::int64_t n, F&& body) {
  std::mutex guard;
  std::exception_ptr first;
  par::parallel_for(n, [&](std::int64_t i) {
    try {
      body(i);
    } catch (...) {
      const std::lock_guard<std::mutex> lock(guard);
      if (!first) first = std::current_exception();
    }
  });
  if (first) std::rethrow_exception(first);
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

// Integrand of the dual functional (without the 2*pi): the quotient form is
// defined for any zeta != -mu, admissible or not.
double pd_density(const MaterialParams& mp, double r, double zeta) {
  const double s = sigma_r(mp, r);
  const double num = s + mp.alpha * zeta;
  return -0.5 * r * (num * num / (zeta + mp.mu) + zeta * zeta / mp.nu);
}

void require_gamma(const MaterialParams& mp, double gamma) {
  const double gmax = blowup_gamma_max(mp);
  if (!(gamma > 0.0) || !(gamma < gmax)) {
    throw GammaOutOfRange("gamma must lie in (0, " + std::to_string(gmax) +
                          ") for these material parameters");
  }
}

// Dual value on zeta_n.  The integrand is analytic on the flat piece and on
// every dyadic segment [a + w, a + 2w] of the ramp (the 1/(r-a) pole sits one
// segment-length away from each), so a fixed Gauss panel per segment is
// accurate to near machine precision and the segment count grows only like
// log n.
double pd_of_blowup(const MaterialParams& mp, double gamma, std::int64_t n) {
  const double delta = (mp.b - mp.a) / static_cast<double>(n);
  const double kink = mp.a + delta;
  const auto f = [&](double r) {
    return pd_density(mp, r, blowup_zeta(mp, gamma, n, r));
  };
  double acc = detail::integrate_gl16(f, mp.a, kink);
  double lo = kink;
  while (lo < mp.b) {
    const double hi = std::min(mp.b, mp.a + 2.0 * (lo - mp.a));
    acc += detail::integrate_gl16(f, lo, hi);
    lo = hi;
  }
  return kTwoPi * acc;
}

void require_eps_list(const MaterialParams& mp,
                      const std::vector<double>& eps_list) {
  if (eps_list.empty()) {
    throw std::invalid_argument("perturbation report: empty eps list");
  }
  for (double eps : eps_list) {
    // eps == b-a is allowed: the swap covers the whole interval.
    if (!(eps > 0.0) || !(eps <= mp.b - mp.a)) {
      throw std::invalid_argument(
          "perturbation report: eps must lie in (0, b-a]");
    }
  }
}

double sup_abs_diff(const std::vector<double>& u, const std::vector<double>& v) {
  double sup = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    sup = std::max(sup, std::abs(u[i] - v[i]));
  }
  return sup;
}

// ||w||_4 over [lo, lo+eps] where w is sampled on `sub`'s nodes.
double l4_on_subgrid(const RadialGrid& sub, const std::vector<double>& diff) {
  std::vector<double> quartic(diff.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const double d2 = diff[i] * diff[i];
    quartic[i] = d2 * d2;
  }
  return std::pow(std::max(0.0, sub.integrate(quartic).value), 0.25);
}

void fill_norm_bounds(PerturbationReport& rep) {
  for (PerturbationRow& row : rep.rows) {
    const double bound = std::pow(row.eps, 0.25) * rep.diff_sup;
    row.norm_bound = bound + 1e-9 * std::max(1.0, bound);
  }
}

void probe_json(JsonWriter& w, const ProbeResult& probe) {
  w.begin_object();
  w.field("converges", probe.converges);
  w.field("limit", probe.limit);
  w.field("trend", probe.trend);
  w.number_array("estimates", probe.estimates);
  w.number_array("node_counts", probe.node_counts);
  w.end_object();
}

}  // namespace

// ---------------------------------------------------------------------------
// Blow-up sequence
// ---------------------------------------------------------------------------

double blowup_gamma_max(const MaterialParams& mp) {
  mp.validate();
  return (0.5 * mp.nu * mp.alpha * mp.alpha - mp.mu) / (mp.b - mp.a);
}

double default_blowup_gamma(const MaterialParams& mp) {
  return 0.5 * blowup_gamma_max(mp);
}

double blowup_zeta(const MaterialParams& mp, double gamma, std::int64_t n,
                   double r) {
  require_gamma(mp, gamma);
  if (n < 1) throw std::invalid_argument("blowup_zeta: n must be >= 1");
  const double floor_dist = (mp.b - mp.a) / static_cast<double>(n);
  return -mp.mu - gamma * std::max(r - mp.a, floor_dist);
}

Field build_blowup_sequence(const MaterialParams& mp, double gamma,
                            std::int64_t n, const RadialGrid& grid) {
  require_gamma(mp, gamma);
  if (n < 1) {
    throw std::invalid_argument("build_blowup_sequence: n must be >= 1");
  }
  Field f;
  f.values.resize(grid.nodes().size());
  const std::vector<double>& r = grid.nodes();
  par::parallel_for(grid.size(), [&](std::int64_t i) {
    f.values[static_cast<std::size_t>(i)] =
        blowup_zeta(mp, gamma, n, r[static_cast<std::size_t>(i)]);
  });
  return f;
}

Field build_blowup_sequence(const MaterialParams& mp, double gamma,
                            std::int64_t n) {
  return build_blowup_sequence(mp, gamma, n,
                               RadialGrid::simpson(mp.a, mp.b, kFieldNodes));
}

BlowupReport blowup_report(const MaterialParams& mp, double gamma,
                           const std::vector<std::int64_t>& n_list) {
  mp.validate();
  require_gamma(mp, gamma);
  if (n_list.empty()) {
    throw std::invalid_argument("blowup_report: empty n list");
  }
  if (regime_check(mp) == RadialRegime::Mixed) {
    throw WrongRegime(
        "blowup_report: beta vanishes inside [a,b]; the log-divergence "
        "lower bound needs beta^2 bounded away from zero");
  }
  BlowupReport rep;
  rep.gamma = gamma;
  rep.gamma_max = blowup_gamma_max(mp);
  rep.n_values = n_list;
  rep.pd_values.resize(n_list.size());
  parallel_map(static_cast<std::int64_t>(n_list.size()), [&](std::int64_t i) {
    const std::size_t k = static_cast<std::size_t>(i);
    if (n_list[k] < 1) {
      throw std::invalid_argument("blowup_report: n must be >= 1");
    }
    rep.pd_values[k] = pd_of_blowup(mp, gamma, n_list[k]);
  });
  std::vector<double> log_n(n_list.size());
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    log_n[k] = std::log(static_cast<double>(n_list[k]));
  }
  rep.slope_vs_log_n = ls_slope(log_n, rep.pd_values);
  return rep;
}

// ---------------------------------------------------------------------------
// Mix perturbation: v_eps = v1 on [a, a+eps], v2 beyond
// ---------------------------------------------------------------------------

PerturbationReport mix_perturbation_report(
    const MaterialParams& mp, const std::vector<double>& eps_list) {
  mp.validate();
  if (regime_check(mp) != RadialRegime::CaseB) {
    throw WrongRegime(
        "mix perturbation: the middle branch exists only when beta^2 stays "
        "below eta on all of [a,b]");
  }
  require_eps_list(mp, eps_list);

  PerturbationReport rep;
  rep.kind = "mix";

  const RadialGrid grid = RadialGrid::simpson(mp.a, mp.b, kFieldNodes);
  const PointwiseSolution s1 = solve_pointwise(mp, grid, Branch::Upper);
  const PointwiseSolution s2 = solve_pointwise(mp, grid, Branch::Middle);
  rep.diff_l4 = l4_distance(s1.v, s2.v, grid);
  double sup = sup_abs_diff(s1.v.values, s2.v.values);

  rep.rows.resize(eps_list.size());
  std::vector<double> sub_sup(eps_list.size(), 0.0);
  parallel_map(static_cast<std::int64_t>(eps_list.size()),
               [&](std::int64_t i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const double eps = eps_list[k];
    const RadialGrid sub =
        RadialGrid::simpson(mp.a, mp.a + eps, kSubgridNodes);
    const PointwiseSolution t1 = serial_ref::solve_pointwise(mp, sub,
                                                             Branch::Upper);
    const PointwiseSolution t2 = serial_ref::solve_pointwise(mp, sub,
                                                             Branch::Middle);
    const std::vector<double>& r = sub.nodes();
    std::vector<double> integrand(r.size());
    std::vector<double> diff(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
      const ScalarParams pw = mp.scalar_at(r[j]);
      integrand[j] = r[j] * (eval_p(pw, r[j] * t2.v.values[j]) -
                             eval_p(pw, r[j] * t1.v.values[j]));
      diff[j] = t1.v.values[j] - t2.v.values[j];
    }
    const QuadResult q = sub.integrate(integrand);
    PerturbationRow& row = rep.rows[k];
    row.eps = eps;
    row.gap = kTwoPi * q.value;
    row.gap_error = kTwoPi * q.error_estimate;
    row.norm = l4_on_subgrid(sub, diff);
    sub_sup[k] = sup_abs_diff(t1.v.values, t2.v.values);
  });
  for (double s : sub_sup) sup = std::max(sup, s);
  rep.diff_sup = sup;
  fill_norm_bounds(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Spike perturbation: v_eps = y_bar on [a, a+eps], v3 beyond
// ---------------------------------------------------------------------------

PerturbationReport spike_perturbation_report(const MaterialParams& mp,
                                             const std::vector<double>& eps_list,
                                             double y_scale) {
  mp.validate();
  if (regime_check(mp) != RadialRegime::CaseB) {
    throw WrongRegime(
        "spike perturbation: the lower branch exists only when beta^2 stays "
        "below eta on all of [a,b]");
  }
  require_eps_list(mp, eps_list);
  if (!(y_scale >= 1.0) || !std::isfinite(y_scale)) {
    throw std::invalid_argument("spike perturbation: y_scale must be >= 1");
  }

  PerturbationReport rep;
  rep.kind = "spike";

  const RadialGrid grid = RadialGrid::simpson(mp.a, mp.b, kFieldNodes);
  const PointwiseSolution s3 = solve_pointwise(mp, grid, Branch::Lower);

  // Pre-solve the per-eps subgrids so the spike certificate can be checked
  // on every node any quadrature below will ever touch.
  std::vector<RadialGrid> subgrids;
  std::vector<PointwiseSolution> subsol(eps_list.size());
  subgrids.reserve(eps_list.size());
  for (double eps : eps_list) {
    subgrids.push_back(RadialGrid::simpson(mp.a, mp.a + eps, kSubgridNodes));
  }
  parallel_map(static_cast<std::int64_t>(eps_list.size()),
               [&](std::int64_t i) {
    subsol[static_cast<std::size_t>(i)] = serial_ref::solve_pointwise(
        mp, subgrids[static_cast<std::size_t>(i)], Branch::Lower);
  });

  // M = max of p along r -> r*v3(r) over all scanned nodes, and the largest
  // |v3| for the spike floor.
  double big_m = -std::numeric_limits<double>::infinity();
  double v3_max = 0.0;
  const auto scan = [&](const RadialGrid& g, const PointwiseSolution& s) {
    for (std::size_t j = 0; j < s.v.values.size(); ++j) {
      const double r = g.nodes()[j];
      big_m = std::max(big_m, eval_p(mp.scalar_at(r), r * s.v.values[j]));
      v3_max = std::max(v3_max, std::abs(s.v.values[j]));
    }
  };
  scan(grid, s3);
  for (std::size_t k = 0; k < eps_list.size(); ++k) scan(subgrids[k], subsol[k]);
  rep.big_m = big_m;

  // Certified threshold: p with the largest pointwise load is a lower bound
  // for every p_{-beta(r)} at positive arguments, and is increasing past its
  // largest critical point, so p_m(y) > M for all y >= y0 once p_m(y0) > M.
  rep.m_load = std::max(std::abs(beta_r(mp, mp.a)), std::abs(beta_r(mp, mp.b)));
  const ScalarParams pm{mp.alpha, mp.mu, mp.nu, rep.m_load};
  const std::vector<DualRoot> pm_roots = solve_dual_equation(pm);
  double y0 = std::max(u_of_sigma(pm, pm_roots.front().sigma), 1.0);
  for (int i = 0; eval_p(pm, y0) <= big_m; ++i) {
    if (i > 200) throw std::logic_error("spike: threshold search stalled");
    y0 *= 2.0;
  }
  rep.y0 = y0;

  double y_bar = 2.0 * std::max(y0 / mp.a, v3_max * mp.b) * y_scale;
  // Direct node-wise check of the certificate (a*y_bar >= 2*y0 makes it hold
  // already; the scan keeps the conclusion independent of that argument).
  const auto certified = [&](double y) {
    const auto node_ok = [&](const RadialGrid& g, std::size_t j) {
      const double r = g.nodes()[j];
      return eval_p(mp.scalar_at(r), r * y) > big_m;
    };
    for (std::size_t j = 0; j < grid.nodes().size(); ++j) {
      if (!node_ok(grid, j)) return false;
    }
    for (const RadialGrid& g : subgrids) {
      for (std::size_t j = 0; j < g.nodes().size(); ++j) {
        if (!node_ok(g, j)) return false;
      }
    }
    return true;
  };
  for (int i = 0; !certified(y_bar); ++i) {
    if (i > 60) throw std::logic_error("spike: certificate did not close");
    y_bar *= 2.0;
  }
  rep.y_bar = y_bar;

  Field spike_field;
  spike_field.values.assign(grid.nodes().size(), y_bar);
  rep.diff_l4 = l4_distance(spike_field, s3.v, grid);
  double sup = 0.0;
  for (double v : s3.v.values) sup = std::max(sup, std::abs(y_bar - v));

  rep.rows.resize(eps_list.size());
  std::vector<double> sub_sup(eps_list.size(), 0.0);
  parallel_map(static_cast<std::int64_t>(eps_list.size()),
               [&](std::int64_t i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const RadialGrid& sub = subgrids[k];
    const PointwiseSolution& t3 = subsol[k];
    const std::vector<double>& r = sub.nodes();
    std::vector<double> integrand(r.size());
    std::vector<double> diff(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
      const ScalarParams pw = mp.scalar_at(r[j]);
      integrand[j] = r[j] * (eval_p(pw, r[j] * t3.v.values[j]) -
                             eval_p(pw, r[j] * y_bar));
      diff[j] = y_bar - t3.v.values[j];
    }
    const QuadResult q = sub.integrate(integrand);
    PerturbationRow& row = rep.rows[k];
    row.eps = eps_list[k];
    row.gap = kTwoPi * q.value;
    row.gap_error = kTwoPi * q.error_estimate;
    row.norm = l4_on_subgrid(sub, diff);
    double local = 0.0;
    for (double dj : diff) local = std::max(local, std::abs(dj));
    sub_sup[k] = local;
  });
  for (double s : sub_sup) sup = std::max(sup, s);
  rep.diff_sup = sup;
  fill_norm_bounds(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Domain witness
// ---------------------------------------------------------------------------

DomgresitReport domgresit_witness(const MaterialParams& mp, int levels) {
  mp.validate();
  if (levels < 2) {
    throw std::invalid_argument("domgresit_witness: levels must be >= 2");
  }

  // Pick [c,d] on which beta^2 is bounded below.  beta is strictly
  // increasing, so it has at most one zero; when one exists inside [a,b],
  // keep the side of it where |beta| is larger at the outer endpoint.
  const double beta_a = beta_r(mp, mp.a);
  const double beta_b = beta_r(mp, mp.b);
  double lo = mp.a;
  double hi = mp.b;
  if (beta_a * beta_b <= 0.0) {
    double zlo = mp.a, zhi = mp.b;
    for (int i = 0; i < 200 && (zhi - zlo) > 1e-14 * std::max(1.0, mp.b);
         ++i) {
      const double mid = 0.5 * (zlo + zhi);
      (beta_r(mp, mid) < 0.0 ? zlo : zhi) = mid;
    }
    const double r0 = 0.5 * (zlo + zhi);
    if (std::abs(beta_a) >= std::abs(beta_b)) {
      hi = r0;
    } else {
      lo = r0;
    }
  }
  DomgresitReport rep;
  rep.c = lo + 0.25 * (hi - lo);
  rep.d = hi - 0.25 * (hi - lo);
  rep.gamma0 = std::min(beta_r(mp, rep.c) * beta_r(mp, rep.c),
                        beta_r(mp, rep.d) * beta_r(mp, rep.d));
  if (!(rep.gamma0 > 0.0)) {
    throw std::logic_error("domgresit_witness: beta^2 floor is not positive");
  }

  const double c = rep.c, d = rep.d, mu = mp.mu;
  const auto witness = [c, d, mu](double r) {
    return (c < r && r < d) ? -mu + (r - c) : 1.0 - mu;
  };
  const auto control = [witness](double r) { return witness(r) + 0.1; };
  rep.witness = a1_membership_probe(mp, witness, levels);
  rep.control = a1_membership_probe(mp, control, levels);
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string to_json(const BlowupReport& rep) {
  JsonWriter w;
  w.begin_object();
  w.field("kind", "blowup");
  w.field("gamma", rep.gamma);
  w.field("gamma_max", rep.gamma_max);
  w.number_array("n_values", rep.n_values);
  w.number_array("pd_values", rep.pd_values);
  w.field("slope_vs_log_n", rep.slope_vs_log_n);
  w.end_object();
  return w.str();
}

std::string to_json(const PerturbationReport& rep) {
  JsonWriter w;
  w.begin_object();
  w.field("kind", rep.kind);
  w.field("diff_sup", rep.diff_sup);
  w.field("diff_l4", rep.diff_l4);
  if (rep.kind == "spike") {
    w.field("y_bar", rep.y_bar);
    w.field("y0", rep.y0);
    w.field("big_m", rep.big_m);
    w.field("m_load", rep.m_load);
  }
  w.key("rows");
  w.begin_array();
  for (const PerturbationRow& row : rep.rows) {
    w.begin_object();
    w.field("eps", row.eps);
    w.field("gap", row.gap);
    w.field("gap_error", row.gap_error);
    w.field("norm", row.norm);
    w.field("norm_bound", row.norm_bound);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

std::string to_json(const ProbeResult& probe) {
  JsonWriter w;
  probe_json(w, probe);
  return w.str();
}

std::string to_json(const DomgresitReport& rep) {
  JsonWriter w;
  w.begin_object();
  w.field("kind", "domgresit");
  w.field("c", rep.c);
  w.field("d", rep.d);
  w.field("gamma0", rep.gamma0);
  w.key("witness");
  probe_json(w, rep.witness);
  w.key("control");
  probe_json(w, rep.control);
  w.end_object();
  return w.str();
}

std::vector<LadderRow> ladder_rows(const BlowupReport& rep) {
  std::vector<LadderRow> rows(rep.n_values.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].parameter = static_cast<double>(rep.n_values[k]);
    rows[k].gap = rep.pd_values[k];
    rows[k].norm = 0.0;  // no perturbation norm attaches to the dual ladder
  }
  return rows;
}

std::vector<LadderRow> ladder_rows(const PerturbationReport& rep) {
  std::vector<LadderRow> rows(rep.rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].parameter = rep.rows[k].eps;
    rows[k].gap = rep.rows[k].gap;
    rows[k].norm = rep.rows[k].norm;
  }
  return rows;
}

void write_ladder_csv(const std::string& path,
                      const std::vector<LadderRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "parameter,gap,norm\n";
  char buf[128];
  for (const LadderRow& row : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", row.parameter,
                  row.gap, row.norm);
    out << buf;
  }
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace candual
